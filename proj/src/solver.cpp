#include "gausscurv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gausscurv/alphap.hpp"
#include "gausscurv/error.hpp"
#include "gausscurv/parallel.hpp"

namespace gcurv {

double BaseGrowth::w0(double r) {
  if (r >= 1.0) return std::log(r);
  const double s = r * r - 1.0;
  return s * (0.5 + s * (-0.25 + s / 6.0));
}

double BaseGrowth::laplacian(double r) {
  if (r >= 1.0) return 0.0;
  const double s = 1.0 - r * r;
  return 6.0 * s * s;
}

double BaseGrowth::flux_density(double r) {
  if (r >= 1.0) return 1.0;
  const double s = r * r - 1.0;
  return r * r * (1.0 - s + s * s);
}

namespace {

// Static per-node data of one patch of the solver layout.
struct NodeSet {
  Point2 center;
  double log_scale = 0.0;
  RadialGrid grid;
  int angles = 1;
  bool tail = false;
  int slot = -1;                 // bump slot, -1 for the background
  std::vector<double> w0;        // alpha-independent base profile
  std::vector<double> k_local;   // local curvature density (bumps carry r_n^2)
  std::vector<double> lap;       // Laplacian of w0 (background only)
  std::vector<Point2> global;    // global node position (approximate inside bumps)

  int size() const { return grid.size() * angles; }
  Point2 local(int node) const { return polar(grid.node(node / angles), kTwoPi * (node % angles) / angles); }
};

std::vector<NodeSet> make_layout(const CurvatureField& k, const SolverOptions& opts) {
  if (opts.angles < 1 || opts.bump_angles < 1 || opts.bump_radii < 4 || opts.radial_order < 2) {
    fail(ErrorKind::Parameter, "solver grid sizes must be positive");
  }
  std::vector<NodeSet> sets;
  const bool bumps = k.kind() == CurvatureKind::BumpSum;
  {
    NodeSet bg;
    bg.grid = RadialGrid::background(opts.r_max, opts.panel_ratio, opts.radial_order);
    bg.angles = opts.angles;
    bg.tail = k.kind() == CurvatureKind::RadialPower || k.kind() == CurvatureKind::ExactFamily;
    sets.push_back(std::move(bg));
  }
  if (bumps) {
    const auto specs = k.bumps();
    for (int slot = 0; slot < static_cast<int>(specs.size()); ++slot) {
      NodeSet b;
      b.center = specs[slot].center;
      b.log_scale = specs[slot].log_radius;
      b.grid = RadialGrid::unit_disk(opts.bump_radii);
      b.angles = opts.bump_angles;
      b.slot = slot;
      sets.push_back(std::move(b));
    }
  }
  for (NodeSet& s : sets) {
    const int n = s.size();
    s.w0.resize(n);
    s.k_local.resize(n);
    s.lap.assign(n, 0.0);
    s.global.resize(n);
    const double scale = std::exp(s.log_scale);
    for (int node = 0; node < n; ++node) {
      const Point2 z = s.local(node);
      const Point2 x{s.center.x + scale * z.x, s.center.y + scale * z.y};
      s.global[node] = x;
      s.w0[node] = BaseGrowth::w0(x);
      if (s.slot < 0) {
        const double r = s.grid.node(node / s.angles);
        s.lap[node] = BaseGrowth::laplacian(r);
        s.k_local[node] = bumps ? 0.0 : k.eval_extended(x);
      } else {
        const BumpSpec& b = k.bumps()[s.slot];
        s.k_local[node] = -std::exp(b.log_mass_scale() + k.log_scale()) * eta0(norm(z));
      }
    }
  }
  return sets;
}

PolarPatch make_patch(const NodeSet& s, std::vector<double> density) {
  return PolarPatch(s.center, s.log_scale, s.grid, s.angles, std::move(density), s.tail);
}

// h = K e^{2 alpha w0 + 2 v} per node, as local densities.
std::vector<std::vector<double>> curvature_density(const std::vector<NodeSet>& sets, double alpha,
                                                   const std::vector<std::vector<double>>& v) {
  std::vector<std::vector<double>> h(sets.size());
  for (std::size_t p = 0; p < sets.size(); ++p) {
    const NodeSet& s = sets[p];
    h[p].resize(s.size());
    for (int i = 0; i < s.size(); ++i) {
      h[p][i] = s.k_local[i] == 0.0 ? 0.0 : s.k_local[i] * std::exp(2.0 * alpha * s.w0[i] + 2.0 * v[p][i]);
    }
  }
  return h;
}

struct Integral {
  double value = 0.0;
  double tail = 0.0;
};

Integral integral_of(const std::vector<NodeSet>& sets, const std::vector<std::vector<double>>& density) {
  Integral out;
  for (std::size_t p = 0; p < sets.size(); ++p) {
    const PolarPatch patch = make_patch(sets[p], density[p]);
    out.value += patch.mass();
    out.tail += patch.tail_mass();
  }
  return out;
}

double truncation_mass(const CurvatureField& k, double alpha, double t) {
  if (k.kind() != CurvatureKind::BumpSum) return 0.0;
  const double e = k.ell() - 2.0 * alpha;
  const double next = k.n_max() + 1.0;
  double tail = std::pow(next, -e);
  tail += e > 1.0 ? std::pow(next, 1.0 - e) / (e - 1.0) : INFINITY;
  return std::exp(k.log_scale() + 2.0 * t) * eta0_disk_moment(1.0) * tail;
}

struct Step {
  double t = 0.0;
  SourceField source;
  double balance = 0.0;
};

Step build_step(const CurvatureField& k, const std::vector<NodeSet>& sets, double alpha,
                const std::vector<std::vector<double>>& v) {
  auto h = curvature_density(sets, alpha, v);
  const Integral curv = integral_of(sets, h);
  Step step;
  step.t = normalize_t(alpha, -curv.value);
  const double scale = std::exp(2.0 * step.t);
  for (std::size_t p = 0; p < sets.size(); ++p) {
    for (int i = 0; i < sets[p].size(); ++i) h[p][i] = scale * h[p][i] + alpha * sets[p].lap[i];
    step.source.add_patch(make_patch(sets[p], std::move(h[p])));
  }
  step.source.set_truncation(truncation_mass(k, alpha, step.t), k.n_max() + 1.0);
  step.balance = std::abs(step.source.total_integral()) / std::max(step.source.abs_integral(), 1e-300);
  return step;
}

std::vector<std::vector<double>> potential_at_nodes(const SourceField& f, const std::vector<NodeSet>& sets,
                                                    int threads) {
  std::vector<std::vector<double>> out(sets.size());
  for (std::size_t p = 0; p < sets.size(); ++p) {
    const NodeSet& s = sets[p];
    const PolarPatch& self = f.patch(static_cast<int>(p));
    out[p] = self.self_potential(threads);
    if (f.size() == 1) continue;
    const int nr = s.grid.size();
    parallel_for(nr, threads, [&](int i) {
      for (int a = 0; a < s.angles; ++a) {
        const int node = i * s.angles + a;
        const Point2 z = s.local(node);
        double sum = 0.0;
        for (int q = 0; q < f.size(); ++q) {
          if (q == static_cast<int>(p)) continue;
          const PolarPatch& other = f.patch(q);
          sum += other.potential(other.to_local_from(s.center, s.log_scale, z));
        }
        out[p][node] += sum;
      }
    });
  }
  return out;
}

void check_alpha_range(const CurvatureField& k, double alpha, const SolverOptions& opts) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::Parameter, "alpha must be positive");
  if (opts.skip_range_guard) return;
  const double a1 = alpha1_estimate(k, opts.threads);
  if (!(alpha < a1)) {
    std::ostringstream msg;
    msg << "alpha = " << alpha << " is outside the existence range (0, " << a1 << ") of " << k.describe();
    fail(ErrorKind::Parameter, msg.str());
  }
}

double max_abs(const std::vector<std::vector<double>>& v) {
  double m = 0.0;
  for (const auto& row : v) {
    for (double x : row) m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace

double Bracket::lower(Point2 x) const { return alpha * BaseGrowth::w0(x) + t + source.value(x) - sup_norm; }
double Bracket::upper(Point2 x) const { return alpha * BaseGrowth::w0(x) + t + source.value(x) + sup_norm; }

SolutionField::SolutionField(CurvatureField k, double alpha, double t, SourceField source,
                             std::vector<std::vector<double>> v_nodes, SolveInfo info, std::optional<Bracket> bracket)
    : k_(std::move(k)), alpha_(alpha), t_(t), source_(std::move(source)), v_nodes_(std::move(v_nodes)),
      info_(std::move(info)), bracket_(std::move(bracket)) {}

double SolutionField::v(Point2 x) const { return source_.value(x); }
double SolutionField::u(Point2 x) const { return alpha_ * BaseGrowth::w0(x) + t_ + v(x); }
double SolutionField::xi(Point2 x) const { return t_ + v(x); }

int SolutionField::bump_patch(int slot) const {
  if (k_.kind() != CurvatureKind::BumpSum || slot < 0 || slot + 1 >= source_.size()) return -1;
  return slot + 1;
}

double SolutionField::v_local(int slot, Point2 z) const {
  const int p = bump_patch(slot);
  if (p < 0) fail(ErrorKind::Contract, "v_local: solution has no bump slot " + std::to_string(slot));
  return source_.value_local(p, z);
}

double normalize_t(double alpha, double curvature_integral) {
  if (!std::isfinite(curvature_integral) || !(curvature_integral > 0.0)) {
    std::ostringstream msg;
    msg << "normalize_t: curvature integral " << curvature_integral << " is zero or not finite";
    fail(ErrorKind::Normalization, msg.str());
  }
  return 0.5 * std::log(2.0 * alpha * kPi / curvature_integral);
}

double normalize_t(const CurvatureField& k, double alpha, const std::function<double(Point2)>& v,
                   const SolverOptions& opts) {
  const auto sets = make_layout(k, opts);
  std::vector<std::vector<double>> vals(sets.size());
  for (std::size_t p = 0; p < sets.size(); ++p) {
    vals[p].resize(sets[p].size());
    for (int i = 0; i < sets[p].size(); ++i) vals[p][i] = v(sets[p].global[i]);
  }
  const auto h = curvature_density(sets, alpha, vals);
  return normalize_t(alpha, -integral_of(sets, h).value);
}

Bracket super_sub_bracket(const CurvatureField& k, double alpha, const SolverOptions& opts) {
  check_alpha_range(k, alpha, opts);
  const auto sets = make_layout(k, opts);
  std::vector<std::vector<double>> zero(sets.size());
  for (std::size_t p = 0; p < sets.size(); ++p) zero[p].assign(sets[p].size(), 0.0);
  Step step = build_step(k, sets, alpha, zero);
  const auto w = potential_at_nodes(step.source, sets, opts.threads);
  Bracket b;
  b.alpha = alpha;
  b.t = step.t;
  b.sup_norm = max_abs(w);
  b.source = std::move(step.source);
  return b;
}

SolutionField picard_solve(const CurvatureField& k, double alpha, const SolverOptions& opts) {
  check_alpha_range(k, alpha, opts);
  if (!(opts.omega > 0.0 && opts.omega <= 1.0)) fail(ErrorKind::Parameter, "damping omega must lie in (0, 1]");
  if (!(opts.tol > 0.0)) fail(ErrorKind::Parameter, "tolerance must be positive");
  if (opts.max_iter < 1) fail(ErrorKind::Parameter, "max_iter must be positive");
  const auto sets = make_layout(k, opts);

  std::optional<Bracket> bracket;
  std::vector<std::vector<double>> bracket_w;
  if (opts.bracket) {
    SolverOptions inner = opts;
    inner.skip_range_guard = true;
    bracket = super_sub_bracket(k, alpha, inner);
    bracket_w = potential_at_nodes(bracket->source, sets, opts.threads);
  }

  std::vector<std::vector<double>> v(sets.size());
  for (std::size_t p = 0; p < sets.size(); ++p) {
    v[p].resize(sets[p].size());
    for (int i = 0; i < sets[p].size(); ++i) {
      v[p][i] = opts.v_init + (opts.initial ? opts.initial(sets[p].global[i]) : 0.0);
    }
  }

  SolveInfo info;
  double omega = opts.omega;
  std::vector<std::vector<double>> prev_delta;
  double prev_update = INFINITY;
  int growing = 0;
  Step step;
  std::vector<std::vector<double>> w;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    step = build_step(k, sets, alpha, v);
    info.balance = std::max(info.balance, step.balance);
    w = potential_at_nodes(step.source, sets, opts.threads);

    if (bracket) {
      const double slack = 1e-9 * (1.0 + bracket->sup_norm);
      for (std::size_t p = 0; p < sets.size(); ++p) {
        for (int i = 0; i < sets[p].size(); ++i) {
          const double gap = step.t + v[p][i] - bracket->t - bracket_w[p][i];
          if (std::abs(gap) > bracket->sup_norm + slack) info.within_bracket = false;
        }
      }
    }

    double update = 0.0, dot = 0.0, norm_now = 0.0, norm_prev = 0.0;
    std::vector<std::vector<double>> delta(sets.size());
    for (std::size_t p = 0; p < sets.size(); ++p) {
      delta[p].resize(sets[p].size());
      for (int i = 0; i < sets[p].size(); ++i) {
        const double d = w[p][i] - v[p][i];
        delta[p][i] = d;
        update = std::max(update, std::abs(d));
        norm_now += d * d;
        if (!prev_delta.empty()) {
          dot += d * prev_delta[p][i];
          norm_prev += prev_delta[p][i] * prev_delta[p][i];
        }
      }
    }
    if (!std::isfinite(update)) {
      fail(ErrorKind::NonConvergence, "picard_solve: iterate became non-finite at iteration " + std::to_string(iter));
    }
    info.trace.push_back(update);
    info.iterations = iter;
    info.final_update = update;
    if (update <= opts.tol) {
      info.converged = true;
      break;
    }
    growing = update > prev_update ? growing + 1 : 0;
    if (growing >= 10) {
      std::ostringstream msg;
      msg << "picard_solve: update norm grew for 10 consecutive iterations (last " << update << ", omega " << omega
          << ")";
      fail(ErrorKind::NonConvergence, msg.str());
    }
    const bool oscillating = !prev_delta.empty() && dot < -0.25 * std::sqrt(norm_now * norm_prev) &&
                             update > 0.3 * prev_update;
    if ((oscillating || update > prev_update) && omega > 1.0 / 64.0) omega *= 0.5;
    for (std::size_t p = 0; p < sets.size(); ++p) {
      for (int i = 0; i < sets[p].size(); ++i) v[p][i] += omega * delta[p][i];
    }
    prev_delta = std::move(delta);
    prev_update = update;
  }
  if (!info.converged) {
    std::ostringstream msg;
    msg << "picard_solve: no convergence in " << opts.max_iter << " iterations (last update " << info.final_update
        << ", tol " << opts.tol << ")";
    fail(ErrorKind::NonConvergence, msg.str());
  }
  info.omega_final = omega;
  info.max_abs_v = max_abs(w);
  SolutionField sol(k, alpha, step.t, std::move(step.source), std::move(w), std::move(info), std::move(bracket));
  // Off-axis angles keep the stencil clear of the bump centers.
  const double residual = pde_residual(sol, check_points(0.25, 20.0, 8, 6));
  if (!(residual <= opts.residual_tol)) {
    std::ostringstream msg;
    msg << "picard_solve: update norm converged but the PDE residual " << residual << " exceeds " << opts.residual_tol;
    fail(ErrorKind::NumericTolerance, msg.str());
  }
  sol.set_residual(residual);
  return sol;
}

TotalCurvature total_curvature(const SolutionField& u) {
  const CurvatureField& k = u.curvature();
  TotalCurvature out;
  const SourceField& f = u.source();
  for (int p = 0; p < f.size(); ++p) {
    const PolarPatch& patch = f.patch(p);
    const auto nodes = u.v_nodes(p);
    std::vector<double> density(nodes.size());
    const double scale = std::exp(patch.log_scale());
    for (int i = 0; i < patch.grid().size(); ++i) {
      for (int a = 0; a < patch.angles(); ++a) {
        const int node = i * patch.angles() + a;
        const Point2 z = patch.node_local(i, a);
        const Point2 x{patch.center().x + scale * z.x, patch.center().y + scale * z.y};
        double kl;
        if (p == 0) {
          kl = k.kind() == CurvatureKind::BumpSum ? 0.0 : k.eval_extended(x);
        } else {
          kl = -std::exp(k.bumps()[p - 1].log_mass_scale() + k.log_scale()) * eta0(norm(z));
        }
        density[node] = kl == 0.0 ? 0.0 : kl * std::exp(2.0 * u.alpha() * BaseGrowth::w0(x) + 2.0 * u.t() + 2.0 * nodes[node]);
      }
    }
    const PolarPatch mass(patch.center(), patch.log_scale(), patch.grid(), patch.angles(), std::move(density),
                          patch.has_tail());
    out.value += mass.mass();
    out.tail_bound += 0.1 * std::abs(mass.tail_mass());
  }
  out.tail_bound += truncation_mass(k, u.alpha(), u.t());
  return out;
}

TotalCurvature total_curvature(const CurvatureField& k, const std::function<double(Point2)>& u,
                               const SolverOptions& opts) {
  const auto sets = make_layout(k, opts);
  TotalCurvature out;
  for (const NodeSet& s : sets) {
    std::vector<double> density(s.size());
    for (int i = 0; i < s.size(); ++i) {
      density[i] = s.k_local[i] == 0.0 ? 0.0 : s.k_local[i] * std::exp(2.0 * u(s.global[i]));
    }
    const PolarPatch patch = make_patch(s, std::move(density));
    out.value += patch.mass();
    out.tail_bound += 0.1 * std::abs(patch.tail_mass());
  }
  return out;
}

double pde_residual(const SolutionField& u, std::span<const Point2> points) {
  const CurvatureField& k = u.curvature();
  double worst = 0.0, scale = 0.0;
  for (const Point2 x : points) {
    const double h = 1e-2 * std::max(0.05, norm(x));
    const double c = u.u(x);
    const double lap = (u.u({x.x + h, x.y}) + u.u({x.x - h, x.y}) + u.u({x.x, x.y + h}) + u.u({x.x, x.y - h}) -
                        4.0 * c) / (h * h);
    const double source = k.eval_extended(x) * std::exp(2.0 * c);
    worst = std::max(worst, std::abs(lap + source));
    scale = std::max(scale, std::abs(source));
  }
  return scale > 0.0 ? worst / scale : worst;
}

std::vector<Point2> check_points(double r_min, double r_max, int radii, int angles) {
  if (!(r_min > 0.0) || !(r_max >= r_min) || radii < 1 || angles < 1) {
    fail(ErrorKind::Parameter, "check_points: need 0 < r_min <= r_max and positive counts");
  }
  std::vector<Point2> pts;
  for (int i = 0; i < radii; ++i) {
    const double r = radii == 1 ? r_min : r_min * std::pow(r_max / r_min, static_cast<double>(i) / (radii - 1));
    for (int a = 0; a < angles; ++a) pts.push_back(polar(r, kTwoPi * (a + 0.5) / angles));
  }
  return pts;
}

}  // namespace gcurv
