#include "gausscurv/potential.hpp"

#include <algorithm>
#include <cmath>

#include "gausscurv/error.hpp"
#include "gausscurv/parallel.hpp"
#include "gausscurv/quadrature.hpp"

namespace gcurv {

namespace {

constexpr double kNearRatio = 1.5;
// Modes below this fraction of the largest density are dropped.
constexpr double kModeCutoff = 1e-14;

int default_sub_order(int order) { return std::max(2 * order + 4, 20); }

// Pieces of [u, w] graded geometrically towards u when u is small relative to w.
void graded_pieces(double u, double w, std::vector<std::pair<double, double>>& out) {
  out.clear();
  double hi = w;
  int depth = 0;
  while (hi * 0.25 > u && depth < 14) {
    out.emplace_back(hi * 0.25, hi);
    hi *= 0.25;
    ++depth;
  }
  if (hi > u) out.emplace_back(u, hi);
}

}  // namespace

double LocalPoint::radius() const { return std::exp(log_radius); }

LocalPoint LocalPoint::from_cartesian(Point2 z) {
  const double r = norm(z);
  if (r == 0.0) return LocalPoint{};
  return {std::log(r), std::atan2(z.y, z.x)};
}

// ---------------------------------------------------------------------------
// RadialGrid

RadialGrid::RadialGrid(std::vector<double> breaks, int order) : breaks_(std::move(breaks)), order_(order) {
  if (breaks_.size() < 2 || order_ < 1) fail(ErrorKind::Parameter, "radial grid needs a panel and a positive order");
  if (breaks_.front() != 0.0) fail(ErrorKind::Parameter, "radial grid must start at 0");
  for (std::size_t i = 1; i < breaks_.size(); ++i) {
    if (!(breaks_[i] > breaks_[i - 1])) fail(ErrorKind::Parameter, "radial grid breaks must increase");
  }
  const GaussRule& rule = gauss_legendre(order_);
  for (int p = 0; p < panels(); ++p) {
    const double a = breaks_[p], b = breaks_[p + 1];
    for (int i = 0; i < order_; ++i) {
      nodes_.push_back(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i]);
      weights_.push_back(0.5 * (b - a) * rule.weights[i]);
    }
  }
}

RadialGrid RadialGrid::background(double r_max, double ratio, int order) {
  if (!(r_max > 1.0) || !(ratio > 1.0)) fail(ErrorKind::Parameter, "background grid needs r_max > 1 and ratio > 1");
  std::vector<double> breaks{0.0, 0.5, 1.0};
  const int count = static_cast<int>(std::ceil(std::log(r_max) / std::log(ratio) - 1e-12));
  const double step = std::log(r_max) / count;
  for (int k = 1; k < count; ++k) breaks.push_back(std::exp(k * step));
  breaks.push_back(r_max);
  return RadialGrid(std::move(breaks), order);
}

RadialGrid RadialGrid::unit_disk(int radii) {
  const int order = std::max(2, (radii + 3) / 4);
  return RadialGrid({0.0, 0.5, 2.0 / 3.0, 5.0 / 6.0, 1.0}, order);
}

int RadialGrid::panel_containing(double rho) const {
  if (rho < 0.0 || rho > breaks_.back()) return -1;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), rho);
  int p = static_cast<int>(it - breaks_.begin()) - 1;
  return std::min(p, panels() - 1);
}

// ---------------------------------------------------------------------------
// PolarPatch

PolarPatch::PolarPatch(Point2 center, double log_scale, RadialGrid grid, int angles,
                       std::vector<double> density, bool power_tail)
    : center_(center), log_scale_(log_scale), grid_(std::move(grid)), angles_(angles),
      density_(std::move(density)) {
  const int nr = grid_.size();
  if (angles_ < 1) fail(ErrorKind::Parameter, "polar patch needs at least one angle");
  if (static_cast<int>(density_.size()) != nr * angles_) {
    fail(ErrorKind::Parameter, "polar patch density has the wrong number of samples");
  }
  for (double v : density_) {
    if (!std::isfinite(v)) fail(ErrorKind::Parameter, "source density must be bounded (non-finite sample)");
    max_abs_ = std::max(max_abs_, std::abs(v));
  }

  modes_ = angles_ / 2;
  const bool nyquist = angles_ % 2 == 0 && modes_ > 0;
  c0_.assign(nr, 0.0);
  cm_.assign(static_cast<std::size_t>(modes_) * nr, 0.0);
  sm_.assign(static_cast<std::size_t>(modes_) * nr, 0.0);
  std::vector<double> cos_table(angles_), sin_table(angles_);
  for (int k = 0; k < angles_; ++k) {
    cos_table[k] = std::cos(kTwoPi * k / angles_);
    sin_table[k] = std::sin(kTwoPi * k / angles_);
  }
  for (int i = 0; i < nr; ++i) {
    const double* row = &density_[static_cast<std::size_t>(i) * angles_];
    double mean = 0.0;
    for (int k = 0; k < angles_; ++k) mean += row[k];
    c0_[i] = mean / angles_;
    for (int m = 1; m <= modes_; ++m) {
      double c = 0.0, s = 0.0;
      for (int k = 0; k < angles_; ++k) {
        const int idx = (m * k) % angles_;
        c += row[k] * cos_table[idx];
        s += row[k] * sin_table[idx];
      }
      const bool is_nyquist = nyquist && m == modes_;
      cm_[(m - 1) * nr + i] = (is_nyquist ? 1.0 : 2.0) * c / angles_;
      sm_[(m - 1) * nr + i] = is_nyquist ? 0.0 : 2.0 * s / angles_;
    }
  }
  for (int m = 1; m <= modes_; ++m) {
    double peak = 0.0;
    for (int i = 0; i < nr; ++i) {
      peak = std::max({peak, std::abs(cm_[(m - 1) * nr + i]), std::abs(sm_[(m - 1) * nr + i])});
    }
    if (peak > kModeCutoff * max_abs_) active_.push_back(m);
  }

  const int np = grid_.panels();
  const int order = grid_.order();
  mass0_.assign(np, 0.0);
  logmom0_.assign(np, 0.0);
  below_c_.assign(static_cast<std::size_t>(np) * modes_, 0.0);
  below_s_.assign(below_c_.size(), 0.0);
  above_c_.assign(below_c_.size(), 0.0);
  above_s_.assign(below_c_.size(), 0.0);
  double abs_mass = 0.0;
  for (int p = 0; p < np; ++p) {
    const double a = grid_.lo(p), b = grid_.hi(p);
    for (int j = 0; j < order; ++j) {
      const int i = p * order + j;
      const double rho = grid_.node(i), w = grid_.weight(i);
      mass0_[p] += w * rho * c0_[i];
      logmom0_[p] += w * rho * c0_[i] * std::log(rho);
      double row_abs = 0.0;
      for (int k = 0; k < angles_; ++k) row_abs += std::abs(density_[static_cast<std::size_t>(i) * angles_ + k]);
      abs_mass += w * rho * row_abs / angles_;
      for (int m : active_) {
        const double down = std::pow(rho / b, m);
        const double up = a > 0.0 ? std::pow(a / rho, m) : 0.0;
        const std::size_t slot = static_cast<std::size_t>(p) * modes_ + (m - 1);
        below_c_[slot] += w * rho * down * cm_[(m - 1) * nr + i];
        below_s_[slot] += w * rho * down * sm_[(m - 1) * nr + i];
        above_c_[slot] += w * rho * up * cm_[(m - 1) * nr + i];
        above_s_[slot] += w * rho * up * sm_[(m - 1) * nr + i];
      }
    }
  }
  double mass = 0.0;
  for (double m0 : mass0_) mass += m0;
  mass_ = kTwoPi * mass;
  abs_mass_ = kTwoPi * abs_mass;

  if (power_tail && nr >= 2) {
    const double r1 = grid_.node(nr - 2), r2 = grid_.node(nr - 1);
    const double f1 = c0_[nr - 2], f2 = c0_[nr - 1];
    if (f1 != 0.0 && f2 != 0.0 && (f1 > 0) == (f2 > 0)) {
      const double s = -std::log(f2 / f1) / std::log(r2 / r1);
      if (s > 2.0 + 1e-3) {
        tail_active_ = true;
        tail_exponent_ = s;
        tail_coeff_ = f2 * std::pow(r2, s);
        mass_ += tail_mass();
        abs_mass_ += std::abs(tail_mass());
      }
    }
  }
}

PolarPatch PolarPatch::from_function(Point2 center, double log_scale, RadialGrid grid, int angles,
                                     const std::function<double(Point2)>& local_density, bool power_tail) {
  std::vector<double> values(static_cast<std::size_t>(grid.size()) * angles);
  for (int i = 0; i < grid.size(); ++i) {
    for (int k = 0; k < angles; ++k) {
      values[static_cast<std::size_t>(i) * angles + k] = local_density(polar(grid.node(i), kTwoPi * k / angles));
    }
  }
  return PolarPatch(center, log_scale, std::move(grid), angles, std::move(values), power_tail);
}

PolarPatch PolarPatch::from_radial(Point2 center, double log_scale, RadialGrid grid,
                                   const std::function<double(double)>& local_density, bool power_tail) {
  std::vector<double> values(grid.size());
  for (int i = 0; i < grid.size(); ++i) values[i] = local_density(grid.node(i));
  return PolarPatch(center, log_scale, std::move(grid), 1, std::move(values), power_tail);
}

double PolarPatch::angle(int k) const { return kTwoPi * k / angles_; }

Point2 PolarPatch::node_local(int i, int k) const { return polar(grid_.node(i), angle(k)); }

bool PolarPatch::is_radial(double rel_tol) const {
  const int nr = grid_.size();
  double peak0 = 0.0;
  for (double c : c0_) peak0 = std::max(peak0, std::abs(c));
  for (int m = 1; m <= modes_; ++m) {
    for (int i = 0; i < nr; ++i) {
      const double v = std::max(std::abs(cm_[(m - 1) * nr + i]), std::abs(sm_[(m - 1) * nr + i]));
      if (v > rel_tol * peak0) return false;
    }
  }
  return true;
}

double PolarPatch::tail_mass() const {
  if (!tail_active_) return 0.0;
  const double rb = grid_.outer();
  const double s = tail_exponent_;
  return kTwoPi * tail_coeff_ * std::pow(rb, 2.0 - s) / (s - 2.0);
}

LocalPoint PolarPatch::to_local(Point2 x) const {
  const Point2 d = x - center_;
  const double r = norm(d);
  if (r == 0.0) return LocalPoint{};
  return {std::log(r) - log_scale_, std::atan2(d.y, d.x)};
}

LocalPoint PolarPatch::to_local_from(Point2 origin_center, double origin_log_scale, Point2 z) const {
  const Point2 shift = origin_center - center_;
  const double scale = std::exp(origin_log_scale);
  const Point2 d{shift.x + scale * z.x, shift.y + scale * z.y};
  const double r = norm(d);
  if (r == 0.0) return LocalPoint{};
  return {std::log(r) - log_scale_, std::atan2(d.y, d.x)};
}

double PolarPatch::density_at(LocalPoint p) const {
  const double r = p.radius();
  const int panel = grid_.panel_containing(r);
  if (panel < 0) {
    if (tail_active_ && r > grid_.outer()) return tail_coeff_ * std::pow(r, -tail_exponent_);
    return 0.0;
  }
  const int order = grid_.order();
  const int nr = grid_.size();
  std::vector<double> basis(order);
  lagrange_basis(gauss_legendre(order), grid_.lo(panel), grid_.hi(panel), r, basis);
  const int base = panel * order;
  double value = 0.0;
  for (int j = 0; j < order; ++j) value += basis[j] * c0_[base + j];
  for (int m : active_) {
    double c = 0.0, s = 0.0;
    for (int j = 0; j < order; ++j) {
      c += basis[j] * cm_[(m - 1) * nr + base + j];
      s += basis[j] * sm_[(m - 1) * nr + base + j];
    }
    value += c * std::cos(m * p.angle) + s * std::sin(m * p.angle);
  }
  return value;
}

double PolarPatch::tail_mode0(double log_r) const {
  if (!tail_active_) return 0.0;
  const double rb = grid_.outer();
  const double s = tail_exponent_;
  const double c = tail_coeff_;
  const double e = s - 2.0;
  if (log_r <= std::log(rb)) {
    return c * std::pow(rb, -e) * (std::log(rb) / e + 1.0 / (e * e));
  }
  const double r = std::exp(log_r);
  return c * log_r * (std::pow(rb, -e) - std::pow(r, -e)) / e + c * std::pow(r, -e) * (log_r / e + 1.0 / (e * e));
}

void PolarPatch::radial_modes(double log_r, int sub_order, std::span<double> cos_part,
                              std::span<double> sin_part, double& mode0) const {
  const int order = grid_.order();
  const int nr = grid_.size();
  const int q = sub_order > 0 ? sub_order : default_sub_order(order);
  const GaussRule& sub_rule = gauss_legendre(q);
  const GaussRule& panel_rule = gauss_legendre(order);
  const double ln_near = std::log(kNearRatio);
  const bool at_center = std::isinf(log_r) && log_r < 0;
  const double r = at_center ? 0.0 : std::exp(log_r);

  std::fill(cos_part.begin(), cos_part.end(), 0.0);
  std::fill(sin_part.begin(), sin_part.end(), 0.0);
  mode0 = 0.0;

  std::vector<double> basis(order);
  std::vector<std::pair<double, double>> pieces;

  // Accumulates a sub-interval [u, w] of panel p, below (rho <= r) or above the target.
  auto accumulate = [&](int p, double u, double w, bool below) {
    const double a = grid_.lo(p), b = grid_.hi(p);
    const int base = p * order;
    if (below) {
      pieces.assign(1, {u, w});
    } else {
      graded_pieces(u, w, pieces);
    }
    for (const auto& [lo, hi] : pieces) {
      const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
      for (int s = 0; s < q; ++s) {
        const double rho = mid + half * sub_rule.nodes[s];
        const double wt = half * sub_rule.weights[s] * rho;
        lagrange_basis(panel_rule, a, b, rho, basis);
        double c0 = 0.0;
        for (int j = 0; j < order; ++j) c0 += basis[j] * c0_[base + j];
        const double log_rho = std::log(rho);
        mode0 += wt * c0 * (below ? log_r : log_rho);
        if (active_.empty() || at_center) continue;
        const double step = below ? std::exp(log_rho - log_r) : std::exp(log_r - log_rho);
        for (int m : active_) {
          double c = 0.0, sn = 0.0;
          const double* cm = &cm_[static_cast<std::size_t>(m - 1) * nr + base];
          const double* sm = &sm_[static_cast<std::size_t>(m - 1) * nr + base];
          for (int j = 0; j < order; ++j) {
            c += basis[j] * cm[j];
            sn += basis[j] * sm[j];
          }
          const double kernel = std::pow(step, m);
          cos_part[m - 1] += wt * kernel * c;
          sin_part[m - 1] += wt * kernel * sn;
        }
      }
    }
  };

  for (int p = 0; p < grid_.panels(); ++p) {
    const double a = grid_.lo(p), b = grid_.hi(p);
    const double log_a = a > 0.0 ? std::log(a) : -INFINITY;
    const double log_b = std::log(b);
    bool near;
    if (at_center) {
      near = a == 0.0;
    } else {
      near = (a == 0.0 || log_r >= log_a - ln_near) && log_r <= log_b + ln_near;
    }
    if (!near) {
      const std::size_t slot = static_cast<std::size_t>(p) * modes_;
      if (!at_center && log_r > log_b) {
        mode0 += log_r * mass0_[p];
        const double step = std::exp(log_b - log_r);
        for (int m : active_) {
          const double f = std::pow(step, m);
          if (f == 0.0) break;
          cos_part[m - 1] += f * below_c_[slot + m - 1];
          sin_part[m - 1] += f * below_s_[slot + m - 1];
        }
      } else {
        mode0 += logmom0_[p];
        if (at_center) continue;
        const double step = std::exp(log_r - log_a);
        for (int m : active_) {
          const double f = std::pow(step, m);
          if (f == 0.0) break;
          cos_part[m - 1] += f * above_c_[slot + m - 1];
          sin_part[m - 1] += f * above_s_[slot + m - 1];
        }
      }
      continue;
    }
    if (r > a && r < b) {
      accumulate(p, a, r, true);
      accumulate(p, r, b, false);
    } else if (r <= a) {
      accumulate(p, a, b, false);
    } else {
      accumulate(p, a, b, true);
    }
  }
  mode0 += tail_mode0(log_r);
}

double PolarPatch::synthesize(double mode0, std::span<const double> cos_part, std::span<const double> sin_part,
                              double angle) const {
  double j = kTwoPi * mode0;
  for (int m : active_) {
    j -= (kPi / m) * (cos_part[m - 1] * std::cos(m * angle) + sin_part[m - 1] * std::sin(m * angle));
  }
  return j;
}

double PolarPatch::log_integral(LocalPoint p, int sub_order) const {
  std::vector<double> cp(modes_), sp(modes_);
  double mode0 = 0.0;
  radial_modes(p.log_radius, sub_order, cp, sp, mode0);
  return synthesize(mode0, cp, sp, p.angle);
}

double PolarPatch::potential(LocalPoint p, int sub_order) const {
  return -(mass_ * log_scale_ + log_integral(p, sub_order)) / kTwoPi;
}

double PolarPatch::spectral_tail(LocalPoint p) const {
  if (active_.empty()) return 0.0;
  std::vector<double> cp(modes_), sp(modes_);
  double mode0 = 0.0;
  radial_modes(p.log_radius, 0, cp, sp, mode0);
  const int m = active_.back();
  return std::abs((kPi / m) * (cp[m - 1] * std::cos(m * p.angle) + sp[m - 1] * std::sin(m * p.angle))) / kTwoPi;
}

double PolarPatch::tail_potential(LocalPoint p) const {
  if (!tail_active_) return 0.0;
  return -(tail_mass() * log_scale_ + kTwoPi * tail_mode0(p.log_radius)) / kTwoPi;
}

std::vector<double> PolarPatch::self_potential(int threads) const {
  const int nr = grid_.size();
  std::vector<double> out(static_cast<std::size_t>(nr) * angles_);
  parallel_for(nr, threads, [&](int i) {
    std::vector<double> cp(modes_), sp(modes_);
    double mode0 = 0.0;
    radial_modes(std::log(grid_.node(i)), 0, cp, sp, mode0);
    for (int k = 0; k < angles_; ++k) {
      const double j = synthesize(mode0, cp, sp, angle(k));
      out[static_cast<std::size_t>(i) * angles_ + k] = -(mass_ * log_scale_ + j) / kTwoPi;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// SourceField

double SourceField::total_integral() const {
  double total = 0.0;
  for (const auto& p : patches_) total += p.mass();
  return total;
}

double SourceField::abs_integral() const {
  double total = 0.0;
  for (const auto& p : patches_) total += p.abs_mass();
  return total;
}

bool SourceField::is_balanced(double rel_tol) const {
  const double scale = abs_integral();
  return std::abs(total_integral()) <= rel_tol * std::max(scale, 1e-300);
}

int SourceField::owner_of(Point2 x) const {
  // Bump frames (log_scale < 0) whose support contains x take ownership so
  // that the target is expressed in that frame.
  for (int i = 0; i < size(); ++i) {
    const PolarPatch& p = patches_[i];
    if (p.log_scale() >= 0.0) continue;
    const Point2 d = x - p.center();
    if (norm(d) < std::exp(p.log_scale()) * p.grid().outer()) return i;
  }
  return -1;
}

double SourceField::density(Point2 x) const {
  const int owner = owner_of(x);
  if (owner >= 0) {
    const PolarPatch& p = patches_[owner];
    const Point2 d = x - p.center();
    return density_local(owner, std::exp(-p.log_scale()) * d);
  }
  double total = 0.0;
  for (const auto& p : patches_) total += p.density_at(p.to_local(x)) * std::exp(-2.0 * p.log_scale());
  return total;
}

double SourceField::density_local(int owner, Point2 z) const {
  const PolarPatch& self = patches_[owner];
  double total = 0.0;
  for (int i = 0; i < size(); ++i) {
    const PolarPatch& p = patches_[i];
    const LocalPoint lp = i == owner ? LocalPoint::from_cartesian(z)
                                     : p.to_local_from(self.center(), self.log_scale(), z);
    total += p.density_at(lp) * std::exp(-2.0 * p.log_scale());
  }
  return total;
}

double SourceField::value_local(int owner, Point2 z, int sub_order) const {
  const PolarPatch& self = patches_[owner];
  double total = 0.0;
  for (int i = 0; i < size(); ++i) {
    const PolarPatch& p = patches_[i];
    const LocalPoint lp = i == owner ? LocalPoint::from_cartesian(z)
                                     : p.to_local_from(self.center(), self.log_scale(), z);
    total += p.potential(lp, sub_order);
  }
  return total;
}

double SourceField::value(Point2 x) const {
  const int owner = owner_of(x);
  if (owner >= 0) {
    const PolarPatch& p = patches_[owner];
    return value_local(owner, std::exp(-p.log_scale()) * (x - p.center()));
  }
  double total = 0.0;
  for (const auto& p : patches_) total += p.potential(p.to_local(x));
  return total;
}

PotentialEvaluation SourceField::evaluate(Point2 x) const {
  PotentialEvaluation out;
  out.target = x;
  const int owner = owner_of(x);
  Point2 z{};
  if (owner >= 0) z = std::exp(-patches_[owner].log_scale()) * (x - patches_[owner].center());
  double bound = 0.0;
  for (int i = 0; i < size(); ++i) {
    const PolarPatch& p = patches_[i];
    LocalPoint lp;
    if (owner < 0) {
      lp = p.to_local(x);
    } else if (i == owner) {
      lp = LocalPoint::from_cartesian(z);
    } else {
      lp = p.to_local_from(patches_[owner].center(), patches_[owner].log_scale(), z);
    }
    const int fine = default_sub_order(p.grid().order());
    const double v_fine = p.potential(lp, fine);
    const double v_coarse = p.potential(lp, fine / 2);
    out.value += v_fine;
    bound += std::abs(v_fine - v_coarse) + p.spectral_tail(lp) + 0.1 * std::abs(p.tail_potential(lp));
  }
  if (truncation_mass_ > 0.0) {
    bound += truncation_mass_ * std::max(1.0, std::log(2.0 + norm(x) + truncation_extent_)) / kTwoPi;
  }
  out.error_bound = bound;
  return out;
}

PotentialEvaluation log_potential(const SourceField& f, Point2 x) {
  if (!std::isfinite(x.x) || !std::isfinite(x.y)) fail(ErrorKind::Parameter, "log_potential: target must be finite");
  return f.evaluate(x);
}

double bump_far_field(const PolarPatch& patch, Point2 x) {
  if (!patch.is_radial(1e-10)) fail(ErrorKind::Contract, "bump_far_field: density is not radial");
  const LocalPoint lp = patch.to_local(x);
  if (lp.log_radius < std::log(patch.grid().outer())) {
    fail(ErrorKind::Contract, "bump_far_field: target lies inside the bump support");
  }
  return -(patch.mass() / kTwoPi) * (lp.log_radius + patch.log_scale());
}

DecayReport ground_state_decay_check(const SourceField& f, double beta, std::span<const double> radii, int angles) {
  if (!f.is_balanced(1e-8)) {
    fail(ErrorKind::Contract, "ground_state_decay_check: source is not balanced (total integral " +
                                  std::to_string(f.total_integral()) + ")");
  }
  if (!(beta > 0.0)) fail(ErrorKind::Parameter, "ground_state_decay_check: beta must be positive");
  DecayReport report;
  report.beta = beta;
  report.exponent = 2.0 * beta / (1.0 + 2.0 * beta);
  report.radii.assign(radii.begin(), radii.end());
  for (double r : radii) {
    if (!(r > 1.0)) fail(ErrorKind::Parameter, "ground_state_decay_check: radii must exceed 1");
    double worst = 0.0;
    for (int k = 0; k < angles; ++k) {
      const double w = f.value(polar(r, kTwoPi * (k + 0.5) / angles));
      worst = std::max(worst, std::abs(w));
    }
    report.ratios.push_back(worst * std::pow(r, report.exponent) / std::log(r));
  }
  report.bounded = std::all_of(report.ratios.begin(), report.ratios.end(), [](double v) { return std::isfinite(v); });
  report.non_increasing = true;
  for (std::size_t i = 1; i < report.ratios.size(); ++i) {
    if (report.ratios[i] > report.ratios[i - 1]) report.non_increasing = false;
  }
  return report;
}

UniformGrid sample_potential(const SourceField& f, Point2 center, double spacing, int half_width) {
  UniformGrid g;
  g.spacing = spacing;
  g.nx = g.ny = 2 * half_width + 1;
  g.origin = {center.x - half_width * spacing, center.y - half_width * spacing};
  g.values.resize(static_cast<std::size_t>(g.nx) * g.ny);
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) g.values[iy * g.nx + ix] = f.value(g.node(ix, iy));
  }
  return g;
}

double laplacian_residual(const UniformGrid& w, const SourceField& f) {
  if (w.nx < 3 || w.ny < 3) fail(ErrorKind::Parameter, "laplacian_residual: grid needs interior nodes");
  const double h2 = w.spacing * w.spacing;
  double worst = 0.0;
  double scale = 0.0;
  for (int iy = 0; iy < w.ny; ++iy) {
    for (int ix = 0; ix < w.nx; ++ix) scale = std::max(scale, std::abs(f.density(w.node(ix, iy))));
  }
  if (scale == 0.0) {
    for (const auto& p : f.patches()) scale = std::max(scale, p.max_abs_density() * std::exp(-2.0 * p.log_scale()));
  }
  for (int iy = 1; iy + 1 < w.ny; ++iy) {
    for (int ix = 1; ix + 1 < w.nx; ++ix) {
      const auto at = [&](int dx, int dy) { return w.values[(iy + dy) * w.nx + ix + dx]; };
      const double lap = (at(1, 0) + at(-1, 0) + at(0, 1) + at(0, -1) - 4.0 * at(0, 0)) / h2;
      worst = std::max(worst, std::abs(lap + f.density(w.node(ix, iy))));
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace gcurv
