#include "gausscurv/asymptotics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "gausscurv/error.hpp"

namespace gcurv {

namespace {

// Solves the 3x3 system a x = b by Gaussian elimination with partial pivoting.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b) {
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    if (a[col][col] == 0.0) fail(ErrorKind::Parameter, "fit_log_growth: radii do not determine the fit");
    for (int r = col + 1; r < 3; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::array<double, 3> x{};
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < 3; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

double angle_of(int k, int angles) { return kTwoPi * (k + 0.5) / angles; }

}  // namespace

GrowthFit fit_log_growth(const PlaneFunction& u, std::span<const double> radii, int angles, double anisotropy_bound) {
  if (radii.size() < 4) fail(ErrorKind::Parameter, "fit_log_growth: need at least 4 radii");
  if (angles < 1) fail(ErrorKind::Parameter, "fit_log_growth: need at least one angle");
  const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
  if (!(*lo > 0.0) || !(*hi >= 100.0 * *lo * (1.0 - 1e-12))) {
    fail(ErrorKind::Parameter, "fit_log_growth: radii must be positive and span at least two decades");
  }
  GrowthFit fit;
  fit.radii.assign(radii.begin(), radii.end());
  for (double r : radii) {
    double sum = 0.0, mn = INFINITY, mx = -INFINITY;
    for (int k = 0; k < angles; ++k) {
      const double v = u(polar(r, angle_of(k, angles)));
      sum += v;
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    const double mean = sum / angles;
    fit.means.push_back(mean);
    fit.max_angular_deviation = std::max({fit.max_angular_deviation, mx - mean, mean - mn});
  }
  // Normal equations for the basis {ln r, 1, 1/r}.
  std::array<std::array<double, 3>, 3> ata{};
  std::array<double, 3> atb{};
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const std::array<double, 3> row{std::log(radii[i]), 1.0, 1.0 / radii[i]};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) ata[a][b] += row[a] * row[b];
      atb[a] += row[a] * fit.means[i];
    }
  }
  const auto x = solve3(ata, atb);
  fit.alpha = x[0];
  fit.c = x[1];
  fit.d = x[2];
  double ss = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = fit.means[i] - (fit.alpha * std::log(radii[i]) + fit.c + fit.d / radii[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / radii.size());
  fit.c_delta = fit.max_angular_deviation;
  fit.alpha_delta = 2.0 * fit.max_angular_deviation / std::log(*hi / *lo);
  fit.anisotropic = fit.max_angular_deviation > anisotropy_bound;
  return fit;
}

DecayFit remainder_decay_exponent(const PlaneFunction& u, double alpha, double c, std::span<const double> radii,
                                  double beta, int angles, double floor) {
  if (radii.size() < 2) fail(ErrorKind::Parameter, "remainder_decay_exponent: need at least 2 radii");
  if (!(beta > 0.0)) fail(ErrorKind::Parameter, "remainder_decay_exponent: beta must be positive");
  DecayFit out;
  out.beta = beta;
  out.target = 2.0 * beta / (1.0 + 2.0 * beta);
  out.radii.assign(radii.begin(), radii.end());
  std::vector<double> xs, ys;
  for (double r : radii) {
    if (!(r > 0.0)) fail(ErrorKind::Parameter, "remainder_decay_exponent: radii must be positive");
    double worst = 0.0;
    for (int k = 0; k < angles; ++k) {
      worst = std::max(worst, std::abs(u(polar(r, angle_of(k, angles))) - alpha * std::log(r) - c));
    }
    out.remainders.push_back(worst);
    if (worst > floor) {
      xs.push_back(std::log(r));
      ys.push_back(std::log(worst));
    }
  }
  if (xs.size() < 2) {
    out.floor = true;
    return out;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  out.gamma = -sxy / sxx;
  return out;
}

std::vector<AnisotropySample> anisotropy_probe(const SolutionField& u, int n_min, int n_max) {
  if (!u.info().converged) fail(ErrorKind::Contract, "anisotropy_probe: solution is not converged");
  if (n_min < 2 || n_max < n_min) fail(ErrorKind::Parameter, "anisotropy_probe: need 2 <= n_min <= n_max");
  const CurvatureField& k = u.curvature();
  const bool bumps = k.kind() == CurvatureKind::BumpSum;
  if (bumps && n_max > k.n_max()) {
    fail(ErrorKind::Parameter, "anisotropy_probe: n_max exceeds the bumps resolved by the solution");
  }
  std::vector<AnisotropySample> out;
  for (int n = n_min; n <= n_max; ++n) {
    AnisotropySample s;
    s.n = n;
    if (bumps) {
      const int slot = n - 2;
      s.xi_plus = u.t() + u.v_local(slot, {0.0, 0.0});
      const PolarPatch& patch = u.source().patch(u.bump_patch(slot));
      s.self_term = -patch.mass() * patch.log_scale() / kTwoPi;
    } else {
      s.xi_plus = u.xi({static_cast<double>(n), 0.0});
    }
    s.xi_minus = u.xi({-static_cast<double>(n), 0.0});
    s.gap = s.xi_plus - s.xi_minus;
    out.push_back(s);
  }
  return out;
}

GrowthModel growth_probe(const CurvatureField& k, double alpha, int n_min, int n_max) {
  if (k.kind() != CurvatureKind::BumpSum) fail(ErrorKind::Contract, "growth_probe: curvature has no bumps");
  const double alpha_star = 0.5 * (k.ell() - k.q());
  if (!(alpha > alpha_star)) {
    fail(ErrorKind::Parameter, "growth_probe: alpha must exceed alpha_* = (ell - q)/2 = " + std::to_string(alpha_star));
  }
  if (n_min < 2 || n_max <= n_min) fail(ErrorKind::Parameter, "growth_probe: need 2 <= n_min < n_max");
  GrowthModel m;
  m.exponent = 2.0 * alpha - k.ell() + k.q();
  m.low_confidence = m.exponent < 0.2;
  const double log_c = std::log(eta0_disk_moment(1.0) / kTwoPi) + k.log_scale();
  for (int n = n_min; n <= n_max; ++n) {
    const double ln_n = std::log(static_cast<double>(n));
    GrowthSample s;
    s.n = n;
    // n^{-ell} n^{2 alpha} ln(1/r_n), with ln(1/r_n) = n^q.
    s.log_self = log_c + (2.0 * alpha - k.ell()) * ln_n + k.q() * ln_n;
    s.model_ratio = std::exp(s.log_self) / ln_n;
    m.samples.push_back(s);
  }
  m.increasing = true;
  for (std::size_t i = 1; i < m.samples.size(); ++i) {
    if (!(m.samples[i].model_ratio > m.samples[i - 1].model_ratio)) m.increasing = false;
  }
  return m;
}

std::vector<SolutionGrowth> solution_growth(const SolutionField& u, int n_min, int n_max) {
  const auto gaps = anisotropy_probe(u, n_min, n_max);
  std::vector<SolutionGrowth> out;
  for (const auto& g : gaps) {
    const double ln_n = std::log(static_cast<double>(g.n));
    out.push_back({g.n, g.xi_plus, std::abs(g.xi_plus) / ln_n});
  }
  return out;
}

LayerReport layer_check(const SolutionField& lo, const SolutionField& hi, std::span<const Point2> samples) {
  if (!lo.curvature().same_as(hi.curvature())) {
    fail(ErrorKind::Contract, "layer_check: solutions were computed for different curvatures");
  }
  if (samples.empty()) fail(ErrorKind::Parameter, "layer_check: no samples");
  LayerReport r;
  r.min_margin = INFINITY;
  for (const Point2 x : samples) r.min_margin = std::min(r.min_margin, hi.u(x) - lo.u(x));
  r.ordered = r.min_margin > 0.0;
  return r;
}

Verdict classify(const VerdictInput& in, const VerdictThresholds& th) {
  Verdict v;
  const double eps = 1e-12;
  if (in.alpha < in.alpha_star - eps) {
    v.expected = "uniform";
  } else if (in.alpha <= in.alpha_star + eps) {
    v.expected = "anisotropic-bounded";
  } else {
    v.expected = "unbounded";
  }
  if (!in.gaps.empty()) {
    v.uniform_small = std::abs(in.gaps.back()) <= th.gap_small;
    v.uniform_decreasing = true;
    v.gaps_above_floor = true;
    for (std::size_t i = 0; i < in.gaps.size(); ++i) {
      if (std::abs(in.gaps[i]) < th.gap_floor) v.gaps_above_floor = false;
      if (i > 0 && !(std::abs(in.gaps[i]) < std::abs(in.gaps[i - 1]))) v.uniform_decreasing = false;
    }
  }
  v.alpha_stable = std::abs(in.alpha_hat - in.alpha) <= th.alpha_fit_tol;
  if (in.ratios.size() >= 2) {
    v.ratios_increasing = true;
    for (std::size_t i = 1; i < in.ratios.size(); ++i) {
      if (!(in.ratios[i] > in.ratios[i - 1] + th.ratio_step)) v.ratios_increasing = false;
    }
  }
  if (v.ratios_increasing) {
    v.tag = "unbounded";
  } else if (v.uniform_small && v.uniform_decreasing) {
    v.tag = "uniform";
  } else if (v.gaps_above_floor && v.alpha_stable) {
    v.tag = "anisotropic-bounded";
  } else {
    v.tag = "inconclusive";
  }
  return v;
}

}  // namespace gcurv
