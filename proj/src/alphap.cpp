#include "gausscurv/alphap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "gausscurv/error.hpp"
#include "gausscurv/parallel.hpp"
#include "gausscurv/quadrature.hpp"

namespace gcurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double weight_exponent(double p, double alpha) { return 2.0 * alpha * p + 2.0 * (p - 1.0); }

// Adaptive composite Gauss-Legendre on [a, b] with geometric pieces.
template <class F>
double radial_integral(F&& f, double a, double b, double rel_tol) {
  const GaussRule& rule = gauss_legendre(20);
  auto composite = [&](int per_octave) {
    std::vector<double> breaks{a};
    double lo = a;
    if (lo == 0.0) {
      lo = std::min(b, 1.0);
      breaks.push_back(lo);
    }
    const double octaves = std::log2(b / lo);
    const int pieces = std::max(1, static_cast<int>(std::ceil(octaves * per_octave)));
    for (int i = 1; i <= pieces; ++i) breaks.push_back(lo * std::exp2(octaves * i / pieces));
    breaks.back() = b;
    double sum = 0.0;
    for (std::size_t i = 1; i < breaks.size(); ++i) {
      if (breaks[i] > breaks[i - 1]) sum += integrate(rule, breaks[i - 1], breaks[i], f);
    }
    return sum;
  };
  double prev = composite(1);
  for (int level = 2; level <= 32; level *= 2) {
    const double next = composite(level);
    if (std::abs(next - prev) <= rel_tol * std::abs(next) || next == prev) return next;
    prev = next;
  }
  const double last = composite(64);
  if (std::abs(last - prev) <= rel_tol * std::abs(last)) return last;
  std::ostringstream msg;
  msg.precision(17);
  msg << "annular_moment: quadrature did not settle on [" << a << ", " << b << "]; last two values " << prev
      << " and " << last;
  fail(ErrorKind::NumericTolerance, msg.str());
}

// Integral over the unit disk of eta0(|z|)^p (1 + |a_n + r_n z|)^w restricted to
// r_lo <= |a_n + r_n z| < r_hi, with a_n = (n, 0).
double clipped_bump_integral(double n, double log_radius, double p, double w, double r_lo, double r_hi) {
  const double rn = std::exp(log_radius);
  const GaussRule& rho_rule = gauss_legendre(16);
  const GaussRule& phi_rule = gauss_legendre(16);
  const double lo2 = (r_lo - n) * (r_lo + n);
  const double hi2 = std::isinf(r_hi) ? kInf : (r_hi - n) * (r_hi + n);
  double total = 0.0;
  for (auto [a, b] : {std::pair{0.0, 0.5}, std::pair{0.5, 1.0}}) {
    total += integrate(rho_rule, a, b, [&](double rho) {
      const double e = std::pow(eta0(rho), p);
      if (e == 0.0) return 0.0;
      // |x|^2 - n^2 = 2 n r_n rho cos(phi) + r_n^2 rho^2
      const double lin = 2.0 * n * rn * rho;
      const double quad = rn * rn * rho * rho;
      const double c_lo = (lo2 - quad) / lin;
      const double c_hi = std::isinf(hi2) ? kInf : (hi2 - quad) / lin;
      const double phi_a = std::acos(std::clamp(c_hi, -1.0, 1.0));
      const double phi_b = std::acos(std::clamp(c_lo, -1.0, 1.0));
      if (!(phi_b > phi_a)) return 0.0;
      const double arc = integrate(phi_rule, phi_a, phi_b, [&](double phi) {
        const double r = std::sqrt(n * n + lin * std::cos(phi) + quad);
        return std::pow(1.0 + r, w);
      });
      return 2.0 * rho * e * arc;
    });
  }
  return total;
}

double grid_annular_moment(const CurvatureField& k, double p, double w, double r_lo, double r_hi) {
  const GridSamples& g = *k.grid();
  double reach = 0.0;
  for (double x : {g.xs.front(), g.xs.back()}) {
    for (double y : {g.ys.front(), g.ys.back()}) reach = std::max(reach, std::hypot(x, y));
  }
  const double hi = std::min(r_hi, reach);
  if (!(hi > r_lo)) return 0.0;
  auto at = [&](int angles, int order) {
    const GaussRule& rule = gauss_legendre(order);
    const int pieces = std::max(4, static_cast<int>(std::ceil((hi - r_lo) / std::max(0.05, 0.05 * r_lo))));
    double sum = 0.0;
    for (int piece = 0; piece < pieces; ++piece) {
      const double a = r_lo + (hi - r_lo) * piece / pieces;
      const double b = r_lo + (hi - r_lo) * (piece + 1) / pieces;
      sum += integrate(rule, a, b, [&](double r) {
        double ring = 0.0;
        for (int j = 0; j < angles; ++j) {
          const double v = k.eval_extended(polar(r, kTwoPi * (j + 0.5) / angles));
          if (v != 0.0) ring += std::pow(-v, p);
        }
        return r * std::pow(1.0 + r, w) * ring * kTwoPi / angles;
      });
    }
    return sum;
  };
  double prev = at(128, 6);
  for (int level = 1; level <= 3; ++level) {
    const double next = at(128 << level, 6 + 2 * level);
    if (std::abs(next - prev) <= 1e-3 * std::abs(next) || next == prev) return next;
    prev = next;
  }
  return prev;
}

double log_sum_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

struct Fit {
  double slope = 0.0;
  double residual = 0.0;
};

// Least-squares slope of y over k for finite y; -inf when the tail vanishes.
Fit fit_slope(const std::vector<double>& ks, const std::vector<double>& ys) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (std::isfinite(ys[i])) {
      x.push_back(ks[i]);
      y.push_back(ys[i]);
    }
  }
  if (!ys.empty() && ys.back() == kInf) return {kInf, 0.0};
  if (!ys.empty() && ys.back() == -kInf) return {-kInf, 0.0};
  if (x.size() < 2) return {-kInf, 0.0};
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Fit f;
  f.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - my - f.slope * (x[i] - mx);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

}  // namespace

ExtendedReal ExtendedReal::plus_inf() { return {Tag::PlusInf, kInf}; }
ExtendedReal ExtendedReal::minus_inf() { return {Tag::MinusInf, -kInf}; }

double ExtendedReal::as_double() const {
  switch (tag) {
    case Tag::PlusInf: return kInf;
    case Tag::MinusInf: return -kInf;
    default: return value;
  }
}

std::string ExtendedReal::to_string() const {
  switch (tag) {
    case Tag::PlusInf: return "+inf";
    case Tag::MinusInf: return "-inf";
    default: return shortest(value);
  }
}

double annular_moment(const CurvatureField& k, double p, double alpha, double r_lo, double r_hi) {
  if (!(p >= 1.0)) fail(ErrorKind::Parameter, "annular_moment: p must be at least 1");
  if (!(r_lo >= 0.0) || !(r_hi > r_lo)) fail(ErrorKind::Parameter, "annular_moment: need 0 <= r_lo < r_hi");
  const double w = weight_exponent(p, alpha);
  switch (k.kind()) {
    case CurvatureKind::RadialPower:
    case CurvatureKind::ExactFamily:
      return kTwoPi * radial_integral(
                          [&](double r) { return r * std::pow(-k.radial(r), p) * std::pow(1.0 + r, w); }, r_lo,
                          r_hi, 1e-11);
    case CurvatureKind::BumpSum: {
      double total = 0.0;
      const double log_scale = k.log_scale();
      for (const BumpSpec& b : k.bumps()) {
        const double n = b.center.x;
        const double rn = b.radius();
        if (n + rn < r_lo || n - rn >= r_hi) continue;
        const double local = clipped_bump_integral(n, b.log_radius, p, w, r_lo, r_hi);
        if (local == 0.0) continue;
        total += std::exp(p * (b.log_amplitude + log_scale) + 2.0 * b.log_radius) * local;
      }
      return total;
    }
    case CurvatureKind::GridSampled:
      return grid_annular_moment(k, p, w, r_lo, r_hi);
  }
  return 0.0;
}

double bump_series_log2_term(const CurvatureField& k, double p, double alpha, int n) {
  if (k.kind() != CurvatureKind::BumpSum) fail(ErrorKind::Contract, "bump series requested for a field without bumps");
  const double w = weight_exponent(p, alpha);
  const double nn = static_cast<double>(n);
  const double log_radius = -std::pow(nn, k.q());
  double log_local;
  if (std::exp(log_radius) < 1e-12 * nn) {
    // Weight constant across the support: M_p (1+n)^w.
    log_local = std::log(eta0_disk_moment(p)) + w * std::log1p(nn);
  } else {
    log_local = std::log(clipped_bump_integral(nn, log_radius, p, w, 0.0, kInf));
  }
  // p (ln amplitude) + 2 ln r_n with the n^q terms combined first; they cancel at p = 1.
  const double log_term = p * (k.log_scale() - k.ell() * std::log(nn)) + (2.0 - 2.0 * p) * log_radius + log_local;
  return log_term / std::log(2.0);
}

SlopeSample tail_slope(const CurvatureField& k, double p, double alpha, const AlphaPOptions& opts,
                       std::vector<AnnulusMoment>* annuli) {
  std::vector<double> ks, ys;
  std::vector<AnnulusMoment> rows;
  if (k.kind() == CurvatureKind::BumpSum) {
    // Dyadic blocks of the bump index, n in [2^j, 2^{j+1}).
    for (int j = 1; j <= opts.k_max; ++j) {
      double acc = -kInf;
      for (int n = 1 << j; n < (2 << j); ++n) {
        acc = log_sum_exp(acc, bump_series_log2_term(k, p, alpha, n) * std::log(2.0));
      }
      const double log2m = acc / std::log(2.0);
      rows.push_back({std::exp2(j), std::exp2(j + 1), log2m});
      if (j >= opts.fit_k_min) {
        ks.push_back(j);
        ys.push_back(log2m);
      }
    }
  } else {
    for (int j = 0; j <= opts.k_max; ++j) {
      const double m = annular_moment(k, p, alpha, std::exp2(j), std::exp2(j + 1));
      const double log2m = m > 0.0 ? std::log2(m) : -kInf;
      rows.push_back({std::exp2(j), std::exp2(j + 1), log2m});
      if (j >= opts.fit_k_min) {
        ks.push_back(j);
        ys.push_back(log2m);
      }
    }
  }
  const Fit fit = fit_slope(ks, ys);
  if (annuli) *annuli = std::move(rows);
  SlopeSample s;
  s.alpha = alpha;
  s.slope = fit.slope;
  s.residual = fit.residual;
  s.inconclusive = std::abs(fit.slope) < 0.1;
  return s;
}

AlphaPEstimate estimate_alpha_p(const CurvatureField& k, double p, const AlphaPOptions& opts) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorKind::Parameter, "estimate_alpha_p: p must be a finite value >= 1");
  if (!(opts.alpha_step > 0.0) || !(opts.alpha_max > opts.alpha_min)) {
    fail(ErrorKind::Parameter, "estimate_alpha_p: alpha grid must be strictly increasing");
  }
  if (opts.k_max - opts.fit_k_min + 1 < 2 || opts.fit_k_min < 0) {
    fail(ErrorKind::Parameter, "estimate_alpha_p: need at least two dyadic annuli in the fit window");
  }
  if (k.kind() != CurvatureKind::BumpSum && opts.k_max < 5) {
    fail(ErrorKind::Parameter, "estimate_alpha_p: at least 6 dyadic annuli must fit in [1, R_max]");
  }
  if (!(opts.bisect_tol > 0.0)) fail(ErrorKind::Parameter, "estimate_alpha_p: bisect_tol must be positive");

  std::vector<double> grid;
  const int count = static_cast<int>(std::floor((opts.alpha_max - opts.alpha_min) / opts.alpha_step + 1e-9)) + 1;
  for (int i = 0; i < count; ++i) grid.push_back(opts.alpha_min + i * opts.alpha_step);

  AlphaPEstimate out;
  out.p = p;
  out.method = k.kind() == CurvatureKind::BumpSum ? "bump-series" : "dyadic-annuli";
  out.slopes.resize(grid.size());
  parallel_for(static_cast<int>(grid.size()), opts.threads,
               [&](int i) { out.slopes[i] = tail_slope(k, p, grid[i], opts); });

  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double a = out.slopes[i - 1].slope, b = out.slopes[i].slope;
    if (std::isfinite(a) && std::isfinite(b) && b < a - opts.monotone_tol) {
      std::ostringstream msg;
      msg << "estimate_alpha_p: fitted tail exponent decreases from " << shortest(a) << " at alpha = "
          << shortest(grid[i - 1]) << " to " << shortest(b) << " at alpha = " << shortest(grid[i]);
      fail(ErrorKind::IllConditionedTail, msg.str());
    }
    if (a == kInf && b != kInf) {
      fail(ErrorKind::IllConditionedTail, "estimate_alpha_p: tail moments diverge then settle as alpha grows");
    }
  }

  int crossing = -1;
  bool all_negative = true, all_positive = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = out.slopes[i].slope;
    if (s >= 0.0) all_negative = false;
    if (s < 0.0) all_positive = false;
    if (crossing < 0 && i + 1 < grid.size() && s < 0.0 && out.slopes[i + 1].slope >= 0.0) {
      crossing = static_cast<int>(i);
    }
  }
  const bool near_boundary = std::any_of(out.slopes.begin(), out.slopes.end(),
                                         [](const SlopeSample& s) { return s.inconclusive; });

  if (all_negative) {
    out.estimate = ExtendedReal::plus_inf();
    out.reference_alpha = grid.back();
    out.boundary_inconclusive = near_boundary;
  } else if (all_positive || crossing < 0) {
    out.estimate = ExtendedReal::minus_inf();
    out.reference_alpha = grid.front();
    out.boundary_inconclusive = near_boundary;
  } else {
    double lo = grid[crossing], hi = grid[crossing + 1];
    while (hi - lo > opts.bisect_tol) {
      const double mid = 0.5 * (lo + hi);
      if (tail_slope(k, p, mid, opts).slope < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    out.estimate = ExtendedReal::finite(0.5 * (lo + hi));
    out.reference_alpha = out.estimate.value;
  }
  const SlopeSample ref = tail_slope(k, p, out.reference_alpha, opts, &out.annuli);
  out.tail_exponent = ref.slope;
  out.fit_residual = ref.residual;
  return out;
}

double alpha1_estimate(const CurvatureField& k, int threads) {
  AlphaPOptions opts;
  opts.threads = threads;
  return estimate_alpha_p(k, 1.0, opts).estimate.as_double();
}

}  // namespace gcurv
