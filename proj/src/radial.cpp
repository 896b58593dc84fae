#include "gausscurv/radial.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "gausscurv/alphap.hpp"
#include "gausscurv/error.hpp"

namespace gcurv {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::array<double, 2>;  // u, p = r u'

// Values beyond this are treated as blow-up.
constexpr double kBlowUp = 200.0;

struct BlowUp {
  double log_r;
};

double aitken(double a, double b, double c) {
  const double d1 = b - a, d2 = c - b;
  const double denom = d2 - d1;
  if (denom == 0.0 || !std::isfinite(denom) || std::abs(d2) >= std::abs(d1)) return c;
  return c - d2 * d2 / denom;
}

}  // namespace

RadialProfile::RadialProfile(double c0, double r_start, std::vector<double> log_r, std::vector<double> u,
                             std::vector<double> fluxes, std::vector<double> flux_slopes)
    : c0_(c0),
      r_start_(r_start),
      log_r_(std::move(log_r)),
      u_(std::move(u)),
      flux_(std::move(fluxes)),
      flux_slope_(std::move(flux_slopes)) {
  const double end = log_r_.back();
  const double f1 = flux(std::exp(end - 2.0 * std::log(2.0)));
  const double f2 = flux(std::exp(end - std::log(2.0)));
  alpha_limit_ = aitken(f1, f2, flux_.back());
}

double RadialProfile::r_end() const { return std::exp(log_r_.back()); }

namespace {

double hermite(double s, double h, double y0, double d0, double y1, double d1) {
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

// Locates the sample interval of t and returns its index and fraction.
std::pair<std::size_t, double> locate(std::span<const double> ts, double t) {
  if (t <= ts.front()) return {0, 0.0};
  if (t >= ts.back()) return {ts.size() - 2, 1.0};
  const double h = ts[1] - ts[0];
  std::size_t i = std::min(static_cast<std::size_t>((t - ts.front()) / h), ts.size() - 2);
  return {i, (t - ts[i]) / (ts[i + 1] - ts[i])};
}

}  // namespace

double RadialProfile::operator()(double r) const {
  if (!(r > r_start_)) return c0_ + (u_.front() - c0_) * (r * r) / (r_start_ * r_start_);
  const double t = std::log(r);
  if (t > log_r_.back() + 1e-12) fail(ErrorKind::Domain, "radial profile evaluated beyond r_end");
  auto [i, s] = locate(log_r_, t);
  // Cubic Hermite with du/dt = r u' = flux.
  return hermite(s, log_r_[i + 1] - log_r_[i], u_[i], flux_[i], u_[i + 1], flux_[i + 1]);
}

double RadialProfile::flux(double r) const {
  if (!(r > r_start_)) return 0.0;
  const double t = std::log(r);
  auto [i, s] = locate(log_r_, t);
  return hermite(s, log_r_[i + 1] - log_r_[i], flux_[i], flux_slope_[i], flux_[i + 1], flux_slope_[i + 1]);
}

RadialProfile radial_shoot(const RadialCurvature& k, double c0, double r_end, const ShootOptions& opts) {
  if (!std::isfinite(c0)) fail(ErrorKind::Parameter, "radial_shoot: c0 must be finite");
  if (!(r_end > 4.0 * opts.r_start)) fail(ErrorKind::Parameter, "radial_shoot: r_end must exceed the series start");
  // Series start: u = c0 - K(0) e^{2 c0} r^2 / 4.
  const double k0 = k(0.0);
  const double r0 = opts.r_start;
  State x{c0 - 0.25 * k0 * std::exp(2.0 * c0) * r0 * r0, -0.5 * k0 * std::exp(2.0 * c0) * r0 * r0};

  // In t = ln r: u_t = p, p_t = -r^2 K(r) e^{2u}.
  auto rhs = [&](const State& s, State& ds, double t) {
    const double r = std::exp(t);
    if (s[0] > kBlowUp) throw BlowUp{t};
    ds[0] = s[1];
    ds[1] = -r * r * k(r) * std::exp(2.0 * s[0]);
  };

  const double t0 = std::log(r0), t1 = std::log(r_end);
  const int steps = std::max(4, static_cast<int>(std::ceil((t1 - t0) / opts.log_step)));
  std::vector<double> times(steps + 1);
  for (int i = 0; i <= steps; ++i) times[i] = t0 + (t1 - t0) * i / steps;
  times.back() = t1;

  std::vector<double> log_r, u, flux, slope;
  log_r.reserve(times.size());
  auto observer = [&](const State& s, double t) {
    const double r = std::exp(t);
    log_r.push_back(t);
    u.push_back(s[0]);
    flux.push_back(s[1]);
    slope.push_back(-r * r * k(r) * std::exp(2.0 * s[0]));
  };
  auto stepper = odeint::make_dense_output(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), (t1 - t0) / steps, observer);
  } catch (const BlowUp& b) {
    std::ostringstream msg;
    msg << "radial_shoot: solution blows up near r = " << std::exp(b.log_r) << " for c0 = " << c0;
    fail(ErrorKind::Integration, msg.str());
  } catch (const odeint::step_adjustment_error& e) {
    fail(ErrorKind::Integration, std::string("radial_shoot: step size underflow: ") + e.what());
  }
  for (double v : u) {
    if (!std::isfinite(v)) fail(ErrorKind::Integration, "radial_shoot: non-finite solution value");
  }
  return RadialProfile(c0, r0, std::move(log_r), std::move(u), std::move(flux), std::move(slope));
}

RadialProfile radial_shoot(const CurvatureField& k, double c0, double r_end, const ShootOptions& opts) {
  if (!k.is_radial()) fail(ErrorKind::Contract, "radial_shoot: curvature " + k.describe() + " is not radial");
  return radial_shoot([&](double r) { return k.radial(r); }, c0, r_end, opts);
}

RadialProfile radial_solve_for_alpha(const CurvatureField& k, double alpha_target, const RadialTarget& opts) {
  if (!k.is_radial()) fail(ErrorKind::Contract, "radial_solve_for_alpha: curvature " + k.describe() + " is not radial");
  if (!(alpha_target > 0.0)) fail(ErrorKind::Parameter, "radial_solve_for_alpha: alpha_target must be positive");
  const double a1 = alpha1_estimate(k);
  if (!(alpha_target < a1)) {
    std::ostringstream msg;
    msg << "radial_solve_for_alpha: alpha_target = " << alpha_target << " is not below the estimated alpha_1 = " << a1;
    fail(ErrorKind::Parameter, msg.str());
  }
  // Attained alpha is increasing in c0; a blow-up counts as overshooting.
  auto attained = [&](double c0, RadialProfile* keep) {
    try {
      RadialProfile p = radial_shoot(k, c0, opts.r_end, opts.shoot);
      const double a = p.alpha_limit();
      if (keep) *keep = std::move(p);
      return a;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Integration) return std::numeric_limits<double>::infinity();
      throw;
    }
  };
  double lo = opts.c_lo, hi = opts.c_hi;
  if (attained(lo, nullptr) > alpha_target || attained(hi, nullptr) < alpha_target) {
    std::ostringstream msg;
    msg << "radial_solve_for_alpha: no c0 in [" << lo << ", " << hi << "] attains alpha = " << alpha_target;
    fail(ErrorKind::Range, msg.str());
  }
  RadialProfile best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    RadialProfile p;
    const double a = attained(mid, &p);
    if (std::isfinite(a) && std::abs(a - alpha_target) < best_gap) {
      best_gap = std::abs(a - alpha_target);
      best = std::move(p);
    }
    if (best_gap <= opts.tol) return best;
    if (a < alpha_target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  std::ostringstream msg;
  msg << "radial_solve_for_alpha: bisection stalled " << best_gap << " away from alpha = " << alpha_target;
  fail(ErrorKind::Range, msg.str());
}

}  // namespace gcurv
