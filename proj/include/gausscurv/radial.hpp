#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gausscurv/curvature.hpp"

namespace gcurv {

/// Radial solution of u'' + u'/r + K(r) e^{2u} = 0, u(0) = c0, u'(0) = 0,
/// sampled on a uniform grid in ln r.
class RadialProfile {
 public:
  RadialProfile() = default;
  // flux_slopes: d(r u')/d ln r at the samples, for Hermite interpolation of the flux.
  RadialProfile(double c0, double r_start, std::vector<double> log_r, std::vector<double> u,
                std::vector<double> fluxes, std::vector<double> flux_slopes);

  double c0() const { return c0_; }
  double r_end() const;
  /// r u'(r) at r_end.
  double alpha_attained() const { return flux_.back(); }
  /// Aitken limit of r u'(r) from r_end/4, r_end/2, r_end.
  double alpha_limit() const { return alpha_limit_; }

  /// u(r), cubic Hermite in ln r; constant c0 below the series start.
  double operator()(double r) const;
  /// r u'(r).
  double flux(double r) const;

  std::span<const double> log_radii() const { return log_r_; }
  std::span<const double> values() const { return u_; }

 private:
  double c0_ = 0.0;
  double r_start_ = 0.0;
  std::vector<double> log_r_;
  std::vector<double> u_;
  std::vector<double> flux_;
  std::vector<double> flux_slope_;
  double alpha_limit_ = 0.0;
};

struct ShootOptions {
  double r_start = 1e-6;
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double log_step = 0.01;  // sampling step in ln r
};

/// Radial profile K(r) <= 0.
using RadialCurvature = std::function<double(double)>;

RadialProfile radial_shoot(const RadialCurvature& k, double c0, double r_end, const ShootOptions& opts = {});
RadialProfile radial_shoot(const CurvatureField& k, double c0, double r_end, const ShootOptions& opts = {});

struct RadialTarget {
  double tol = 1e-9;
  double r_end = 1e5;
  double c_lo = -50.0;
  double c_hi = 50.0;
  ShootOptions shoot;
};

/// Bisection on c0 so that the limit of r u'(r) equals alpha_target.
RadialProfile radial_solve_for_alpha(const CurvatureField& k, double alpha_target, const RadialTarget& opts = {});

}  // namespace gcurv
