#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gausscurv/geometry.hpp"

namespace gcurv {

/// Plateau cutoff: 1 on [0, 1/2], 0 on [1, inf), smooth and non-increasing.
double eta0(double t);

/// Integral of eta0(|z|)^p over the unit disk (cached per p).
double eta0_disk_moment(double p = 1.0);

enum class CurvatureKind { RadialPower, ExactFamily, BumpSum, GridSampled };

const char* to_string(CurvatureKind kind);

/// One term of the multiscale sum, radius and amplitude held as logarithms.
struct BumpSpec {
  int index = 2;             // n >= 2
  Point2 center;             // a_n = (n, 0)
  double log_radius = 0.0;   // ln r_n = -n^q
  double log_amplitude = 0;  // ln(r_n^{-2} n^{-ell}) = 2 n^q - ell ln n

  double radius() const;
  // ln of amplitude * radius^2, i.e. -ell ln n.
  double log_mass_scale() const { return log_amplitude + 2.0 * log_radius; }
};

/// Rectangular tensor grid of curvature samples ("x y K" rows).
struct GridSamples {
  std::vector<double> xs;      // strictly increasing
  std::vector<double> ys;      // strictly increasing
  std::vector<double> values;  // values[iy * xs.size() + ix]
};

GridSamples read_grid_samples(const std::string& path);
GridSamples parse_grid_samples(const std::string& text);

/// Nonpositive curvature function K on the plane. Immutable; copies share state.
class CurvatureField {
 public:
  static CurvatureField radial_power(double amplitude, double ell);
  static CurvatureField exact_family(double alpha);
  static CurvatureField bump_sum(double ell, double q, int n_max);
  static CurvatureField grid_sampled(GridSamples samples);

  /// Same field multiplied by lambda > 0.
  CurvatureField scaled(double lambda) const;

  CurvatureKind kind() const;
  bool is_radial() const;

  /// K(x). Throws Domain for grid samples queried outside their rectangle.
  double operator()(Point2 x) const;
  /// K(x) with grid samples extended by zero outside their rectangle.
  double eval_extended(Point2 x) const;
  /// Radial profile K(r); Contract error if the field is not radial.
  double radial(double r) const;

  /// Bump evaluation in the local frame z = (x - a_n) / r_n.
  double eval_local(int slot, Point2 z) const;

  double amplitude() const;   // RadialPower amplitude (including scale)
  double ell() const;         // RadialPower, BumpSum
  double q() const;           // BumpSum
  double family_alpha() const;  // ExactFamily
  int n_max() const;          // BumpSum
  double log_scale() const;

  std::span<const BumpSpec> bumps() const;
  /// Bound on the neglected mass sum_{n > n_max} n^{-ell} M_1 of a truncated bump sum.
  double truncation_mass_bound() const;
  /// Slot of the bump whose support contains x, or -1.
  int bump_slot_containing(Point2 x) const;

  const GridSamples* grid() const;

  /// Short human-readable description, e.g. "radial_power(A=1, ell=4)".
  std::string describe() const;

  /// True when both fields were built from identical parameters.
  bool same_as(const CurvatureField& other) const;

 private:
  struct State;
  explicit CurvatureField(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;
};

/// Exact verification family: K = -2 alpha (1+|x|^2)^{-(2+alpha)} solved by
/// u = (alpha/2) ln(1+|x|^2).
struct ExactFamily {
  double alpha = 1.0;
  CurvatureField field;

  double reference(Point2 x) const;
  double reference_radial(double r) const;
  /// Total curvature of the reference solution, -2 alpha pi.
  double total_curvature() const;
};

ExactFamily make_exact_family(double alpha);
CurvatureField make_k0(double ell, double q, int n_max);

}  // namespace gcurv
