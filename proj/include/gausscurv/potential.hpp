#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "gausscurv/geometry.hpp"

namespace gcurv {

/// Polar coordinates in a patch frame with the radius held as a logarithm
/// (log_radius = -inf at the patch center).
struct LocalPoint {
  double log_radius = -std::numeric_limits<double>::infinity();
  double angle = 0.0;

  double radius() const;
  static LocalPoint from_cartesian(Point2 z);
};

/// Piecewise Gauss-Legendre radial grid: `order` nodes on each panel between
/// consecutive breaks.
class RadialGrid {
 public:
  RadialGrid() = default;
  RadialGrid(std::vector<double> breaks, int order);

  /// Panels [0, 0.5], [0.5, 1], then geometric panels of ratio <= `ratio` up to r_max.
  static RadialGrid background(double r_max, double ratio, int order);
  /// Unit-disk grid for bump frames, refined on the cutoff transition [1/2, 1].
  static RadialGrid unit_disk(int radii);

  int order() const { return order_; }
  int panels() const { return static_cast<int>(breaks_.size()) - 1; }
  int size() const { return static_cast<int>(nodes_.size()); }
  double node(int i) const { return nodes_[i]; }
  double weight(int i) const { return weights_[i]; }
  double lo(int panel) const { return breaks_[panel]; }
  double hi(int panel) const { return breaks_[panel + 1]; }
  double outer() const { return breaks_.back(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> breaks() const { return breaks_; }
  /// Panel index containing rho, or -1 when rho is outside [0, outer].
  int panel_containing(double rho) const;

 private:
  std::vector<double> breaks_;
  int order_ = 0;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Density sampled on a polar grid about `center`, in a frame scaled by
/// e^{log_scale}. Densities are local mass densities: mass per unit area of
/// the local coordinate z = (x - center) e^{-log_scale}. The logarithmic
/// potential is evaluated mode by mode in angle with the radial kernel
/// integrated exactly across the target radius.
class PolarPatch {
 public:
  PolarPatch(Point2 center, double log_scale, RadialGrid grid, int angles,
             std::vector<double> density, bool power_tail = false);

  static PolarPatch from_function(Point2 center, double log_scale, RadialGrid grid, int angles,
                                  const std::function<double(Point2)>& local_density,
                                  bool power_tail = false);
  static PolarPatch from_radial(Point2 center, double log_scale, RadialGrid grid,
                                const std::function<double(double)>& local_density,
                                bool power_tail = false);

  Point2 center() const { return center_; }
  double log_scale() const { return log_scale_; }
  const RadialGrid& grid() const { return grid_; }
  int angles() const { return angles_; }
  double angle(int k) const;
  Point2 node_local(int i, int k) const;
  std::span<const double> density() const { return density_; }

  /// Local mass including an analytic power-law tail beyond the outer break.
  double mass() const { return mass_; }
  double abs_mass() const { return abs_mass_; }
  double max_abs_density() const { return max_abs_; }
  bool is_radial(double rel_tol = 1e-12) const;
  bool has_tail() const { return tail_active_; }
  double tail_exponent() const { return tail_exponent_; }
  double tail_mass() const;

  LocalPoint to_local(Point2 x) const;
  /// Local coordinates of the point `origin_center + e^{origin_log_scale} z`
  /// without forming the global point first.
  LocalPoint to_local_from(Point2 origin_center, double origin_log_scale, Point2 z) const;

  /// Interpolated local density; zero outside the grid (tail density beyond).
  double density_at(LocalPoint p) const;

  /// J(xi) = integral of density(z) ln|xi - z| dz over the local frame.
  double log_integral(LocalPoint p, int sub_order = 0) const;
  /// Logarithmic potential -(1/2pi) integral ln|x - y| f(y) dy at the target.
  double potential(LocalPoint p, int sub_order = 0) const;
  /// Potential at every grid node, indexed i * angles + k.
  std::vector<double> self_potential(int threads = 1) const;

  /// Magnitude of the highest active angular mode at the target (spectral bound).
  double spectral_tail(LocalPoint p) const;
  /// Contribution of the analytic power-law tail to the potential at the target.
  double tail_potential(LocalPoint p) const;

 private:
  void radial_modes(double log_r, int sub_order, std::span<double> cos_part,
                    std::span<double> sin_part, double& mode0) const;
  double tail_mode0(double log_r) const;
  double synthesize(double mode0, std::span<const double> cos_part,
                    std::span<const double> sin_part, double angle) const;

  Point2 center_;
  double log_scale_;
  RadialGrid grid_;
  int angles_;
  std::vector<double> density_;

  int modes_ = 0;                 // highest angular mode index
  std::vector<int> active_;       // active modes m >= 1
  std::vector<double> c0_;        // angular mean per radius
  std::vector<double> cm_, sm_;   // [m * nr + i], m = 1..modes_
  std::vector<double> mass0_;     // per panel: int rho c0
  std::vector<double> logmom0_;   // per panel: int rho c0 ln rho
  std::vector<double> below_c_, below_s_;  // per panel & mode: int rho (rho/b)^m c_m
  std::vector<double> above_c_, above_s_;  // per panel & mode: int rho (a/rho)^m c_m

  bool tail_active_ = false;
  double tail_coeff_ = 0.0;
  double tail_exponent_ = 0.0;

  double mass_ = 0.0;
  double abs_mass_ = 0.0;
  double max_abs_ = 0.0;
};

struct PotentialEvaluation {
  Point2 target;
  double value = 0.0;
  double error_bound = 0.0;
};

/// Sum of polar patches: a smooth background part plus bump parts in local frames.
class SourceField {
 public:
  SourceField() = default;
  explicit SourceField(std::vector<PolarPatch> patches) : patches_(std::move(patches)) {}

  void add_patch(PolarPatch patch) { patches_.push_back(std::move(patch)); }
  std::span<const PolarPatch> patches() const { return patches_; }
  const PolarPatch& patch(int i) const { return patches_[i]; }
  int size() const { return static_cast<int>(patches_.size()); }

  /// Neglected mass (e.g. truncated bumps) propagated into error bounds.
  void set_truncation(double mass_bound, double extent) {
    truncation_mass_ = mass_bound;
    truncation_extent_ = extent;
  }
  double truncation_mass() const { return truncation_mass_; }

  double total_integral() const;
  double abs_integral() const;
  /// Zero total integral within rel_tol of the integral of |f|.
  bool is_balanced(double rel_tol = 1e-8) const;

  double density(Point2 x) const;
  /// N[f](x) with a quadrature-refinement and truncation error bound.
  PotentialEvaluation evaluate(Point2 x) const;
  /// N[f](x) without the error bound.
  double value(Point2 x) const;
  /// N[f] at the point with local coordinate z in the frame of patch `owner`.
  double value_local(int owner, Point2 z, int sub_order = 0) const;
  /// Density at the point with local coordinate z in the frame of patch `owner`.
  double density_local(int owner, Point2 z) const;

 private:
  int owner_of(Point2 x) const;

  std::vector<PolarPatch> patches_;
  double truncation_mass_ = 0.0;
  double truncation_extent_ = 0.0;
};

/// N[f](x) = -(1/2pi) integral ln|x-y| f(y) dy.
PotentialEvaluation log_potential(const SourceField& f, Point2 x);

/// Exterior potential of a radial patch, -(mass/2pi) ln|x - center|.
/// Contract error if the density is not radial or x lies inside the support.
double bump_far_field(const PolarPatch& patch, Point2 x);

struct DecayReport {
  double beta = 0.0;
  double exponent = 0.0;             // 2 beta / (1 + 2 beta)
  std::vector<double> radii;
  std::vector<double> ratios;        // max_theta |w| r^exponent / ln r
  bool bounded = false;
  bool non_increasing = false;
};

/// Checks |w(x)| |x|^{2b/(1+2b)} / ln|x| on the given radii for a balanced source.
DecayReport ground_state_decay_check(const SourceField& f, double beta, std::span<const double> radii,
                                     int angles = 8);

/// Potential values on a uniform square grid.
struct UniformGrid {
  Point2 origin;   // lower-left node
  double spacing = 0.0;
  int nx = 0;
  int ny = 0;
  std::vector<double> values;  // values[iy * nx + ix]

  Point2 node(int ix, int iy) const {
    return {origin.x + ix * spacing, origin.y + iy * spacing};
  }
};

UniformGrid sample_potential(const SourceField& f, Point2 center, double spacing, int half_width);

/// Max over interior nodes of |5-point Laplacian(w) + f|, relative to max|f|
/// on the grid (or to the largest source density when f vanishes there).
double laplacian_residual(const UniformGrid& w, const SourceField& f);

}  // namespace gcurv
