#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gausscurv/curvature.hpp"
#include "gausscurv/potential.hpp"

namespace gcurv {

/// Base growth profile: ln r outside B_1, cubic in s = r^2 inside
/// (value, first and second derivative matched at r = 1).
struct BaseGrowth {
  static double w0(double r);
  static double w0(Point2 x) { return w0(norm(x)); }
  /// Laplacian of w0, 6 (1 - r^2)^2 on B_1 and 0 outside.
  static double laplacian(double r);
  /// r w0'(r).
  static double flux_density(double r);
};

struct SolverOptions {
  double omega = 1.0;
  double tol = 1e-6;
  int max_iter = 400;
  double r_max = 1e4;
  int radial_order = 12;
  double panel_ratio = 1.5;
  int angles = 64;
  int bump_radii = 32;
  int bump_angles = 32;
  double v_init = 0.0;
  // Optional non-constant initial correction (added to v_init).
  std::function<double(Point2)> initial;
  // Compute the explicit super/sub bracket and track iterates against it.
  bool bracket = false;
  int threads = 1;
  // Skip the alpha < alpha_1 guard (the caller has already checked it).
  bool skip_range_guard = false;
  // Second stopping test: relative finite-difference PDE residual after the update norm settles.
  double residual_tol = 1e-3;
};

/// Explicit barrier pair alpha w0 + t + w~ -/+ ||w~||_inf.
struct Bracket {
  double alpha = 0.0;
  double t = 0.0;
  double sup_norm = 0.0;
  SourceField source;  // g with v = 0, w~ = N[g]

  double lower(Point2 x) const;
  double upper(Point2 x) const;
};

struct SolveInfo {
  int iterations = 0;
  bool converged = false;
  double final_update = 0.0;
  double omega_final = 1.0;
  double max_abs_v = 0.0;
  double balance = 0.0;   // max over iterates of |int g_k| / int |g_k|
  double residual = 0.0;  // pde_residual on the convergence check points
  std::vector<double> trace;  // update norm per iteration
  bool within_bracket = true; // all iterates inside the bracket (when computed)
};

/// u = alpha w0 + t + v with v = N[g] for the final balanced source g.
class SolutionField {
 public:
  SolutionField(CurvatureField k, double alpha, double t, SourceField source, std::vector<std::vector<double>> v_nodes,
                SolveInfo info, std::optional<Bracket> bracket);

  const CurvatureField& curvature() const { return k_; }
  double alpha() const { return alpha_; }
  double t() const { return t_; }
  const SourceField& source() const { return source_; }
  const SolveInfo& info() const { return info_; }
  const std::optional<Bracket>& bracket() const { return bracket_; }

  double v(Point2 x) const;
  double u(Point2 x) const;
  /// Remainder xi = u - alpha w0 = t + v.
  double xi(Point2 x) const;
  /// Patch index holding bump `slot`, or -1.
  int bump_patch(int slot) const;
  /// v at local coordinate z of bump `slot` (exact log-radius arithmetic).
  double v_local(int slot, Point2 z) const;
  /// v at the grid nodes of patch i, indexed node * angles + k.
  std::span<const double> v_nodes(int patch) const { return v_nodes_[patch]; }
  void set_residual(double r) { info_.residual = r; }

 private:
  CurvatureField k_;
  double alpha_;
  double t_;
  SourceField source_;
  std::vector<std::vector<double>> v_nodes_;
  SolveInfo info_;
  std::optional<Bracket> bracket_;
};

/// t with int K e^{2 alpha w0 + 2t + 2v} = -2 alpha pi, given the curvature integral
/// I = int |K| e^{2 alpha w0 + 2v}.
double normalize_t(double alpha, double curvature_integral);

/// normalize_t for a correction v given as a function (quadrature on the solver grids).
double normalize_t(const CurvatureField& k, double alpha, const std::function<double(Point2)>& v,
                   const SolverOptions& opts = {});

SolutionField picard_solve(const CurvatureField& k, double alpha, const SolverOptions& opts = {});

Bracket super_sub_bracket(const CurvatureField& k, double alpha, const SolverOptions& opts = {});

struct TotalCurvature {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// int K e^{2u} over the solution grids plus the analytic tail.
TotalCurvature total_curvature(const SolutionField& u);

/// int K e^{2u} for u given as a function (same quadrature as the solver).
TotalCurvature total_curvature(const CurvatureField& k, const std::function<double(Point2)>& u,
                               const SolverOptions& opts = {});

/// max |5-point Laplacian(u) + K e^{2u}| / max |K e^{2u}| over the check points.
double pde_residual(const SolutionField& u, std::span<const Point2> points);

/// Check points: `angles` angles on radii spaced geometrically in [r_min, r_max].
std::vector<Point2> check_points(double r_min, double r_max, int radii, int angles);

}  // namespace gcurv
