#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gausscurv/solver.hpp"

namespace gcurv {

using PlaneFunction = std::function<double(Point2)>;

struct GrowthFit {
  double alpha = 0.0;
  double c = 0.0;
  double d = 0.0;               // coefficient of the 1/r correction
  double alpha_delta = 0.0;
  double c_delta = 0.0;
  double max_angular_deviation = 0.0;
  double residual = 0.0;        // rms residual of the angular means
  bool anisotropic = false;     // angular deviation above the bound
  std::vector<double> radii;
  std::vector<double> means;
};

/// Least-squares fit of the angular means of u to alpha ln r + c + d / r.
GrowthFit fit_log_growth(const PlaneFunction& u, std::span<const double> radii, int angles,
                         double anisotropy_bound = 0.1);

struct DecayFit {
  bool floor = false;          // remainder below the numeric floor at every radius
  double gamma = 0.0;          // fitted decay exponent
  double target = 0.0;         // 2 beta / (1 + 2 beta)
  double beta = 0.0;
  std::vector<double> radii;
  std::vector<double> remainders;  // max over angles of |u - alpha ln r - c|
};

/// Log-log fit |u - alpha ln r - c| ~ C r^{-gamma} on angular maxima.
DecayFit remainder_decay_exponent(const PlaneFunction& u, double alpha, double c, std::span<const double> radii,
                                  double beta, int angles = 16, double floor = 1e-9);

struct AnisotropySample {
  int n = 0;
  double xi_plus = 0.0;   // xi at a_n (bump frame when present)
  double xi_minus = 0.0;  // xi at -a_n
  double gap = 0.0;
  double self_term = 0.0; // -(mass_n ln r_n) / 2 pi, from the exact log radius
};

/// gap_n = xi(a_n) - xi(-a_n) for n in [n_min, n_max].
std::vector<AnisotropySample> anisotropy_probe(const SolutionField& u, int n_min, int n_max);

struct GrowthSample {
  int n = 0;
  double log_self = 0.0;     // ln of C n^{2 alpha - ell + q}
  double model_ratio = 0.0;  // C n^{2 alpha - ell + q} / ln n
};

struct GrowthModel {
  double exponent = 0.0;     // 2 alpha - ell + q
  bool increasing = false;   // model ratios strictly increasing over the range
  bool low_confidence = false;
  std::vector<GrowthSample> samples;
};

/// Self-term model of the remainder at bump centers for alpha above (ell - q)/2.
GrowthModel growth_probe(const CurvatureField& k, double alpha, int n_min, int n_max);

struct SolutionGrowth {
  int n = 0;
  double xi = 0.0;
  double ratio = 0.0;  // |xi(a_n)| / ln n
};

/// |xi(a_n)| / ln n from a solution.
std::vector<SolutionGrowth> solution_growth(const SolutionField& u, int n_min, int n_max);

struct LayerReport {
  bool ordered = false;
  double min_margin = 0.0;
};

/// u_lo < u_hi at every sample.
LayerReport layer_check(const SolutionField& lo, const SolutionField& hi, std::span<const Point2> samples);

struct VerdictThresholds {
  double gap_small = 0.01;
  double gap_floor = 0.05;
  double alpha_fit_tol = 0.02;
  double ratio_step = 0.0;  // minimal increase between consecutive growth ratios
};

struct VerdictInput {
  double alpha = 0.0;
  double alpha_star = 0.0;
  double alpha_hat = 0.0;
  std::vector<double> gaps;
  std::vector<double> ratios;  // empty below alpha_star
};

struct Verdict {
  std::string tag;   // uniform | anisotropic-bounded | unbounded | inconclusive
  std::string expected;
  bool uniform_small = false;
  bool uniform_decreasing = false;
  bool gaps_above_floor = false;
  bool alpha_stable = false;
  bool ratios_increasing = false;
};

Verdict classify(const VerdictInput& in, const VerdictThresholds& th);

}  // namespace gcurv
