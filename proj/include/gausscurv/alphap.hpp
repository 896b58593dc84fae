#pragma once

#include <string>
#include <vector>

#include "gausscurv/curvature.hpp"

namespace gcurv {

/// Value in the extended reals: finite, +inf or -inf.
struct ExtendedReal {
  enum class Tag { Finite, PlusInf, MinusInf };
  Tag tag = Tag::Finite;
  double value = 0.0;

  static ExtendedReal finite(double v) { return {Tag::Finite, v}; }
  static ExtendedReal plus_inf();
  static ExtendedReal minus_inf();

  bool is_finite() const { return tag == Tag::Finite; }
  /// As a double (+/-infinity for the infinite tags).
  double as_double() const;
  /// "+inf", "-inf" or the shortest round-trip decimal.
  std::string to_string() const;
};

struct AnnulusMoment {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double log2_moment = 0.0;  // -inf for a vanishing moment
};

struct SlopeSample {
  double alpha = 0.0;
  double slope = 0.0;      // fitted tail exponent s(alpha); +/-inf allowed
  double residual = 0.0;   // rms residual of the log2 fit
  bool inconclusive = false;  // |s| < 0.1
};

struct AlphaPOptions {
  double alpha_min = -2.0;
  double alpha_max = 6.0;
  double alpha_step = 0.25;
  double bisect_tol = 0.01;
  int k_max = 12;
  int fit_k_min = 6;
  // Allowed decrease of s(alpha) between consecutive grid points.
  double monotone_tol = 0.05;
  int threads = 1;
};

struct AlphaPEstimate {
  double p = 1.0;
  ExtendedReal estimate;
  std::string method;                // "dyadic-annuli" or "bump-series"
  std::vector<AnnulusMoment> annuli; // moments at the reference alpha
  double reference_alpha = 0.0;      // alpha at which `annuli` were taken
  double tail_exponent = 0.0;        // s at the reference alpha
  double fit_residual = 0.0;
  bool boundary_inconclusive = false;
  std::vector<SlopeSample> slopes;   // s over the alpha grid
};

/// Integral over r_lo <= |x| < r_hi of |K|^p (1+|x|)^{2 alpha p + 2(p-1)}.
/// Bump sums are integrated bump by bump in local frames, clipped to the annulus.
double annular_moment(const CurvatureField& k, double p, double alpha, double r_lo, double r_hi);

/// log2 of the weighted integral of |K|^p over the support of bump n of the
/// infinite bump sum (the per-term series used for alpha_p of bump sums).
double bump_series_log2_term(const CurvatureField& k, double p, double alpha, int n);

/// Fitted exponent s(alpha) of the dyadic tail moments for the given p.
SlopeSample tail_slope(const CurvatureField& k, double p, double alpha, const AlphaPOptions& opts,
                       std::vector<AnnulusMoment>* annuli = nullptr);

/// Estimated threshold alpha_p(K): the zero crossing of s(alpha) over the grid.
AlphaPEstimate estimate_alpha_p(const CurvatureField& k, double p, const AlphaPOptions& opts = {});

/// estimate_alpha_p at p = 1 as a double (+/-inf for the infinite tags).
double alpha1_estimate(const CurvatureField& k, int threads = 1);

}  // namespace gcurv
