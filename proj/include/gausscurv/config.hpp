#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gausscurv/alphap.hpp"
#include "gausscurv/asymptotics.hpp"
#include "gausscurv/curvature.hpp"
#include "gausscurv/solver.hpp"

namespace gcurv {

struct CurvatureConfig {
  std::string kind;  // radial_power | exact_family | bump_sum | grid_sampled
  double amplitude = 1.0;
  double ell = 4.0;
  double q = 2.0;
  int n_max = 6;
  double alpha = 1.0;  // exact_family parameter
  std::string grid_file;
  double scale = 1.0;
};

struct SolveConfig {
  double alpha = 0.5;
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
  bool bracket = false;
  double check_radius = 50.0;
};

struct AlphaPConfig {
  std::vector<double> p{1.0};
  double alpha_min = -2.0;
  double alpha_max = 6.0;
  double alpha_step = 0.25;
  double bisect_tol = 0.01;
  int k_max = 12;
  int fit_k_min = 6;
};

struct AsymptoticsConfig {
  std::vector<double> radii{50, 100, 200, 500, 1000, 2000, 5000};
  int angles = 16;
  std::vector<double> decay_radii{5, 10, 20, 40, 80};
  double beta = 0.0;  // 0 selects (alpha_1 - alpha) / 2
  int n_min = 3;
  int n_max = 6;
  std::vector<double> probe_alphas{0.3, 0.5, 0.7};
  double gap_small = 0.01;
  double gap_floor = 0.05;
  double alpha_fit_tol = 0.02;
  double ratio_step = 0.0;
  double anisotropy_bound = 0.1;
  double decay_floor = 1e-9;
};

struct PotentialConfig {
  double spacing = 0.01;
  int half_width = 20;
  std::vector<double> center{0.3, 0.2};
  std::vector<double> decay_radii{10, 20, 40, 80};
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int threads = 1;
  int samples = 64;
};

struct ExperimentConfig {
  CurvatureConfig curvature;
  SolveConfig solve;
  AlphaPConfig alphap;
  AsymptoticsConfig asymptotics;
  PotentialConfig potential;
  RunConfig run;
};

/// Parses "key = value" lines under [section] headers; '#' starts a comment.
/// Unknown keys, duplicates, type mismatches and failed semantic checks raise
/// Config errors naming the key (and the line where one exists).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text with every key materialized; parse(emit(c)) reproduces c.
std::string emit_config(const ExperimentConfig& config);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

CurvatureField build_curvature(const CurvatureConfig& c);
SolverOptions solver_options(const ExperimentConfig& c);
AlphaPOptions alphap_options(const ExperimentConfig& c);
VerdictThresholds verdict_thresholds(const AsymptoticsConfig& c);

}  // namespace gcurv
