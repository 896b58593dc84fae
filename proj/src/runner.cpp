#include "gausscurv/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include <json.hpp>

#include "gausscurv/alphap.hpp"
#include "gausscurv/asymptotics.hpp"
#include "gausscurv/error.hpp"
#include "gausscurv/potential.hpp"
#include "gausscurv/radial.hpp"
#include "gausscurv/solver.hpp"

namespace gcurv {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "+inf" : "-inf";
}

Json num_list(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

std::string csv_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  void csv(const std::string& name, const std::string& header, const std::vector<std::vector<double>>& rows) {
    std::string body = header + "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) body += ",";
        body += csv_double(row[i]);
      }
      body += "\n";
    }
    write(name, body);
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  void write(const std::string& name, const std::string& body) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    out << body;
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    files_.push_back(path.string());
  }

  fs::path dir_;
  std::vector<std::string> files_;
};

struct Context {
  const ExperimentConfig& config;
  Writer& out;
  std::ostream* log;

  void note(const std::string& s) const {
    if (log) *log << s << "\n";
  }
};

Json header(const std::string& subcommand, const ExperimentConfig& c) {
  Json j;
  j["schema"] = 1;
  j["subcommand"] = subcommand;
  j["config"] = emit_config(c);
  return j;
}

// Uniform doubles in [0, 1) from splitmix64; fixed across platforms.
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : state_(seed) {}
  double next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

std::vector<Point2> seeded_samples(const ExperimentConfig& c) {
  SampleStream s(c.run.seed);
  std::vector<Point2> pts;
  for (int i = 0; i < c.run.samples; ++i) {
    const double r = c.solve.check_radius * std::sqrt(s.next());
    pts.push_back(polar(r, kTwoPi * s.next()));
  }
  return pts;
}

double default_beta(const CurvatureField& k, double alpha, const AsymptoticsConfig& a, int threads) {
  if (a.beta > 0.0) return a.beta;
  const double a1 = alpha1_estimate(k, threads);
  if (!std::isfinite(a1)) return 0.5;
  return 0.5 * (a1 - alpha);
}

Json solve_info_json(const SolutionField& s) {
  const auto& info = s.info();
  Json j;
  j["iterations"] = info.iterations;
  j["converged"] = info.converged;
  j["final_update"] = num(info.final_update);
  j["omega_final"] = num(info.omega_final);
  j["t"] = num(s.t());
  j["max_abs_v"] = num(info.max_abs_v);
  j["balance"] = num(info.balance);
  j["update_trace"] = num_list(info.trace);
  if (s.bracket()) {
    j["bracket"] = {{"sup_norm", num(s.bracket()->sup_norm)}, {"t", num(s.bracket()->t)},
                    {"within_bracket", info.within_bracket}};
  }
  return j;
}

Json total_curvature_json(const SolutionField& s) {
  const TotalCurvature tc = total_curvature(s);
  const double expected = -2.0 * s.alpha() * kPi;
  return {{"value", num(tc.value)},
          {"tail_bound", num(tc.tail_bound)},
          {"expected", num(expected)},
          {"relative_error", num(std::abs(tc.value - expected) / std::abs(expected))}};
}

SolutionField solve_at(const Context& ctx, const CurvatureField& k, double alpha) {
  ctx.note("solving " + k.describe() + " at alpha = " + format_double(alpha));
  SolutionField s = picard_solve(k, alpha, solver_options(ctx.config));
  ctx.note("  converged in " + std::to_string(s.info().iterations) + " iterations");
  return s;
}

// -- subcommands ------------------------------------------------------------

void run_alphap(const Context& ctx) {
  const auto& c = ctx.config;
  const CurvatureField k = build_curvature(c.curvature);
  const AlphaPOptions opts = alphap_options(c);
  Json j = header("alphap", c);
  j["curvature"] = k.describe();
  j["options"] = {{"alpha_min", opts.alpha_min},   {"alpha_max", opts.alpha_max},
                  {"alpha_step", opts.alpha_step}, {"bisect_tol", opts.bisect_tol},
                  {"k_max", opts.k_max},           {"fit_k_min", opts.fit_k_min},
                  {"monotone_tol", opts.monotone_tol}};
  Json results = Json::array();
  std::vector<std::vector<double>> rows;
  std::vector<double> estimates;
  for (double p : c.alphap.p) {
    ctx.note("alpha_p at p = " + format_double(p));
    const AlphaPEstimate e = estimate_alpha_p(k, p, opts);
    Json r;
    r["p"] = p;
    r["estimate"] = num(e.estimate.as_double());
    r["method"] = e.method;
    r["reference_alpha"] = num(e.reference_alpha);
    r["tail_exponent_fit"] = num(e.tail_exponent);
    r["fit_residual"] = num(e.fit_residual);
    r["boundary_inconclusive"] = e.boundary_inconclusive;
    Json annuli = Json::array();
    for (const auto& a : e.annuli) {
      annuli.push_back({{"r_lo", num(a.r_lo)}, {"r_hi", num(a.r_hi)}, {"log2_moment", num(a.log2_moment)}});
    }
    r["annuli"] = annuli;
    Json slopes = Json::array();
    for (const auto& s : e.slopes) {
      slopes.push_back({{"alpha", s.alpha}, {"slope", num(s.slope)}, {"residual", num(s.residual)},
                        {"inconclusive", s.inconclusive}});
    }
    r["slopes"] = slopes;
    results.push_back(r);
    rows.push_back({p, e.estimate.as_double(), e.tail_exponent, e.fit_residual});
    estimates.push_back(e.estimate.as_double());
  }
  bool monotone = true;
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    if (c.alphap.p[i] >= c.alphap.p[i - 1] && estimates[i] > estimates[i - 1] + opts.bisect_tol) monotone = false;
  }
  j["results"] = results;
  j["non_increasing_in_p"] = monotone;
  ctx.out.json("alphap.json", j);
  ctx.out.csv("alphap.csv", "p,estimate,tail_exponent,fit_residual", rows);
}

void run_solve(const Context& ctx) {
  const auto& c = ctx.config;
  const CurvatureField k = build_curvature(c.curvature);
  const double alpha = c.solve.alpha;
  const SolutionField s = solve_at(ctx, k, alpha);

  Json j = header("solve", c);
  j["curvature"] = k.describe();
  j["alpha"] = alpha;
  j["run"] = solve_info_json(s);
  j["total_curvature"] = total_curvature_json(s);
  const auto pts = check_points(0.05, c.solve.check_radius, 24, 8);
  j["pde_residual"] = {{"value", num(pde_residual(s, pts))},
                       {"r_min", 0.05},
                       {"r_max", c.solve.check_radius},
                       {"bound", 1e-2}};

  if (k.kind() == CurvatureKind::RadialPower) {
    ctx.note("radial shooting comparison");
    const RadialProfile prof = radial_solve_for_alpha(k, alpha);
    double worst = 0.0;
    for (const Point2 x : check_points(0.01, 10.0, 60, 4)) worst = std::max(worst, std::abs(s.u(x) - prof(norm(x))));
    j["radial_agreement"] = {{"c0", num(prof.c0())}, {"max_difference", num(worst)}, {"r_max", 10.0},
                             {"bound", 1e-3}};
  }

  std::vector<std::vector<double>> sample_rows;
  for (const Point2 x : seeded_samples(c)) sample_rows.push_back({x.x, x.y, s.u(x)});
  ctx.out.json("solve.json", j);

  // Background nodes: r theta u v.
  const PolarPatch& bg = s.source().patch(0);
  const auto v0 = s.v_nodes(0);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < bg.grid().size(); ++i) {
    const double r = bg.grid().node(i);
    for (int a = 0; a < bg.angles(); ++a) {
      const double v = v0[static_cast<std::size_t>(i) * bg.angles() + a];
      rows.push_back({r, bg.angle(a), alpha * BaseGrowth::w0(r) + s.t() + v, v});
    }
  }
  ctx.out.csv("solution.csv", "r,theta,u,v", rows);
  if (k.kind() == CurvatureKind::BumpSum) {
    std::vector<std::vector<double>> brows;
    for (int slot = 0; slot < static_cast<int>(k.bumps().size()); ++slot) {
      const int pi = s.bump_patch(slot);
      const PolarPatch& p = s.source().patch(pi);
      const auto vn = s.v_nodes(pi);
      for (int i = 0; i < p.grid().size(); ++i) {
        for (int a = 0; a < p.angles(); ++a) {
          brows.push_back({static_cast<double>(k.bumps()[slot].index), p.grid().node(i), p.angle(a),
                           vn[static_cast<std::size_t>(i) * p.angles() + a]});
        }
      }
    }
    ctx.out.csv("bumps.csv", "n,zr,ztheta,v_local", brows);
  }
  ctx.out.csv("samples.csv", "x,y,u", sample_rows);
}

void run_verify_exact(const Context& ctx) {
  const auto& c = ctx.config;
  if (c.curvature.kind != "exact_family") {
    fail(ErrorKind::Config, "curvature.kind: verify-exact needs exact_family, got '" + c.curvature.kind + "'");
  }
  if (c.curvature.scale != 1.0) fail(ErrorKind::Config, "curvature.scale: verify-exact needs scale = 1");
  const ExactFamily fam = make_exact_family(c.curvature.alpha);
  const CurvatureField& k = fam.field;
  const SolutionField s = solve_at(ctx, k, fam.alpha);

  auto pts = check_points(0.01, c.solve.check_radius, 64, 16);
  pts.push_back({0.0, 0.0});
  for (const Point2 x : seeded_samples(c)) pts.push_back(x);
  double max_err = 0.0;
  std::vector<std::vector<double>> rows;
  for (const Point2 x : pts) {
    const double u = s.u(x), ref = fam.reference(x);
    max_err = std::max(max_err, std::abs(u - ref));
    rows.push_back({x.x, x.y, u, ref, u - ref});
  }
  const Json tc = total_curvature_json(s);
  const double max_error_bound = 1e-3, curvature_rel_bound = 1e-2;
  Json j = header("verify-exact", c);
  j["curvature"] = k.describe();
  j["alpha"] = fam.alpha;
  j["run"] = solve_info_json(s);
  j["max_error"] = num(max_err);
  j["check_radius"] = c.solve.check_radius;
  j["total_curvature"] = tc;
  j["thresholds"] = {{"max_error", max_error_bound}, {"total_curvature_relative", curvature_rel_bound}};
  const bool pass = max_err <= max_error_bound && tc["relative_error"].get<double>() <= curvature_rel_bound;
  j["pass"] = pass;
  ctx.out.json("verify_exact.json", j);
  ctx.out.csv("verify_exact.csv", "x,y,u,reference,error", rows);
  if (!pass) fail(ErrorKind::NumericTolerance, "verify-exact: solution misses the closed form (see verify_exact.json)");
}

void run_verify_potential(const Context& ctx) {
  const auto& c = ctx.config;
  const auto& pc = c.potential;
  Json j = header("verify-potential", c);

  // Newton: exterior potential of a radial source is -(mass / 2 pi) ln r.
  const PolarPatch disk = PolarPatch::from_radial({0, 0}, 0.0, RadialGrid::unit_disk(32), [](double) { return 1.0; });
  const PolarPatch bump =
      PolarPatch::from_radial({2.0, 0.0}, -4.0, RadialGrid::unit_disk(32), [](double r) { return eta0(r); });
  const SourceField disk_f({disk}), bump_f({bump});
  double newton = 0.0;
  for (double r : {1.0, 1.5, 3.0, 10.0, 100.0}) {
    for (int a = 0; a < 8; ++a) {
      const Point2 x = polar(r, kTwoPi * (a + 0.5) / 8);
      newton = std::max(newton, std::abs(disk_f.value(x) + 0.5 * std::log(r)));
      const Point2 y = Point2{2.0, 0.0} + std::exp(-4.0) * polar(r + 0.5, kTwoPi * (a + 0.5) / 8);
      newton = std::max(newton, std::abs(bump_f.value(y) - bump_far_field(bump, y)));
    }
  }
  const double newton_bound = 1e-9;
  j["newton_exterior"] = {{"max_error", num(newton)}, {"bound", newton_bound}};

  // Discrete Laplacian of N[f] against f for f = 4 / (1 + r^2)^2, halving h twice.
  const PolarPatch smooth = PolarPatch::from_function(
      {0, 0}, 0.0, RadialGrid::background(1e4, 1.5, 12), 64,
      [](Point2 z) {
        const double r2 = z.x * z.x + z.y * z.y;
        return 4.0 / ((1 + r2) * (1 + r2));
      },
      true);
  const SourceField smooth_f({smooth});
  std::vector<double> residuals, ratios;
  for (int level = 0; level < 3; ++level) {
    const double h = pc.spacing * std::ldexp(1.0, -level);
    const UniformGrid g = sample_potential(smooth_f, {pc.center[0], pc.center[1]}, h, pc.half_width << level);
    residuals.push_back(laplacian_residual(g, smooth_f));
    if (level > 0) ratios.push_back(residuals[level - 1] / residuals[level]);
  }
  const bool second_order = std::all_of(ratios.begin(), ratios.end(), [](double r) { return r >= 3.5 && r <= 4.5; });
  j["laplacian"] = {{"spacings", num_list({pc.spacing, pc.spacing / 2, pc.spacing / 4})},
                    {"residuals", num_list(residuals)},
                    {"ratios", num_list(ratios)},
                    {"ratio_window", {3.5, 4.5}},
                    {"second_order", second_order}};

  // Balanced source of the exact family at v = 0.
  const double alpha = c.curvature.kind == "exact_family" ? c.curvature.alpha : 1.0;
  const ExactFamily fam = make_exact_family(alpha);
  const Bracket b = super_sub_bracket(fam.field, alpha, solver_options(c));
  const double beta = default_beta(fam.field, alpha, c.asymptotics, c.run.threads);
  const DecayReport d = ground_state_decay_check(b.source, beta, pc.decay_radii);
  j["ground_state_decay"] = {{"alpha", alpha},
                             {"beta", beta},
                             {"exponent", d.exponent},
                             {"balanced", b.source.is_balanced()},
                             {"radii", num_list(d.radii)},
                             {"ratios", num_list(d.ratios)},
                             {"bounded", d.bounded},
                             {"non_increasing", d.non_increasing}};
  const bool pass = newton <= newton_bound && second_order && d.bounded && d.non_increasing;
  j["pass"] = pass;
  ctx.out.json("verify_potential.json", j);
  if (!pass) fail(ErrorKind::NumericTolerance, "verify-potential: a check failed (see verify_potential.json)");
}

Json fit_json(const GrowthFit& f) {
  return {{"alpha_hat", num(f.alpha)},
          {"c_hat", num(f.c)},
          {"d_hat", num(f.d)},
          {"alpha_delta", num(f.alpha_delta)},
          {"c_delta", num(f.c_delta)},
          {"max_angular_deviation", num(f.max_angular_deviation)},
          {"residual", num(f.residual)},
          {"anisotropic", f.anisotropic}};
}

void run_fit(const Context& ctx) {
  const auto& c = ctx.config;
  const auto& a = c.asymptotics;
  const CurvatureField k = build_curvature(c.curvature);
  const double alpha = c.curvature.kind == "exact_family" ? c.curvature.alpha : c.solve.alpha;
  const SolutionField s = solve_at(ctx, k, alpha);
  auto u = [&](Point2 x) { return s.u(x); };
  const GrowthFit f = fit_log_growth(u, a.radii, a.angles, a.anisotropy_bound);
  const double beta = default_beta(k, alpha, a, c.run.threads);
  const DecayFit d = remainder_decay_exponent(u, alpha, f.c, a.decay_radii, beta, a.angles, a.decay_floor);

  Json j = header("fit", c);
  j["curvature"] = k.describe();
  j["alpha"] = alpha;
  j["run"] = solve_info_json(s);
  j["fit"] = fit_json(f);
  Json decay;
  decay["beta"] = beta;
  decay["target"] = d.target;
  decay["decay_floor"] = a.decay_floor;
  if (d.floor) {
    decay["status"] = "decay-floor";
  } else {
    decay["status"] = "fit";
    decay["gamma_hat"] = num(d.gamma);
    decay["meets_target"] = d.gamma >= d.target - 0.1;
  }
  decay["radii"] = num_list(d.radii);
  decay["remainders"] = num_list(d.remainders);
  j["decay"] = decay;
  j["thresholds"] = {{"anisotropy_bound", a.anisotropy_bound}, {"decay_slack", 0.1}};
  ctx.out.json("fit.json", j);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < f.radii.size(); ++i) {
    rows.push_back({f.radii[i], f.means[i], f.alpha * std::log(f.radii[i]) + f.c + f.d / f.radii[i]});
  }
  ctx.out.csv("fit.csv", "r,mean_u,fitted", rows);
}

void run_k0_probe(const Context& ctx) {
  const auto& c = ctx.config;
  const auto& a = c.asymptotics;
  if (c.curvature.kind != "bump_sum") {
    fail(ErrorKind::Config, "curvature.kind: k0-probe needs bump_sum, got '" + c.curvature.kind + "'");
  }
  if (a.n_max > c.curvature.n_max) {
    fail(ErrorKind::Config, "asymptotics.n_max: exceeds curvature.n_max = " + std::to_string(c.curvature.n_max));
  }
  const CurvatureField k = build_curvature(c.curvature);
  const double alpha_star = 0.5 * (k.ell() - k.q());
  const VerdictThresholds th = verdict_thresholds(a);

  Json j = header("k0-probe", c);
  j["curvature"] = k.describe();
  j["alpha_star"] = alpha_star;
  j["n_range"] = {a.n_min, a.n_max};
  j["thresholds"] = {{"gap_small", th.gap_small},
                     {"gap_floor", th.gap_floor},
                     {"alpha_fit_tol", th.alpha_fit_tol},
                     {"ratio_step", th.ratio_step},
                     {"anisotropy_bound", a.anisotropy_bound}};
  Json probes = Json::array();
  std::vector<std::vector<double>> rows;
  for (double alpha : a.probe_alphas) {
    const SolutionField s = solve_at(ctx, k, alpha);
    const auto gaps = anisotropy_probe(s, a.n_min, a.n_max);
    const auto growth = solution_growth(s, a.n_min, a.n_max);
    const GrowthFit f = fit_log_growth([&](Point2 x) { return s.u(x); }, a.radii, a.angles, a.anisotropy_bound);

    VerdictInput in;
    in.alpha = alpha;
    in.alpha_star = alpha_star;
    in.alpha_hat = f.alpha;
    for (const auto& g : gaps) in.gaps.push_back(g.gap);
    for (const auto& g : growth) in.ratios.push_back(g.ratio);
    if (!(alpha > alpha_star + 1e-12)) in.ratios.clear();
    const Verdict v = classify(in, th);

    Json p;
    p["alpha"] = alpha;
    p["run"] = solve_info_json(s);
    p["total_curvature"] = total_curvature_json(s);
    p["fit"] = fit_json(f);
    Json gj = Json::array();
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      gj.push_back({{"n", gaps[i].n},
                    {"xi_plus", num(gaps[i].xi_plus)},
                    {"xi_minus", num(gaps[i].xi_minus)},
                    {"gap", num(gaps[i].gap)},
                    {"self_term", num(gaps[i].self_term)},
                    {"growth_ratio", num(growth[i].ratio)}});
    }
    p["probes"] = gj;
    if (alpha > alpha_star + 1e-12) {
      const GrowthModel m = growth_probe(k, alpha, a.n_min, a.n_max);
      Json mj = Json::array();
      for (const auto& sm : m.samples) mj.push_back({{"n", sm.n}, {"model_ratio", num(sm.model_ratio)}});
      p["growth_model"] = {{"exponent", m.exponent},
                           {"increasing", m.increasing},
                           {"low_confidence", m.low_confidence},
                           {"samples", mj}};
    }
    p["verdict"] = {{"tag", v.tag},
                    {"expected", v.expected},
                    {"uniform_small", v.uniform_small},
                    {"uniform_decreasing", v.uniform_decreasing},
                    {"gaps_above_floor", v.gaps_above_floor},
                    {"alpha_stable", v.alpha_stable},
                    {"ratios_increasing", v.ratios_increasing}};
    probes.push_back(p);
    for (std::size_t i = 0; i < gaps.size(); ++i) {
      rows.push_back({alpha, static_cast<double>(gaps[i].n), gaps[i].gap, growth[i].ratio});
    }
  }
  j["results"] = probes;
  ctx.out.json("k0_probe.json", j);
  ctx.out.csv("k0_probe.csv", "alpha,n,gap_n,ratio_n", rows);
}

const std::map<std::string, std::function<void(const Context&)>>& table() {
  static const std::map<std::string, std::function<void(const Context&)>> t{
      {"alphap", run_alphap},
      {"solve", run_solve},
      {"verify-exact", run_verify_exact},
      {"verify-potential", run_verify_potential},
      {"fit", run_fit},
      {"k0-probe", run_k0_probe},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"alphap", "solve", "verify-exact", "verify-potential", "fit", "k0-probe"};
  return names;
}

RunOutcome run_subcommand(const std::string& subcommand, const ExperimentConfig& config, const std::string& out_dir,
                          std::ostream* log) {
  RunOutcome outcome;
  try {
    auto it = table().find(subcommand);
    if (it == table().end()) fail(ErrorKind::Config, "unknown subcommand '" + subcommand + "'");
    Writer writer(out_dir);
    const Context ctx{config, writer, log};
    try {
      it->second(ctx);
    } catch (...) {
      outcome.files = writer.files();
      throw;
    }
    outcome.files = writer.files();
  } catch (const Error& e) {
    outcome.status = status_class(e.kind());
    outcome.message = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const std::exception& e) {
    outcome.status = 1;
    outcome.message = std::string("internal error: ") + e.what();
  }
  return outcome;
}

RunOutcome run_config_file(const std::string& subcommand, const std::string& config_path,
                           const std::string& out_dir_override, int threads_override, std::ostream* log) {
  ExperimentConfig config;
  try {
    config = load_config(config_path);
  } catch (const Error& e) {
    return {status_class(e.kind()), std::string(to_string(e.kind())) + ": " + e.what(), {}};
  }
  if (threads_override > 0) config.run.threads = threads_override;
  const std::string out = out_dir_override.empty() ? config.run.out_dir : out_dir_override;
  return run_subcommand(subcommand, config, out, log);
}

}  // namespace gcurv
