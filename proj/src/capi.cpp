#include "gausscurv/gausscurv.h"

#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <memory>
#include <string>

#include "gausscurv/alphap.hpp"
#include "gausscurv/config.hpp"
#include "gausscurv/error.hpp"
#include "gausscurv/radial.hpp"
#include "gausscurv/runner.hpp"
#include "gausscurv/solver.hpp"

struct gc_curvature {
  gcurv::CurvatureField field;
};

struct gc_solution {
  gcurv::SolutionField field;
  gcurv::TotalCurvature total;
};

struct gc_config {
  gcurv::ExperimentConfig config;
};

namespace {

thread_local std::string last_error;

int set_error(int code, const std::string& what) {
  last_error = what;
  return code;
}

// Runs body, translating exceptions into status codes.
template <class Body>
int guarded(Body&& body) {
  try {
    last_error.clear();
    body();
    return GC_OK;
  } catch (const gcurv::Error& e) {
    return set_error(gcurv::status_class(e.kind()), std::string(gcurv::to_string(e.kind())) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    return set_error(GC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(GC_ERR_INTERNAL, std::string("internal error: ") + e.what());
  } catch (...) {
    return set_error(GC_ERR_INTERNAL, "internal error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) gcurv::fail(gcurv::ErrorKind::Contract, what);
}

int make_curvature(gc_curvature** out, const std::function<gcurv::CurvatureField()>& build) {
  if (!out) return set_error(GC_ERR_CONTRACT, "output pointer is null");
  *out = nullptr;
  return guarded([&] { *out = new gc_curvature{build()}; });
}

}  // namespace

extern "C" {

const char* gc_version(void) { return "1.0.0"; }

const char* gc_last_error(void) { return last_error.c_str(); }

void gc_solve_options_default(gc_solve_options* opts) {
  if (!opts) return;
  const gcurv::SolverOptions d;
  *opts = {d.omega, d.tol, d.max_iter, d.r_max, d.angles, d.bump_radii, d.bump_angles, d.v_init, d.bracket ? 1 : 0,
           d.threads};
}

int gc_curvature_radial_power(double amplitude, double ell, gc_curvature** out) {
  return make_curvature(out, [&] { return gcurv::CurvatureField::radial_power(amplitude, ell); });
}

int gc_curvature_exact_family(double alpha, gc_curvature** out) {
  return make_curvature(out, [&] { return gcurv::CurvatureField::exact_family(alpha); });
}

int gc_curvature_bump_sum(double ell, double q, int n_max, gc_curvature** out) {
  return make_curvature(out, [&] { return gcurv::CurvatureField::bump_sum(ell, q, n_max); });
}

int gc_curvature_from_config(const gc_config* config, gc_curvature** out) {
  if (!config) return set_error(GC_ERR_CONTRACT, "config handle is null");
  return make_curvature(out, [&] { return gcurv::build_curvature(config->config.curvature); });
}

int gc_curvature_eval(const gc_curvature* k, double x, double y, double* out) {
  return guarded([&] {
    require(k && out, "null argument");
    *out = k->field({x, y});
  });
}

void gc_curvature_free(gc_curvature* k) { delete k; }

int gc_alpha_p(const gc_curvature* k, double p, int threads, double* out) {
  return guarded([&] {
    require(k && out, "null argument");
    gcurv::AlphaPOptions opts;
    opts.threads = threads > 0 ? threads : 1;
    const double v = gcurv::estimate_alpha_p(k->field, p, opts).estimate.as_double();
    *out = std::isfinite(v) ? v : std::copysign(HUGE_VAL, v);
  });
}

int gc_solve(const gc_curvature* k, double alpha, const gc_solve_options* opts, gc_solution** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(k && out, "null argument");
    gcurv::SolverOptions o;
    if (opts) {
      o.omega = opts->omega;
      o.tol = opts->tol;
      o.max_iter = opts->max_iter;
      o.r_max = opts->r_max;
      o.angles = opts->angles;
      o.bump_radii = opts->bump_radii;
      o.bump_angles = opts->bump_angles;
      o.v_init = opts->v_init;
      o.bracket = opts->bracket != 0;
      o.threads = opts->threads > 0 ? opts->threads : 1;
    }
    gcurv::SolutionField s = gcurv::picard_solve(k->field, alpha, o);
    const gcurv::TotalCurvature tc = gcurv::total_curvature(s);
    *out = new gc_solution{std::move(s), tc};
  });
}

int gc_solution_u(const gc_solution* s, double x, double y, double* out) {
  return guarded([&] {
    require(s && out, "null argument");
    *out = s->field.u({x, y});
  });
}

int gc_solution_info_get(const gc_solution* s, gc_solution_info* out) {
  return guarded([&] {
    require(s && out, "null argument");
    const auto& info = s->field.info();
    *out = {info.iterations,   info.converged ? 1 : 0, s->field.t(),        info.final_update,
            info.omega_final,  s->total.value,         s->total.tail_bound};
  });
}

void gc_solution_free(gc_solution* s) { delete s; }

int gc_radial_u(const gc_curvature* k, double alpha, const double* radii, size_t count, double* out) {
  return guarded([&] {
    require(k && (count == 0 || (radii && out)), "null argument");
    const gcurv::RadialProfile prof = gcurv::radial_solve_for_alpha(k->field, alpha);
    for (size_t i = 0; i < count; ++i) out[i] = prof(radii[i]);
  });
}

int gc_config_parse(const char* text, gc_config** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(text && out, "null argument");
    *out = new gc_config{gcurv::parse_config(text)};
  });
}

int gc_config_load(const char* path, gc_config** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(path && out, "null argument");
    *out = new gc_config{gcurv::load_config(path)};
  });
}

int gc_config_emit(const gc_config* config, char** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    require(config && out, "null argument");
    const std::string text = gcurv::emit_config(config->config);
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

void gc_config_free(gc_config* config) { delete config; }

void gc_string_free(char* s) { delete[] s; }

int gc_run(const char* subcommand, const char* config_path, const char* out_dir, int threads, int verbose) {
  if (!subcommand || !config_path) return set_error(GC_ERR_CONTRACT, "null argument");
  last_error.clear();
  const gcurv::RunOutcome r =
      gcurv::run_config_file(subcommand, config_path, out_dir ? out_dir : "", threads, verbose ? &std::cerr : nullptr);
  if (r.status != 0) set_error(r.status, r.message);
  return r.status;
}

}  // extern "C"
