#ifndef GAUSSCURV_H
#define GAUSSCURV_H

/* C interface to the prescribed-curvature solver. Every function returns a
 * status code; on failure gc_last_error() describes the most recent error of
 * the calling thread. Handles are opaque and must be released with the
 * matching *_free function. */

#include <stddef.h>

#if defined(GAUSSCURV_BUILDING_LIBRARY)
#define GC_API __attribute__((visibility("default")))
#else
#define GC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit classes. */
enum {
  GC_OK = 0,
  GC_ERR_INTERNAL = 1,
  GC_ERR_CONTRACT = 2,       /* bad argument, domain or precondition */
  GC_ERR_NONCONVERGENCE = 3, /* iteration, tolerance or range failure */
  GC_ERR_CONFIG = 4          /* malformed config or I/O failure */
};

typedef struct gc_curvature gc_curvature;
typedef struct gc_solution gc_solution;
typedef struct gc_config gc_config;

typedef struct gc_solve_options {
  double omega;
  double tol;
  int max_iter;
  double r_max;
  int angles;
  int bump_radii;
  int bump_angles;
  double v_init;
  int bracket; /* nonzero: compute the barrier pair */
  int threads;
} gc_solve_options;

typedef struct gc_solution_info {
  int iterations;
  int converged;
  double t;
  double final_update;
  double omega_final;
  double total_curvature;
  double total_curvature_tail;
} gc_solution_info;

GC_API const char* gc_version(void);
/* Message of the last failure on this thread ("" when none). */
GC_API const char* gc_last_error(void);
GC_API void gc_solve_options_default(gc_solve_options* opts);

GC_API int gc_curvature_radial_power(double amplitude, double ell, gc_curvature** out);
GC_API int gc_curvature_exact_family(double alpha, gc_curvature** out);
GC_API int gc_curvature_bump_sum(double ell, double q, int n_max, gc_curvature** out);
/* Builds the curvature described by the [curvature] section of a config. */
GC_API int gc_curvature_from_config(const gc_config* config, gc_curvature** out);
GC_API int gc_curvature_eval(const gc_curvature* k, double x, double y, double* out);
GC_API void gc_curvature_free(gc_curvature* k);

/* alpha_p estimate; +/-HUGE_VAL for the infinite verdicts. */
GC_API int gc_alpha_p(const gc_curvature* k, double p, int threads, double* out);

/* opts may be NULL for the defaults. */
GC_API int gc_solve(const gc_curvature* k, double alpha, const gc_solve_options* opts, gc_solution** out);
GC_API int gc_solution_u(const gc_solution* s, double x, double y, double* out);
GC_API int gc_solution_info_get(const gc_solution* s, gc_solution_info* out);
GC_API void gc_solution_free(gc_solution* s);

/* Radial shooting: u at radius r for the profile attaining alpha at infinity. */
GC_API int gc_radial_u(const gc_curvature* k, double alpha, const double* radii, size_t count, double* out);

GC_API int gc_config_parse(const char* text, gc_config** out);
GC_API int gc_config_load(const char* path, gc_config** out);
/* Canonical text; release with gc_string_free. */
GC_API int gc_config_emit(const gc_config* config, char** out);
GC_API void gc_config_free(gc_config* config);
GC_API void gc_string_free(char* s);

/* Runs a subcommand (alphap, solve, verify-exact, verify-potential, fit,
 * k0-probe). out_dir NULL or "" uses the config value; threads <= 0 keeps the
 * config value. Progress goes to stderr when verbose is nonzero. Returns the
 * status code. */
GC_API int gc_run(const char* subcommand, const char* config_path, const char* out_dir, int threads, int verbose);

#ifdef __cplusplus
}
#endif

#endif
