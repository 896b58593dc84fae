#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "gausscurv/gausscurv.h"

namespace {

const double kPi = 3.141592653589793;

std::string source_path(const std::string& rel) { return std::string(GAUSSCURV_SOURCE_DIR) + "/" + rel; }

}  // namespace

TEST_CASE("curvature handles evaluate and report errors") {
  gc_curvature* k = nullptr;
  REQUIRE(gc_curvature_radial_power(1.0, 4.0, &k) == GC_OK);
  double v = 0.0;
  CHECK(gc_curvature_eval(k, 1.0, 0.0, &v) == GC_OK);
  CHECK(v == doctest::Approx(-0.25));
  CHECK(std::string(gc_last_error()).empty());
  CHECK(gc_curvature_eval(k, 1.0, 0.0, nullptr) == GC_ERR_CONTRACT);
  gc_curvature_free(k);

  gc_curvature* bad = nullptr;
  CHECK(gc_curvature_radial_power(1.0, 1.0, &bad) == GC_ERR_CONTRACT);
  CHECK(bad == nullptr);
  CHECK(std::string(gc_last_error()).find("parameter") != std::string::npos);
  CHECK(gc_curvature_exact_family(1.0, nullptr) == GC_ERR_CONTRACT);
  gc_curvature_free(nullptr);
}

TEST_CASE("solve through the C interface") {
  gc_curvature* k = nullptr;
  REQUIRE(gc_curvature_exact_family(1.0, &k) == GC_OK);
  gc_solve_options opts;
  gc_solve_options_default(&opts);
  CHECK(opts.tol == 1e-6);
  gc_solution* s = nullptr;
  REQUIRE(gc_solve(k, 1.0, &opts, &s) == GC_OK);
  gc_solution_info info;
  REQUIRE(gc_solution_info_get(s, &info) == GC_OK);
  CHECK(info.converged == 1);
  CHECK(info.total_curvature == doctest::Approx(-2.0 * kPi).epsilon(1e-5));
  double u = 0.0;
  CHECK(gc_solution_u(s, 3.0, 4.0, &u) == GC_OK);
  CHECK(u == doctest::Approx(0.5 * std::log(26.0)).epsilon(1e-5));
  gc_solution_free(s);

  // Out of the existence range.
  gc_solution* none = nullptr;
  CHECK(gc_solve(k, 3.0, nullptr, &none) == GC_ERR_CONTRACT);
  CHECK(none == nullptr);
  opts.max_iter = 1;
  CHECK(gc_solve(k, 1.0, &opts, &none) == GC_ERR_NONCONVERGENCE);

  double r[] = {0.0, 1.0, 10.0};
  double out[3];
  REQUIRE(gc_radial_u(k, 1.0, r, 3, out) == GC_OK);
  for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(0.5 * std::log1p(r[i] * r[i])).epsilon(1e-6).scale(1e-6));
  gc_curvature_free(k);
}

TEST_CASE("alpha_p through the C interface") {
  gc_curvature* k = nullptr;
  REQUIRE(gc_curvature_bump_sum(3.0, 2.0, 6, &k) == GC_OK);
  double a = 0.0;
  CHECK(gc_alpha_p(k, 1.0, 1, &a) == GC_OK);
  CHECK(a == doctest::Approx(1.0).epsilon(0.02));
  CHECK(gc_alpha_p(k, 1.5, 1, &a) == GC_OK);
  CHECK(a == -HUGE_VAL);
  CHECK(gc_alpha_p(k, 0.5, 1, &a) == GC_ERR_CONTRACT);
  gc_curvature_free(k);
}

TEST_CASE("config handles") {
  gc_config* c = nullptr;
  CHECK(gc_config_parse("[curvature]\nkind = nope\n", &c) == GC_ERR_CONFIG);
  CHECK(std::string(gc_last_error()).find("curvature.kind") != std::string::npos);
  CHECK(gc_config_load("/nonexistent.conf", &c) == GC_ERR_CONFIG);
  REQUIRE(gc_config_load(source_path("configs/k0_probe.conf").c_str(), &c) == GC_OK);
  char* text = nullptr;
  REQUIRE(gc_config_emit(c, &text) == GC_OK);
  std::ifstream in(source_path("configs/k0_probe.conf"));
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(file == text);
  gc_string_free(text);
  gc_curvature* k = nullptr;
  REQUIRE(gc_curvature_from_config(c, &k) == GC_OK);
  double v = 1.0;
  CHECK(gc_curvature_eval(k, 0.0, 0.0, &v) == GC_OK);
  CHECK(v == 0.0);
  gc_curvature_free(k);
  gc_config_free(c);
}

TEST_CASE("run a subcommand") {
  const auto dir = std::filesystem::temp_directory_path() / "gausscurv_capi_run";
  std::filesystem::remove_all(dir);
  CHECK(gc_run("verify-exact", source_path("configs/verify_exact.conf").c_str(), dir.string().c_str(), 1, 0) == GC_OK);
  CHECK(std::filesystem::exists(dir / "verify_exact.json"));
  CHECK(gc_run("bogus", source_path("configs/verify_exact.conf").c_str(), dir.string().c_str(), 1, 0) != GC_OK);
  CHECK(gc_run("solve", "/nonexistent.conf", nullptr, 0, 0) == GC_ERR_CONFIG);
  CHECK(gc_run(nullptr, nullptr, nullptr, 0, 0) == GC_ERR_CONTRACT);
  CHECK(std::string(gc_version()).size() > 0);
  std::filesystem::remove_all(dir);
}
