#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "gausscurv/config.hpp"
#include "gausscurv/error.hpp"

using namespace gcurv;

namespace {

std::string config_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  FAIL("expected a config error");
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("defaults are filled in") {
  const ExperimentConfig c = parse_config("[curvature]\nkind = radial_power\n");
  CHECK(c.curvature.ell == 4.0);
  CHECK(c.solve.alpha == 0.5);
  CHECK(c.solve.tol == 1e-6);
  CHECK(c.solve.max_iter == 400);
  CHECK(c.alphap.p == std::vector<double>{1.0});
  CHECK(c.asymptotics.radii.front() == 50.0);
  CHECK(c.asymptotics.probe_alphas.size() == 3);
  CHECK(c.run.seed == 1);
  CHECK(c.run.out_dir == "out");
}

TEST_CASE("values, lists, booleans, strings and comments") {
  const ExperimentConfig c = parse_config(
      "# leading comment\n"
      "[curvature]\n"
      "kind = bump_sum   # trailing\n"
      "ell = 3\n"
      "q = 2\n"
      "[solve]\n"
      "bracket = true\n"
      "alpha = 0.25\n"
      "[alphap]\n"
      "p = [1, 1.5, 2]\n"
      "[run]\n"
      "out_dir = \"out/with # hash\"\n"
      "seed = 18446744073709551615\n");
  CHECK(c.curvature.kind == "bump_sum");
  CHECK(c.curvature.ell == 3.0);
  CHECK(c.solve.bracket);
  CHECK(c.solve.alpha == 0.25);
  CHECK(c.alphap.p == std::vector<double>{1.0, 1.5, 2.0});
  CHECK(c.run.out_dir == "out/with # hash");
  CHECK(c.run.seed == 18446744073709551615ull);
}

TEST_CASE("emit and parse round trip") {
  ExperimentConfig c = parse_config("[curvature]\nkind = exact_family\nalpha = 1.5\n");
  c.solve.tol = 1.0 / 3.0;
  c.asymptotics.radii = {10, 100, 1000, 1e4};
  c.run.out_dir = "a b";
  const std::string text = emit_config(c);
  const ExperimentConfig back = parse_config(text);
  CHECK(emit_config(back) == text);
  CHECK(back.solve.tol == 1.0 / 3.0);
  CHECK(back.run.out_dir == "a b");
  CHECK(back.asymptotics.radii == c.asymptotics.radii);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-6) == "1e-06");
  CHECK(format_double(10000) == "10000");
}

TEST_CASE("shipped canonical config re-emits byte for byte") {
  const std::string text = slurp(std::string(GAUSSCURV_SOURCE_DIR) + "/configs/k0_probe.conf");
  REQUIRE_FALSE(text.empty());
  CHECK(emit_config(parse_config(text)) == text);
}

TEST_CASE("errors name the key and the line") {
  std::string m = config_message("[curvature]\nkind = radial_power\n[solve]\nalpah = 0.5\n");
  CHECK(contains(m, "line 4"));
  CHECK(contains(m, "solve.alpah"));
  CHECK(contains(m, "unknown key"));

  m = config_message("[curvature]\nkind = radial_power\nell = 4\nell = 5\n");
  CHECK(contains(m, "line 4"));
  CHECK(contains(m, "curvature.ell"));
  CHECK(contains(m, "line 3"));

  m = config_message("[curvature]\nkind = radial_power\n[solve]\nmax_iter = many\n");
  CHECK(contains(m, "line 4"));
  CHECK(contains(m, "solve.max_iter"));

  m = config_message("[curvature]\nkind = radial_power\n[solve]\nmax_iter = 2.5\n");
  CHECK(contains(m, "solve.max_iter"));

  m = config_message("[curvature]\nkind = radial_power\n[solve]\nalpha = -1\n");
  CHECK(contains(m, "line 4"));
  CHECK(contains(m, "solve.alpha"));

  m = config_message("[curvature]\nkind = bump_sum\nell = 2\nq = 3\n");
  CHECK(contains(m, "curvature.ell"));
  CHECK(contains(m, "curvature.q"));

  m = config_message("[curvature]\nell = 4\n");
  CHECK(contains(m, "curvature.kind"));
  m = config_message("[curvature]\nkind = spherical\n");
  CHECK(contains(m, "curvature.kind"));
  CHECK(contains(m, "spherical"));

  m = config_message("[curvature]\nkind = radial_power\n[extra]\n");
  CHECK(contains(m, "line 3"));
  CHECK(contains(m, "extra"));
  m = config_message("kind = radial_power\n");
  CHECK(contains(m, "line 1"));
  m = config_message("[curvature]\nkind radial_power\n");
  CHECK(contains(m, "line 2"));
  m = config_message("[curvature]\nkind = radial_power\n[solve]\nbracket = maybe\n");
  CHECK(contains(m, "solve.bracket"));
  m = config_message("[curvature]\nkind = radial_power\n[alphap]\np = [1, x]\n");
  CHECK(contains(m, "alphap.p"));
  m = config_message("[curvature]\nkind = radial_power\n[alphap]\np = [0.5]\n");
  CHECK(contains(m, "alphap.p"));
}

TEST_CASE("missing files are io errors") {
  try {
    load_config("/nonexistent/dir/x.conf");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("config maps onto module options") {
  ExperimentConfig c = parse_config("[curvature]\nkind = bump_sum\nell = 3\nq = 2\nn_max = 5\n[solve]\ntol = 1e-7\n");
  const CurvatureField k = build_curvature(c.curvature);
  CHECK(k.kind() == CurvatureKind::BumpSum);
  CHECK(k.n_max() == 5);
  CHECK(solver_options(c).tol == 1e-7);
  CHECK(alphap_options(c).k_max == 12);
  CHECK(verdict_thresholds(c.asymptotics).gap_floor == 0.05);
  c.curvature.kind = "radial_power";
  c.curvature.scale = 2.0;
  c.curvature.ell = 4.0;
  CHECK(build_curvature(c.curvature)({1.0, 0.0}) == doctest::Approx(-0.5));
}
