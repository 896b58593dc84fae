#include <doctest.h>

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "gausscurv/asymptotics.hpp"
#include "gausscurv/error.hpp"

using namespace gcurv;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

const std::vector<double> kRadii{50, 100, 200, 500, 1000, 2000, 5000};
const std::vector<double> kDecayRadii{5, 10, 20, 40, 80};

}  // namespace

TEST_CASE("log growth fit recovers exact coefficients") {
  const GrowthFit f =
      fit_log_growth([](Point2 x) { return 0.7 * std::log(norm(x)) + 1.3 + 2.0 / norm(x); }, kRadii, 16);
  CHECK(f.alpha == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(f.c == doctest::Approx(1.3).epsilon(1e-10));
  CHECK(f.d == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(f.residual < 1e-10);
  CHECK(f.max_angular_deviation < 1e-12);
  CHECK_FALSE(f.anisotropic);
  CHECK(f.means.size() == kRadii.size());
}

TEST_CASE("angular dependence is flagged") {
  const GrowthFit f = fit_log_growth([](Point2 x) { return std::log(norm(x)) + 0.5 * x.x / norm(x); }, kRadii, 16);
  CHECK(f.anisotropic);
  CHECK(f.max_angular_deviation == doctest::Approx(0.5).epsilon(0.02));
  CHECK(f.alpha == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f.alpha_delta > 0.0);
}

TEST_CASE("fit input checks") {
  auto u = [](Point2 x) { return std::log(norm(x)); };
  const std::vector<double> short_span{100, 200, 500, 1000, 5000};
  CHECK(kind_of([&] { fit_log_growth(u, short_span, 16); }) == ErrorKind::Parameter);
  const std::vector<double> three{10, 100, 1000};
  CHECK(kind_of([&] { fit_log_growth(u, three, 16); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { fit_log_growth(u, kRadii, 0); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { remainder_decay_exponent(u, 1.0, 0.0, kDecayRadii, 0.0); }) == ErrorKind::Parameter);
}

TEST_CASE("remainder decay exponent") {
  const DecayFit d = remainder_decay_exponent(
      [](Point2 x) { return 0.5 * std::log(norm(x)) - 0.2 + 3.0 * std::pow(norm(x), -0.4); }, 0.5, -0.2, kDecayRadii,
      0.25);
  CHECK_FALSE(d.floor);
  CHECK(d.gamma == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(d.target == doctest::Approx(1.0 / 3.0));
  const DecayFit z = remainder_decay_exponent([](Point2 x) { return std::log(norm(x)); }, 1.0, 0.0, kDecayRadii, 0.5);
  CHECK(z.floor);
}

TEST_CASE("radial solutions have no anisotropy") {
  const SolutionField s = picard_solve(CurvatureField::radial_power(1.0, 4.0), 0.5);
  const auto gaps = anisotropy_probe(s, 3, 6);
  REQUIRE(gaps.size() == 4);
  for (const auto& g : gaps) {
    CHECK(std::abs(g.gap) <= 1e-6);
    CHECK(g.gap == doctest::Approx(g.xi_plus - g.xi_minus));
  }
  const GrowthFit f = fit_log_growth([&](Point2 x) { return s.u(x); }, kRadii, 16);
  CHECK(f.alpha == doctest::Approx(0.5).epsilon(1e-4));
  CHECK_FALSE(f.anisotropic);
}

TEST_CASE("probe preconditions") {
  const auto k = CurvatureField::radial_power(1.0, 4.0);
  const SolutionField raw(k, 0.5, 0.0, SourceField{}, {}, SolveInfo{}, std::nullopt);
  CHECK(kind_of([&] { anisotropy_probe(raw, 3, 6); }) == ErrorKind::Contract);
  const auto k0 = make_k0(3.0, 2.0, 6);
  CHECK(kind_of([&] { growth_probe(k0, 0.5, 3, 6); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { growth_probe(k0, 0.3, 3, 6); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { growth_probe(k0, 0.7, 3, 3); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { growth_probe(k, 0.7, 3, 6); }) == ErrorKind::Contract);
}

TEST_CASE("growth model of the bump self-term") {
  const auto k0 = make_k0(3.0, 2.0, 6);
  const GrowthModel m = growth_probe(k0, 0.7, 3, 6);
  CHECK(m.exponent == doctest::Approx(0.4));
  CHECK_FALSE(m.low_confidence);
  REQUIRE(m.samples.size() == 4);
  const double c = eta0_disk_moment(1.0) / kTwoPi;
  for (const auto& s : m.samples) {
    CHECK(std::exp(s.log_self) == doctest::Approx(c * std::pow(s.n, 0.4)).epsilon(1e-12));
    CHECK(s.model_ratio == doctest::Approx(c * std::pow(s.n, 0.4) / std::log(s.n)).epsilon(1e-12));
  }
  // n^0.4 / ln n only starts increasing past e^{2.5}.
  CHECK_FALSE(m.increasing);
  CHECK(growth_probe(k0, 0.7, 13, 40).increasing);
  CHECK(growth_probe(k0, 0.55, 3, 6).low_confidence);
}

TEST_CASE("solutions for larger alpha lie above") {
  const auto k = CurvatureField::radial_power(1.0, 4.0);
  const SolutionField lo = picard_solve(k, 0.3);
  const SolutionField hi = picard_solve(k, 0.5);
  const auto pts = check_points(0.1, 1000.0, 10, 6);
  const LayerReport r = layer_check(lo, hi, pts);
  CHECK(r.ordered);
  CHECK(r.min_margin > 0.0);
  CHECK_FALSE(layer_check(hi, lo, pts).ordered);
  const SolutionField other = picard_solve(CurvatureField::exact_family(1.0), 0.5);
  CHECK(kind_of([&] { layer_check(lo, other, pts); }) == ErrorKind::Contract);
  CHECK(kind_of([&] { layer_check(lo, hi, {}); }) == ErrorKind::Parameter);
}

TEST_CASE("verdict classification") {
  const VerdictThresholds th;
  VerdictInput uni{0.3, 0.5, 0.3, {0.04, 0.02, 0.009}, {}};
  Verdict v = classify(uni, th);
  CHECK(v.expected == "uniform");
  CHECK(v.tag == "uniform");

  VerdictInput mid{0.5, 0.5, 0.51, {-1.8, -1.7, -1.6}, {}};
  v = classify(mid, th);
  CHECK(v.expected == "anisotropic-bounded");
  CHECK(v.tag == "anisotropic-bounded");
  mid.alpha_hat = 0.55;
  CHECK(classify(mid, th).tag == "inconclusive");

  VerdictInput up{0.7, 0.5, 0.7, {-2.5, -2.4, -2.3}, {0.3, 0.35, 0.4}};
  v = classify(up, th);
  CHECK(v.expected == "unbounded");
  CHECK(v.tag == "unbounded");
  up.ratios = {0.4, 0.35, 0.33};
  CHECK(classify(up, th).tag == "anisotropic-bounded");
  VerdictThresholds strict = th;
  strict.ratio_step = 0.1;
  up.ratios = {0.3, 0.35, 0.4};
  CHECK(classify(up, strict).tag == "anisotropic-bounded");
}
