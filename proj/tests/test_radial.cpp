#include <doctest.h>

#include <cmath>
#include <functional>

#include "gausscurv/error.hpp"
#include "gausscurv/radial.hpp"
#include "gausscurv/solver.hpp"

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

}  // namespace

TEST_CASE("shooting from c0 = 0 reproduces the exact family") {
  for (double alpha : {0.5, 1.0}) {
    const ExactFamily fam = make_exact_family(alpha);
    const RadialProfile p = radial_shoot(fam.field, 0.0, 1e3);
    double err = 0.0;
    for (double r = 0.0; r <= 1e3; r += 0.37) err = std::max(err, std::abs(p(r) - fam.reference_radial(r)));
    CHECK(err < 1e-9);
    CHECK(p.alpha_limit() == doctest::Approx(alpha).epsilon(1e-6));
    // r u' = alpha r^2 / (1 + r^2)
    CHECK(p.flux(2.0) == doctest::Approx(alpha * 0.8).epsilon(1e-8));
  }
}

TEST_CASE("flat curvature keeps the initial value") {
  const RadialProfile p = radial_shoot([](double) { return 0.0; }, 1.25, 100.0);
  CHECK(p(0.0) == 1.25);
  CHECK(p(50.0) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(std::abs(p.alpha_attained()) < 1e-14);
  CHECK(p.c0() == 1.25);
}

TEST_CASE("attained alpha increases with c0") {
  const auto k = CurvatureField::radial_power(1.0, 4.0);
  double prev = -1.0;
  for (double c0 : {-3.0, -2.0, -1.0, -0.5, -0.3}) {
    const double a = radial_shoot(k, c0, 1e5).alpha_limit();
    CHECK(a > prev);
    CHECK(a > 0.0);
    prev = a;
  }
}

TEST_CASE("bisection on c0 hits the target") {
  const RadialProfile e = radial_solve_for_alpha(CurvatureField::exact_family(1.0), 1.0);
  CHECK(std::abs(e.c0()) < 1e-6);
  const auto k = CurvatureField::radial_power(1.0, 4.0);
  const RadialProfile lo = radial_solve_for_alpha(k, 0.3);
  const RadialProfile hi = radial_solve_for_alpha(k, 0.6);
  CHECK(lo.alpha_limit() == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(hi.alpha_limit() == doctest::Approx(0.6).epsilon(1e-8));
  // Larger alpha lies strictly above at every radius.
  for (double r : {0.0, 0.5, 1.0, 10.0, 1e3, 5e4}) CHECK(lo(r) < hi(r));
}

TEST_CASE("shooting agrees with the Picard solution") {
  const auto k = CurvatureField::radial_power(1.0, 4.0);
  const RadialProfile q = radial_solve_for_alpha(k, 0.5);
  const SolutionField s = picard_solve(k, 0.5);
  double d = 0.0;
  for (double r = 0.0; r <= 10.0; r += 0.05) d = std::max(d, std::abs(s.u(polar(r, 0.7)) - q(r)));
  CHECK(d < 1e-5);
}

TEST_CASE("radial error kinds") {
  const auto k = CurvatureField::radial_power(1.0, 4.0);
  CHECK(kind_of([&] { radial_shoot(k, NAN, 10.0); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { radial_shoot(k, 0.0, 1e-7); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { radial_solve_for_alpha(k, 1.5); }) == ErrorKind::Parameter);
  CHECK(kind_of([&] { radial_solve_for_alpha(k, -0.1); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { radial_shoot(make_k0(3.0, 2.0, 4), 0.0, 10.0); }) == ErrorKind::Contract);
  // Large c0 blows up for nonpositive curvature.
  CHECK(kind_of([&] { radial_shoot(k, 5.0, 1e3); }) == ErrorKind::Integration);
  const RadialProfile p = radial_shoot(k, 0.0, 10.0);
  CHECK(kind_of([&] { p(20.0); }) == ErrorKind::Domain);
}
