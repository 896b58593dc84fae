#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "gausscurv/curvature.hpp"
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

// Composite Simpson on [a, b] with n (even) intervals.
template <class F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("radial power evaluates the closed form") {
  const auto k = CurvatureField::radial_power(1.0, 4.0);
  CHECK(k({1.0, 0.0}) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(k({0.6, 0.8}) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(k.radial(3.0) == doctest::Approx(-1.0 / 100.0).epsilon(1e-14));
  CHECK(k.is_radial());
}

TEST_CASE("radial power rejects bad parameters") {
  CHECK(kind_of([] { CurvatureField::radial_power(1.0, 2.0); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { CurvatureField::radial_power(-1.0, 4.0); }) == ErrorKind::Parameter);
}

TEST_CASE("exact family solves the equation by substitution") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const ExactFamily fam = make_exact_family(alpha);
    CHECK(fam.field({0.0, 0.0}) == doctest::Approx(-2.0 * alpha));
    // Five-point Laplacian of the reference against -K e^{2u}.
    for (double r : {0.3, 1.0, 2.5, 7.0}) {
      const Point2 x = polar(r, 0.7);
      const double h = 1e-3 * std::max(1.0, r);
      const double lap = (fam.reference({x.x + h, x.y}) + fam.reference({x.x - h, x.y}) +
                          fam.reference({x.x, x.y + h}) + fam.reference({x.x, x.y - h}) - 4.0 * fam.reference(x)) /
                         (h * h);
      const double src = fam.field(x) * std::exp(2.0 * fam.reference(x));
      CHECK(std::abs(lap + src) <= 1e-5 * std::max(1.0, std::abs(src)) + 1e-7);
    }
    // Total curvature -2 alpha pi, integrated in s = ln r.
    const double total = simpson(
        [&](double s) {
          const double r = std::exp(s);
          return kTwoPi * r * r * fam.field({r, 0.0}) * std::exp(2.0 * fam.reference_radial(r));
        },
        -30.0, 30.0, 20000);
    CHECK(total == doctest::Approx(fam.total_curvature()).epsilon(1e-8));
    CHECK(fam.total_curvature() == doctest::Approx(-2.0 * alpha * kPi));
  }
  CHECK(make_exact_family(1.0).reference({1.0, 0.0}) == doctest::Approx(0.5 * std::log(2.0)));
  CHECK(kind_of([] { make_exact_family(0.0); }) == ErrorKind::Parameter);
}

TEST_CASE("cutoff profile sandwich and smoothness") {
  CHECK(eta0(0.0) == 1.0);
  CHECK(eta0(0.4) == 1.0);
  CHECK(eta0(0.5) == 1.0);
  CHECK(eta0(1.0) == 0.0);
  CHECK(eta0(1.2) == 0.0);
  CHECK(eta0(0.75) > 0.0);
  CHECK(eta0(0.75) < 1.0);
  CHECK(eta0(0.75) >= eta0(0.8));
  double prev = 1.0;
  for (int i = 0; i <= 4000; ++i) {
    const double t = 1.5 * i / 4000.0;
    const double v = eta0(t);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v <= prev);
    prev = v;
  }
  // Second differences stay small near the joins (C2 at least).
  for (double t : {0.5, 1.0}) {
    const double h = 1e-3;
    const double d2 = (eta0(t + h) - 2.0 * eta0(t) + eta0(t - h)) / (h * h);
    CHECK(std::abs(d2) < 1e-3);
  }
}

TEST_CASE("disk moments of the cutoff") {
  const double m1 = simpson([](double t) { return kTwoPi * t * eta0(t); }, 0.0, 1.0, 4000);
  CHECK(eta0_disk_moment(1.0) == doctest::Approx(m1).epsilon(1e-9));
  const double m2 = simpson([](double t) { return kTwoPi * t * eta0(t) * eta0(t); }, 0.0, 1.0, 4000);
  CHECK(eta0_disk_moment(2.0) == doctest::Approx(m2).epsilon(1e-9));
  CHECK(eta0_disk_moment(1.0) > kPi / 4.0);
  CHECK(eta0_disk_moment(1.0) < kPi);
}

TEST_CASE("k0 bump list in log form") {
  const auto k = make_k0(3.0, 2.0, 6);
  REQUIRE(k.bumps().size() == 5);
  const double expected[] = {-4, -9, -16, -25, -36};
  for (std::size_t i = 0; i < 5; ++i) {
    const BumpSpec& b = k.bumps()[i];
    const int n = static_cast<int>(i) + 2;
    CHECK(b.index == n);
    CHECK(b.center == Point2{static_cast<double>(n), 0.0});
    CHECK(b.log_radius == expected[i]);
    CHECK(b.log_radius < std::log(0.25));
    // amplitude * radius^2 = n^-ell
    CHECK(std::exp(b.log_mass_scale()) == doctest::Approx(std::pow(n, -3.0)).epsilon(1e-12));
  }
  CHECK(kind_of([] { make_k0(2.0, 2.0, 4); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { make_k0(3.0, 1.0, 4); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { make_k0(3.0, 2.0, 1); }) == ErrorKind::Parameter);
}

TEST_CASE("k0 local frame values") {
  const auto k = make_k0(3.0, 2.0, 6);
  // Bump 2 center: amplitude r_2^{-2} 2^{-3} = e^8 / 8.
  CHECK(k.eval_local(0, {0.0, 0.0}) == doctest::Approx(-std::exp(8.0) / 8.0).epsilon(1e-13));
  CHECK(k.eval_local(0, {0.0, 0.0}) == doctest::Approx(-372.6198).epsilon(1e-6));
  CHECK(k({2.5, 0.0}) == 0.0);
  CHECK(k({0.0, 0.0}) == 0.0);
  // Local and global evaluation agree where the global point is representable.
  for (int slot : {0, 1}) {
    const BumpSpec& b = k.bumps()[slot];
    for (double zr : {0.0, 0.3, 0.6, 0.9, 1.5}) {
      const Point2 z = polar(zr, 0.4);
      const Point2 x = b.center + b.radius() * z;
      const double local = k.eval_local(slot, z);
      const double direct = -std::exp(b.log_amplitude) * eta0(zr);
      CHECK(local == doctest::Approx(direct).epsilon(1e-12));
      if (zr < 1.0 - 1e-6) CHECK(k(x) == doctest::Approx(local).epsilon(1e-6));
    }
  }
  // Exact zero just outside each support.
  for (const BumpSpec& b : k.bumps()) {
    if (b.index > 3) break;
    CHECK(k(b.center + Point2{1.01 * b.radius(), 0.0}) == 0.0);
  }
}

TEST_CASE("nonpositivity on random samples") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  const CurvatureField fields[] = {CurvatureField::radial_power(2.0, 3.0), CurvatureField::exact_family(1.5),
                                   make_k0(3.0, 2.0, 6)};
  for (const auto& k : fields) {
    for (int i = 0; i < 10000; ++i) CHECK_LE(k({u(gen), u(gen)}), 0.0);
  }
}

TEST_CASE("truncation mass bound dominates the neglected bumps") {
  const auto k = make_k0(3.0, 2.0, 6);
  double neglected = 0.0;
  for (int n = 7; n < 200000; ++n) neglected += std::pow(n, -3.0);
  neglected *= eta0_disk_moment(1.0);
  CHECK(k.truncation_mass_bound() >= neglected);
  CHECK(k.truncation_mass_bound() < 2.0 * neglected);
}

TEST_CASE("grid sampled field") {
  const std::string text =
      "x y K\n"
      "0 0 -1\n1 0 -2\n0 1 -3\n1 1 -4\n";
  const auto k = CurvatureField::grid_sampled(parse_grid_samples(text));
  CHECK(k({0.0, 0.0}) == -1.0);
  CHECK(k({1.0, 1.0}) == -4.0);
  CHECK(k({0.5, 0.5}) == doctest::Approx(-2.5));
  CHECK_FALSE(k.is_radial());
  CHECK(kind_of([&] { k({2.0, 0.0}); }) == ErrorKind::Domain);
  CHECK(k.eval_extended({2.0, 0.0}) == 0.0);
  CHECK(kind_of([] { parse_grid_samples("x y K\n0 0 -1\n1 0 -1\n"); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { CurvatureField::grid_sampled(parse_grid_samples("x y K\n0 0 0\n1 0 0\n0 1 0\n1 1 0\n")); }) ==
        ErrorKind::Parameter);
  CHECK(kind_of([] { read_grid_samples("/nonexistent/grid.txt"); }) == ErrorKind::Io);
}

TEST_CASE("scaling and identity") {
  const auto k = CurvatureField::radial_power(1.0, 4.0);
  const auto k2 = k.scaled(3.0);
  CHECK(k2({1.0, 0.0}) == doctest::Approx(-0.75));
  CHECK(k.same_as(CurvatureField::radial_power(1.0, 4.0)));
  CHECK_FALSE(k.same_as(k2));
  CHECK_FALSE(k.same_as(CurvatureField::radial_power(1.0, 5.0)));
  CHECK(kind_of([&] { k.scaled(0.0); }) == ErrorKind::Parameter);
  CHECK(kind_of([] { make_k0(3.0, 2.0, 4).radial(1.0); }) == ErrorKind::Contract);
}
