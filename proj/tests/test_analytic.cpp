#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "cmc/analytic.hpp"
#include "cmc/errors.hpp"

using namespace cmc::analytic;
using std::numbers::pi;

namespace {

// one ulp of the root times |psi'|: the best residual a double root can reach
double psi_residual_floor(double l) {
  const double slope = std::abs(std::sin(l) - l * std::cos(l));
  return std::max(1e-12, slope * (std::nextafter(l, 2 * l) - l));
}

template <typename F>
double bisect(F f, double lo, double hi) {
  const bool neg_lo = f(lo) < 0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * (1 + std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(mid) < 0) == neg_lo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("circle Dirichlet values") {
  CHECK(std::abs(circle_dirichlet_lambda(1, pi)) < 1e-15);
  CHECK(circle_dirichlet_lambda(2, pi) == doctest::Approx(3.0));
  CHECK(circle_dirichlet_lambda(1, 2 * pi) == doctest::Approx(-0.75));
}

TEST_CASE("psi values") {
  CHECK(std::abs(psi(2 * pi)) < 1e-14);
  CHECK(psi(pi) == doctest::Approx(4.0));
  CHECK(psi(0.0) == 0.0);
}

TEST_CASE("psi zeros") {
  CHECK(psi_zero(1) == doctest::Approx(2 * pi).epsilon(1e-12));
  CHECK(psi_zero(3) == doctest::Approx(4 * pi).epsilon(1e-12));
  CHECK(psi_zero(5) == doctest::Approx(6 * pi).epsilon(1e-12));
  const double l2 = psi_zero(2);
  CHECK(l2 > 2.5 * pi);
  CHECK(l2 < 3 * pi);
  CHECK(std::abs(psi(l2)) <= 1e-12);
  CHECK_THROWS_AS(psi_zero(0), cmc::InputError);

  const auto zeros = psi_zeros(64);
  REQUIRE(zeros.size() == 64);
  for (int k = 1; k <= 64; ++k) {
    const double l = zeros[k - 1];
    CHECK(l > k * pi);
    CHECK(l <= (k + 1) * pi * (1 + 1e-15));
    CHECK(std::abs(psi(l)) <= psi_residual_floor(l));
    if (k <= 6) CHECK(std::abs(psi(l)) <= 1e-12);
  }
}

TEST_CASE("circle twisted values") {
  CHECK(std::abs(circle_twisted_lambda(1, 2 * pi)) < 1e-14);
  for (double t = 0.5; t < 2 * pi; t += 0.37) CHECK(circle_twisted_lambda(1, t) > 0.0);
}

TEST_CASE("twisted_det reduces to psi at lambda = 0") {
  CHECK(std::abs(twisted_det(0.0, 2 * pi)) < 1e-13);
  for (int i = 0; i < 20; ++i) {
    const double t = 0.9 + 1.23 * i;
    if (std::abs(psi(t)) < 1e-3) continue;
    CHECK(twisted_det(0.0, t) / psi(t) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("twisted_det vanishes at the closed-form values") {
  for (double t : {3.0, 5.0, 8.0}) {
    CHECK(std::abs(twisted_det(circle_twisted_lambda(1, t), t)) < 1e-9);
  }
}

TEST_CASE("roots of twisted_det agree with circle_twisted_lambda") {
  for (int k = 1; k <= 8; ++k) {
    for (double t = 1.0; t <= 25.0; t += 1.5) {
      // (k + 1/2) pi < omega t < (k + 5/4) pi isolates l_k
      auto lam = [&](double s) { return (s / t) * (s / t) - 1.0; };
      const double root = bisect([&](double l) { return twisted_det(l, t); }, lam((k + 0.5) * pi),
                                 lam((k + 1.25) * pi));
      const double exact = circle_twisted_lambda(k, t);
      CHECK(std::abs(root - exact) <= 1e-9 * std::max(1.0, std::abs(exact)));
    }
  }
}

TEST_CASE("twisted_det branches join continuously") {
  const double t = 2.0;
  // series branch boundary |(1 + lambda) t^2| = 1/2
  for (double x : {0.5, -0.5}) {
    const double inside = twisted_det((x * (1 - 1e-9)) / (t * t) - 1.0, t);
    const double outside = twisted_det((x * (1 + 1e-9)) / (t * t) - 1.0, t);
    CHECK(inside == doctest::Approx(outside).epsilon(1e-7));
  }
  CHECK(twisted_det(-1.0, t) == doctest::Approx(std::pow(t, 4) / 12).epsilon(1e-14));
  // no roots below lambda = -1
  for (double lam = -1.1; lam > -50; lam -= 0.7) CHECK(twisted_det(lam, t) > 0.0);
}

TEST_CASE("Bessel function against the standard library") {
  for (int m = 0; m <= 5; ++m) {
    for (double x = 0.0; x <= 40.0; x += 0.173) {
      CHECK(std::abs(bessel_j(m, x) - std::cyl_bessel_j(static_cast<double>(m), x)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(bessel_j(-1, 1.0), cmc::InputError);
}

TEST_CASE("Bessel zeros") {
  CHECK(std::abs(bessel_zero(0, 1) - 2.404825557695773) < 1e-10);
  const double j02 = bessel_zero(0, 2);
  CHECK(j02 > 5.4);
  CHECK(j02 < 5.6);
  CHECK(std::abs(bessel_j(0, j02)) <= 1e-10);
  const double j11 = bessel_zero(1, 1);
  CHECK(j11 > 3.8);
  CHECK(j11 < 3.9);
  CHECK(std::abs(bessel_j(1, j11)) <= 1e-10);

  for (int m = 0; m <= 4; ++m) {
    for (int n = 1; n <= 6; ++n) {
      const double z = bessel_zero(m, n);
      CHECK(std::abs(bessel_j(m, z)) <= 1e-10);
      CHECK(z == doctest::Approx(boost::math::cyl_bessel_j_zero(static_cast<double>(m), n)).epsilon(1e-12));
    }
  }
  CHECK(disk_dirichlet_lambda(0, 1, 2.404825557695773) == doctest::Approx(0.0));
}

TEST_CASE("gap first eigenvalue") {
  CHECK(gap_lambda1(0.5) == 4.0);
  CHECK(gap_lambda1(1.0) == 0.25);
  CHECK(gap_lambda1(1.0 - 1e-9) == doctest::Approx(1.0));
  CHECK(gap_lambda1(1.0 - 1e-9) - gap_lambda1(1.0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(gap_lambda1(0.0), cmc::InputError);
  CHECK_THROWS_AS(gap_lambda1(1.5), cmc::InputError);
}
