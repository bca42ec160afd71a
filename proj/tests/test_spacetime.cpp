#include <doctest.h>

#include <cmath>
#include <random>

#include "knds/errors.hpp"
#include "knds/spacetime.hpp"

using namespace knds;

namespace {

BlackHoleParams reference() {
  BlackHoleParams p;
  p.M = 1.0;
  p.Q = 0.3;
  p.a = 0.05;
  p.Lambda = 0.04;
  return p;
}

}  // namespace

TEST_CASE("horizons match the high-precision oracle") {
  const HorizonSet h = horizon_roots(reference());
  CHECK(h.r_n == doctest::Approx(-9.5296504980582059232).epsilon(1e-13));
  CHECK(h.r_c == doctest::Approx(0.047371981332573071265).epsilon(1e-12));
  CHECK(h.r_minus == doctest::Approx(2.0745202055296806631).epsilon(1e-13));
  CHECK(h.r_plus == doctest::Approx(7.4077583111959521889).epsilon(1e-13));
  CHECK(h.kappa_n == doctest::Approx(0.13817657546727189166).epsilon(1e-12));
  CHECK(h.kappa_c == doctest::Approx(-200.80342021082506206).epsilon(1e-11));
  CHECK(h.kappa_minus == doctest::Approx(0.1942279739476732982).epsilon(1e-12));
  CHECK(h.kappa_plus == doctest::Approx(-0.080770709983376073785).epsilon(1e-12));
}

TEST_CASE("tortoise coordinate matches quadrature from the photon sphere") {
  const Spacetime st(reference());
  CHECK(st.map().x(2.5) == doctest::Approx(-2.5331471987057740395).epsilon(1e-11));
  CHECK(st.map().x(4.0) == doctest::Approx(4.0353368048536022298).epsilon(1e-11));
  CHECK(st.map().x(6.0) == doctest::Approx(11.839531408217454839).epsilon(1e-11));
}

TEST_CASE("tortoise map round trip and derivative") {
  const Spacetime st(reference());
  const auto& map = st.map();
  for (double x : {-60.0, -8.0, -0.5, 0.0, 3.0, 25.0, 90.0}) {
    const RadialPoint pt = map.point(x);
    CHECK(map.x(pt) == doctest::Approx(x).epsilon(1e-12).scale(1.0));
    CHECK(pt.d_minus > 0.0);
    CHECK(pt.d_plus > 0.0);
  }
  for (double r : {2.2, 3.0, 5.0, 7.0}) {
    const double h = 1e-5;
    const double fd = (map.x(r + h) - map.x(r - h)) / (2 * h);
    CHECK(fd == doctest::Approx(map.dxdr(r)).epsilon(1e-8));
  }
}

TEST_CASE("horizon structure holds on random admissible parameters") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uQ(0.0, 0.5), ua(-0.2, 0.2), uL(0.005, 0.08);
  int tested = 0;
  while (tested < 25) {
    BlackHoleParams p;
    p.Q = uQ(rng);
    p.a = ua(rng);
    p.Lambda = uL(rng);
    if (!validate_params(p).admissible) continue;
    ++tested;
    const HorizonSet h = horizon_roots(p);
    for (double r : h.roots()) CHECK(std::abs(delta_r(p, r)) < 1e-10);
    CHECK(std::abs(h.r_n + h.r_c + h.r_minus + h.r_plus) < 1e-12);
    CHECK(h.kappa_plus < 0.0);
    CHECK(h.kappa_minus > 0.0);
    CHECK(h.r_c < h.r_minus);
    CHECK(h.r_minus < h.r_plus);
  }
}

TEST_CASE("kappa is the horizon derivative of Delta over 2(r^2+a^2)") {
  const BlackHoleParams p = reference();
  const HorizonSet h = horizon_roots(p);
  for (int i = 0; i < 4; ++i) {
    const double r = h.roots()[i];
    CHECK(h.kappas()[i] == doctest::Approx(delta_r_prime(p, r) / (2 * (r * r + p.a * p.a))).epsilon(1e-12));
  }
}

TEST_CASE("photon sphere radius at Q = 0 is 3M") {
  BlackHoleParams p;
  p.M = 1.3;
  CHECK(photon_sphere_radius(p) == doctest::Approx(3.9).epsilon(1e-14));
}

TEST_CASE("parameter validation") {
  BlackHoleParams p;
  CHECK(validate_params(p).admissible);
  p.M = 0.0;
  CHECK_THROWS_AS(validate_params(p), Error);
  p.M = 1.0;
  p.Lambda = -0.1;
  CHECK_THROWS_AS(validate_params(p), Error);
  p.Lambda = 0.5;  // 9 M^2 Lambda > 1: no exterior region
  const Admissibility ad = validate_params(p);
  CHECK_FALSE(ad.admissible);
  CHECK_FALSE(ad.violated.empty());
  CHECK_THROWS_AS(horizon_roots(p), Error);
}

TEST_CASE("coefficient functions decay at both ends") {
  const Spacetime st(reference());
  CHECK(std::abs(st.frak_a(-80.0)) < 1e-5);
  CHECK(std::abs(st.frak_a(150.0)) < 1e-4);
  CHECK(st.frak_a(0.0) > 0.0);
  const HorizonSet& h = st.horizons();
  CHECK(st.c(-200.0, 0.5) == doctest::Approx(h.Omega_minus(0.5)).epsilon(1e-9));
  CHECK(st.c(400.0, 0.5) == doctest::Approx(h.Omega_plus(0.5)).epsilon(1e-9));
}
