#include <doctest.h>

#include <cmath>
#include <numbers>

#include "knds/series.hpp"
#include "knds/special.hpp"

using namespace knds;
namespace S = knds::series;

TEST_CASE("series exp and log are inverse") {
  const S::Series a{0.3, 1.0, -0.5, 0.25, 0.1};
  const S::Series b = S::log(S::exp(a, 12), 12);
  for (int i = 0; i < 5; ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-14).scale(1.0));
  for (int i = 5; i < 12; ++i) CHECK(std::abs(b[i]) < 1e-13);
}

TEST_CASE("series reciprocal of 1 - x is geometric") {
  const S::Series r = S::recip({1.0, -1.0}, 10);
  for (double c : r) CHECK(c == doctest::Approx(1.0));
}

TEST_CASE("series power matches the binomial series") {
  const S::Series r = S::pow({1.0, 1.0}, 0.5, 6);
  const double expect[] = {1.0, 0.5, -0.125, 0.0625, -0.0390625, 0.02734375};
  for (int i = 0; i < 6; ++i) CHECK(r[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("series reversion of x + x^2") {
  const int n = 12;
  const S::Series g{0.0, 1.0, 1.0};
  const S::Series s = S::revert(g, n);
  const S::Series id = S::compose(g, s, n);
  CHECK(id[1] == doctest::Approx(1.0));
  for (int i = 2; i < n; ++i) CHECK(std::abs(id[i]) < 1e-12);
  // Catalan numbers with alternating sign
  CHECK(s[2] == doctest::Approx(-1.0));
  CHECK(s[3] == doctest::Approx(2.0));
  CHECK(s[4] == doctest::Approx(-5.0));
  CHECK(s[5] == doctest::Approx(14.0));
}

TEST_CASE("series evaluation and derivative") {
  const S::Series a{1.0, 2.0, 3.0};
  CHECK(S::evaluate(a, 2.0) == doctest::Approx(17.0));
  const S::Series d = S::derivative(a);
  CHECK(d.size() == 2);
  CHECK(d[1] == doctest::Approx(6.0));
  const S::Series r = S::rescale(a, 0.5);
  CHECK(r[2] == doctest::Approx(0.75));
}

TEST_CASE("series guards") {
  CHECK_THROWS(S::recip({0.0, 1.0}, 4));
  CHECK_THROWS(S::log({-1.0, 1.0}, 4));
  CHECK_THROWS(S::compose({1.0}, {1.0, 1.0}, 4));
  CHECK_THROWS(S::revert({0.0, 0.0, 1.0}, 4));
}

TEST_CASE("complex log Gamma") {
  for (double x : {0.5, 1.0, 2.5, 7.25, 20.0}) CHECK(lgamma(cplx(x, 0.0)).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
  // |Gamma(1 + i)|^2 = pi / sinh(pi)
  const double lhs = 2.0 * lgamma(cplx(1.0, 1.0)).real();
  CHECK(lhs == doctest::Approx(std::log(std::numbers::pi / std::sinh(std::numbers::pi))).epsilon(1e-13));
  for (cplx z : {cplx(0.3, 2.0), cplx(-2.7, 0.4), cplx(5.0, -3.0)}) {
    const cplx step = lgamma(z + 1.0) - lgamma(z) - std::log(z);
    CHECK(std::abs(std::exp(step) - 1.0) < 1e-13);
  }
}

TEST_CASE("reciprocal Gamma flags the poles") {
  for (int n : {0, -1, -2, -7}) CHECK(log_rgamma(cplx(n, 0.0)).is_zero);
  CHECK_FALSE(log_rgamma(cplx(-1.0, 1e-6)).is_zero);
  CHECK_FALSE(log_rgamma(cplx(1.0, 0.0)).is_zero);
}
