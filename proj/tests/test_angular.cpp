#include <doctest.h>

#include <cmath>

#include "knds/angular.hpp"
#include "knds/errors.hpp"

using namespace knds;

namespace {

BlackHoleParams with_a(double a) {
  BlackHoleParams p;
  p.Q = 0.3;
  p.a = a;
  p.Lambda = 0.04;
  return p;
}

}  // namespace

TEST_CASE("a = 0 spectrum is sgn(l)(|k| - 1/2 + |l|)") {
  const BlackHoleParams p = with_a(0.0);
  for (double k : {-4.5, -1.5, -0.5, 0.5, 2.5, 4.5})
    for (int l : {-8, -3, -1, 1, 2, 8}) {
      const AngularEigenvalue e = eigenvalue(p, {k, l}, cplx(1.7, -0.3));
      CHECK(std::abs(e.mu - exact_eigenvalue_a0({k, l})) < 1e-10);
    }
}

TEST_CASE("eigenvalues match the shooting oracle") {
  struct Case {
    double k;
    int l;
    cplx lambda;
    double a;
    cplx mu;
  };
  const Case cases[] = {
      {0.5, 1, 1.5, 0.05, 0.950443063712932},
      {1.5, -2, 1.5, 0.05, -2.961821798304064},
      {0.5, 2, cplx(1.5, -0.1), 0.05, cplx(1.980714898816739, 0.001239473566493)},
      {-2.5, 3, 0.8, 0.1, 5.040934205420042},
  };
  for (const Case& c : cases) {
    const AngularEigenvalue e = eigenvalue(with_a(c.a), {c.k, c.l}, c.lambda);
    CHECK(std::abs(e.mu - c.mu) < 1e-10);
  }
}

TEST_CASE("branch symmetry mu_{k,-l} = -mu_{kl} and bounds for real lambda") {
  const BlackHoleParams p = with_a(0.05);
  for (double lambda = -5.0; lambda <= 5.0; lambda += 2.5)
    for (double k : {-1.5, 0.5})
      for (int l : {1, 2}) {
        const cplx up = eigenvalue(p, {k, l}, lambda).mu;
        const cplx dn = eigenvalue(p, {k, -l}, lambda).mu;
        CHECK(std::abs(up + dn) < 1e-10);
        const MuBounds b = mu_bounds(p, {k, l}, lambda);
        CHECK(up.real() >= b.lower);
        CHECK(up.real() <= b.upper);
        CHECK(std::abs(up.imag()) < 1e-12);
      }
}

TEST_CASE("Galerkin matrix is Hermitian for real lambda") {
  const AngularDiscretization d = discretize(with_a(0.05), 0.5, 3.0, 32);
  CHECK((d.matrix - d.matrix.adjoint()).norm() < 1e-10 * d.matrix.norm());
}

TEST_CASE("Galerkin derivative matches a finite difference in lambda") {
  const BlackHoleParams p = with_a(0.05);
  const cplx lam(1.2, -0.4), h(1e-6, 0.0);
  const auto dp = discretize(p, 1.5, lam + h, 16), dm = discretize(p, 1.5, lam - h, 16), d0 = discretize(p, 1.5, lam, 16);
  const Eigen::MatrixXcd fd = (dp.matrix - dm.matrix) / (2.0 * h);
  CHECK((fd - d0.dmatrix).norm() < 1e-7 * (1.0 + d0.dmatrix.norm()));
}

TEST_CASE("squared operator reproduces mu^2") {
  const BlackHoleParams p = with_a(0.02);
  for (int l : {1, 2}) CHECK(squared_operator_check(p, {0.5, l}, 3.0) < 1e-9);
}

TEST_CASE("massive shift is bounded by |a| mass") {
  BlackHoleParams p = with_a(0.02);
  const cplx lam(3.0, -0.2);
  const cplx mu0 = eigenvalue(p, {0.5, 1}, lam).mu;
  p.m = 0.1;
  const AngularEigenvalue e = eigenvalue(p, {0.5, 1}, lam);
  CHECK(std::abs(e.mu - mu0) <= std::abs(p.a) * p.m + 1e-12);
  CHECK(std::abs(e.mu - mu0) > 0.0);
}

TEST_CASE("continuation reports an error estimate and nearest-eigenvalue agrees") {
  const BlackHoleParams p = with_a(0.05);
  const AngularEigenvalue e = eigenvalue(p, {0.5, 2}, cplx(2.0, -0.3));
  CHECK(e.est_error < 1e-9);
  CHECK(e.continuation_distance > 0.0);
  CHECK(std::abs(eigenvalue_near(p, 0.5, cplx(2.0, -0.3), e.mu) - e.mu) < 1e-10);
}

TEST_CASE("mode checks") {
  CHECK_THROWS_AS(check_mode({1.0, 1}), Error);
  CHECK_THROWS_AS(check_mode({0.5, 0}), Error);
  CHECK_NOTHROW(check_mode({-3.5, -2}));
}
