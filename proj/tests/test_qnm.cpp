#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "knds/errors.hpp"
#include "knds/qnm.hpp"
#include "knds/semiclassical.hpp"

using namespace knds;

namespace {

BlackHoleParams base() {
  BlackHoleParams p;
  p.Q = 0.3;
  p.Lambda = 0.04;
  return p;
}

}  // namespace

TEST_CASE("a = 0 resonances match the Frobenius oracle") {
  const BlackHoleParams p = base();
  // k = 1/2: l_half = l
  struct Case {
    int l, m;
    cplx lambda;
  };
  const Case cases[] = {
      {5, 0, {0.7873578715994, -0.0779985074420}},
      {10, 0, {1.5762423546361, -0.0780083741274}},
      {5, 1, {0.7818517809703, -0.2344689933575}},
  };
  for (const Case& c : cases) {
    const QnmRecord r = qnm_solve(p, {0.5, c.l, c.m});
    CHECK(std::abs(r.lambda - c.lambda) < 1e-8);
    CHECK(r.residual < 1e-6);
    CHECK(r.auto_seed);
    CHECK(r.method == "wronskian");
    CHECK(r.mu == cplx(c.l, 0.0));
  }
}

TEST_CASE("overtone spacing follows alpha / z0") {
  const BlackHoleParams p = base();
  const PhotonSphereData d = photon_sphere(p);
  const QnmRecord r0 = qnm_solve(p, {0.5, 10, 0}), r1 = qnm_solve(p, {0.5, 10, 1});
  const double gap = r0.lambda.imag() - r1.lambda.imag();
  CHECK(gap == doctest::Approx(d.alpha / d.z0).epsilon(0.02));
  CHECK(r1.lambda.imag() < r0.lambda.imag());
}

TEST_CASE("negative l gives the mirrored resonance") {
  const BlackHoleParams p = base();
  const QnmRecord a = qnm_solve(p, {0.5, 5, 0}), b = qnm_solve(p, {0.5, -5, 0});
  CHECK(std::abs(b.lambda + std::conj(a.lambda)) < 1e-8);
}

TEST_CASE("k -> -k degeneracy at a = 0 is reported as a duplicate") {
  SpectrumRequest req;
  req.ks = {0.5, -0.5};
  req.ls = {5};
  req.ms = {0};
  const SpectrumTable t = spectrum_table(base(), req);
  CHECK(t.records.size() == 1);
  CHECK(t.duplicates.size() == 1);
  CHECK(t.failures.empty());
}

TEST_CASE("spectrum table is independent of the worker count") {
  BlackHoleParams p = base();
  p.a = 0.01;
  SpectrumRequest req;
  req.ks = {0.5, -0.5};
  req.ls = {4};
  req.ms = {0};
  const SpectrumTable s = spectrum_table_serial(p, req);
  const SpectrumTable q = spectrum_table(p, req, {}, 3);
  REQUIRE(s.records.size() == 2);
  REQUIRE(q.records.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(s.records[i].lambda == q.records[i].lambda);
    CHECK(s.records[i].mode.k == q.records[i].mode.k);
    CHECK(s.records[i].lambda.imag() < 0.0);
  }
  CHECK(s.records[0].lambda.real() <= s.records[1].lambda.real());
  // rotation splits the degeneracy
  CHECK(std::abs(s.records[0].lambda - s.records[1].lambda) > 1e-4);
}

TEST_CASE("a real seed moves into the lower half-plane") {
  const QnmRecord r = qnm_solve(base(), {0.5, 5, 0}, cplx(0.79, 0.0));
  CHECK_FALSE(r.auto_seed);
  CHECK(r.seed == cplx(0.79, 0.0));
  CHECK(r.lambda.imag() < 0.0);
  CHECK(std::abs(r.lambda - cplx(0.7873578715994, -0.0779985074420)) < 1e-8);
}

TEST_CASE("seed and mode guards") {
  CHECK_THROWS_AS(qnm_solve(base(), {0.5, 5, 0}, cplx(0.8, -3.0)), Error);
  CHECK_THROWS_AS(qnm_solve(base(), {0.5, 5, -1}), Error);
  CHECK_THROWS_AS(qnm_solve(base(), {0.5, 0, 0}), Error);
}

TEST_CASE("mode label and leading seed") {
  const QnmMode m{-1.5, -3, 0};
  CHECK(m.l_half() == doctest::Approx(4.0));
  const cplx s = leading_seed(base(), m);
  CHECK(s.real() < 0.0);
  CHECK(s.imag() < 0.0);
  CHECK(qnm_system(base()) == RadialSystem::Dirac2);
}

TEST_CASE("tolerance override from the environment") {
  ::setenv("QNM_TOL_OVERRIDE", "10", 1);
  const QnmOptions o = QnmOptions::from_env();
  CHECK(o.step_tol == doctest::Approx(1e-9));
  CHECK(o.residual_tol == doctest::Approx(1e-5));
  ::setenv("QNM_TOL_OVERRIDE", "abc", 1);
  CHECK_THROWS_AS(QnmOptions::from_env(), Error);
  ::setenv("QNM_TOL_OVERRIDE", "-1", 1);
  CHECK_THROWS_AS(QnmOptions::from_env(), Error);
  ::unsetenv("QNM_TOL_OVERRIDE");
  CHECK(QnmOptions::from_env().step_tol == doctest::Approx(1e-10));
}

TEST_CASE("real-axis grid stays away from zero") {
  BlackHoleParams p = base();
  p.a = 0.02;
  const RadialContext ctx(p);
  const RealGridScan s = real_axis_scan(ctx, 0.5, -5, 5, -5, 5, 8, 2);
  const RealGridScan t = real_axis_scan_serial(ctx, 0.5, -5, 5, -5, 5, 8);
  CHECK(s.evaluations == 64);
  CHECK(s.min_sine == t.min_sine);
  CHECK(s.min_sine > 1e-6);
}
