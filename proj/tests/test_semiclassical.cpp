#include <doctest.h>

#include <cmath>
#include <vector>

#include "knds/errors.hpp"
#include "knds/semiclassical.hpp"

using namespace knds;

namespace {

BlackHoleParams base(double a = 0.0, double Q = 0.3) {
  BlackHoleParams p;
  p.Q = Q;
  p.a = a;
  p.Lambda = 0.04;
  return p;
}

}  // namespace

TEST_CASE("photon sphere at Q = 0") {
  const PhotonSphereData d = photon_sphere(base(0.0, 0.0));
  CHECK(d.r0 == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(d.F0 == doctest::Approx(1.0 / 3.0 - 3.0 * 0.04).epsilon(1e-14));
  CHECK(d.z0 == doctest::Approx(0.15396007178390020387).epsilon(1e-14));
}

TEST_CASE("photon sphere is a critical point of F / r^2") {
  const PhotonSphereData d = photon_sphere(base());
  CHECK(std::abs(d.dF0 * d.r0 - 2.0 * d.F0) < 1e-14);
  CHECK(d.z0 == doctest::Approx(std::sqrt(d.F0) / d.r0).epsilon(1e-14));
  CHECK_THROWS_AS(photon_sphere(base(0.0, 1.1)), Error);
}

TEST_CASE("Kerr-de Sitter constants") {
  const KerrDsCheck c = kerr_ds_check(base());
  const double w = 1.0 - 9.0 * 0.04;
  CHECK(c.coef_l2 == doctest::Approx(27.0 / w).epsilon(1e-12));
  CHECK(c.coef_alk == doctest::Approx(-6.0 / w).epsilon(1e-12));
  CHECK(c.split == doctest::Approx(-1.0 / (std::sqrt(3.0) * std::sqrt(w))).epsilon(1e-12));
  CHECK(c.max_rel_error < 1e-12);
}

TEST_CASE("leading formula refuses rotation") {
  CHECK_NOTHROW(leading_qnm(base(), 5.0, 0));
  CHECK_THROWS_AS(leading_qnm(base(0.01), 5.0, 0), Error);
  const PhotonSphereData d = photon_sphere(base());
  const cplx l = leading_qnm(base(), 5.0, 1);
  CHECK(l.real() == doctest::Approx(5.0 * d.z0));
  CHECK(l.imag() == doctest::Approx(-1.5 * d.alpha / d.z0));
  const cplx bracket = -d.alpha / (4.0 * d.z0 * d.z0) * 3.0;
  CHECK(std::abs(next_order_qnm(base(), 5.0, 1, 0.0, 0.0) - (l - (d.alpha / d.z0) * 1.5 / 5.0 * bracket)) < 1e-15);
  const cplx shift = next_order_qnm(base(), 5.0, 1, 0.0, cplx(0.0, 1.0)) - next_order_qnm(base(), 5.0, 1, 0.0, 0.0);
  CHECK(std::abs(shift - cplx(0.0, -1.0) * (d.alpha / d.z0) * 1.5 / 5.0 * cplx(0.0, 1.0)) < 1e-15);
}

TEST_CASE("angular frequency sample matches direct substitution") {
  CHECK(bottom_well(base(0.02), 1.0, 1.5) == doctest::Approx(0.99909498186666666667).epsilon(1e-14));
  CHECK(angular_omega_squared(base(0.02), 1.0, 1.5, 0, 0.1) == doctest::Approx(1.0408647751439050962).epsilon(1e-14));
  CHECK_THROWS_AS(angular_omega_squared(base(0.02), 0.0, 100.0, 0, 0.1), Error);
}

TEST_CASE("angular symbol at the edge") {
  const AngularSymbol s = angular_symbol(base(0.02), 1.5, 1.0, -1);
  const double v = base(0.02).E() - 0.02 * 1.5;
  CHECK(s.value == doctest::Approx(v * v));
  CHECK(s.dl_edge == doctest::Approx(-2.0));
  CHECK(s.dk_edge == doctest::Approx(-0.06));
}

TEST_CASE("trapping at a = 0 reproduces the photon sphere") {
  const BlackHoleParams p = base();
  const TrappedFrequency t = trapped_frequency(p, 1.5, 1.0);
  CHECK(t.r_trap == doctest::Approx(photon_sphere(p).r0).epsilon(1e-12));
  CHECK(t.omega0 == doctest::Approx(radial_symbol(p, 1.5, 1.0, 1)).epsilon(1e-12));
  CHECK(t.x_trap == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_CASE("trapping radius at a = 0.02 matches a direct maximization") {
  const TrappedFrequency t = trapped_frequency(base(0.02), 1.5, 1.0);
  CHECK(t.r_trap == doctest::Approx(2.9365552720434188497).epsilon(1e-11));
  CHECK(t.omega0 == doctest::Approx(9.4980662123903868589).epsilon(1e-11));
}

TEST_CASE("trapping expansion error is quadratic in a") {
  std::vector<double> la, le;
  for (double a : {0.005, 0.01, 0.02, 0.04}) {
    const TrappedFrequency t = trapped_frequency(base(a), 1.5, 1.0);
    la.push_back(std::log(a));
    le.push_back(std::log(std::abs(t.r_trap - t.r_expansion)));
  }
  const int n = static_cast<int>(la.size());
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) mx += la[i] / n, my += le[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxy += (la[i] - mx) * (le[i] - my);
    sxx += (la[i] - mx) * (la[i] - mx);
    syy += (le[i] - my) * (le[i] - my);
  }
  const double slope = sxy / sxx;
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
  CHECK(sxy * sxy / (sxx * syy) > 0.99);
}

TEST_CASE("beta0 vanishes at the trapped frequency and is symmetric") {
  for (double a : {0.01, 0.02}) {
    const BlackHoleParams p = base(a);
    const double w = trapped_frequency(p, 1.5, 1.0).omega0;
    CHECK(std::abs(beta0(p, 1.5, w, 1.0, 1)) < 1e-10);
    CHECK(beta0(p, 1.5, 0.9 * w, 1.0, -1) == doctest::Approx(beta0(p, -1.5, 0.9 * w, -1.0, 1)).epsilon(1e-10));
  }
}

TEST_CASE("Zeeman slopes") {
  const ZeemanSlopes z0 = zeeman_slopes(base());
  CHECK(z0.minus == 0.0);
  CHECK(z0.plus == 0.0);
  const BlackHoleParams p = base(0.02);
  const PhotonSphereData d = photon_sphere(p);
  const ZeemanSlopes z = zeeman_slopes(p);
  CHECK(z.minus == doctest::Approx(p.a / (d.r0 * d.r0) - p.a * d.z0 * d.z0).epsilon(1e-12));
  CHECK(z.flipped == doctest::Approx(-(p.a / (d.r0 * d.r0)) - p.a * d.z0 * d.z0).epsilon(1e-12));
}

TEST_CASE("combined quantization") {
  const BlackHoleParams p0 = base();
  const CombinedQuantization c0 = combined_quantization(p0, 1.5, 1);
  CHECK(c0.lambda == doctest::Approx(photon_sphere(p0).z0 * 1.5).epsilon(1e-13));
  CHECK(c0.edge == 1);
  for (double a : {0.01, 0.02}) {
    const BlackHoleParams p = base(a);
    for (double kt : {1.0, 2.5}) {
      const CombinedQuantization up = combined_quantization(p, kt, 1);
      const CombinedQuantization dn = combined_quantization(p, -kt, -1);
      CHECK(up.lambda + dn.lambda == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
      CHECK(up.slope == doctest::Approx(zeeman_slopes(p).minus).epsilon(1e-12));
      const double h = 1e-5;
      const double fd = (combined_quantization(p, kt + h, 1).lambda - combined_quantization(p, kt - h, 1).lambda) / (2 * h);
      CHECK(fd - photon_sphere(p).z0 == doctest::Approx(up.slope).epsilon(1e-3));
    }
  }
}
