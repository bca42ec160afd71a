#include "knds/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "knds/errors.hpp"

namespace knds {

namespace {

double delta_r_second(const BlackHoleParams& p, double r) {
  return 2.0 - 4.0 * p.Lambda * r * r - 2.0 * p.Lambda * p.a * p.a / 3.0;
}

// Value and first two r-derivatives.
struct Jet {
  double f = 0, d1 = 0, d2 = 0;
};

// frak_a = sqrt(Delta_r) / (r^2 + a^2)
Jet frak_a_jet(const BlackHoleParams& p, double r) {
  const double D = delta_r(p, r), D1 = delta_r_prime(p, r), D2 = delta_r_second(p, r);
  const double s = std::sqrt(D), s1 = D1 / (2.0 * s), s2 = (2.0 * D * D2 - D1 * D1) / (4.0 * D * s);
  const double rho2 = r * r + p.a * p.a;
  const double u = 1.0 / rho2, u1 = -2.0 * r / (rho2 * rho2), u2 = (6.0 * r * r - 2.0 * p.a * p.a) / (rho2 * rho2 * rho2);
  return {s * u, s1 * u + s * u1, s2 * u + 2.0 * s1 * u1 + s * u2};
}

// c0 = a E k~ / (r^2 + a^2)
Jet c0_jet(const BlackHoleParams& p, double r, double kt) {
  const double rho2 = r * r + p.a * p.a;
  const double g = p.a * p.E() * kt;
  return {g / rho2, -2.0 * g * r / (rho2 * rho2), g * (6.0 * r * r - 2.0 * p.a * p.a) / (rho2 * rho2 * rho2)};
}

// Interior extremum of a smooth function on (lo, hi): 64-point scan, then safeguarded Newton on f'.
// sense = +1 for a maximum, -1 for a minimum. Returns NaN when the scan extremum sits on the boundary.
double interior_extremum(const std::function<Jet(double)>& f, double lo, double hi, int sense) {
  constexpr int n = 64;
  const double h = (hi - lo) / (n + 1);
  int best = 1;
  double best_v = -INFINITY;
  for (int i = 1; i <= n; ++i) {
    const double v = sense * f(lo + i * h).f;
    if (v > best_v) best_v = v, best = i;
  }
  if (best == 1 || best == n) return NAN;
  double a = lo + (best - 1) * h, b = lo + (best + 1) * h;
  double fa = f(a).d1;
  double r = lo + best * h;
  for (int it = 0; it < 100; ++it) {
    const Jet j = f(r);
    if (j.d1 == 0.0) break;
    if ((j.d1 > 0) == (fa > 0)) a = r, fa = j.d1;
    else b = r;
    double next = r - j.d1 / j.d2;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double step = std::abs(next - r);
    r = next;
    if (step < 1e-15 * std::abs(r) || b - a < 4e-16 * std::abs(r)) break;
  }
  return r;
}

}  // namespace

double metric_F(const BlackHoleParams& p, double r) {
  return 1.0 - 2.0 * p.M / r + p.Q * p.Q / (r * r) - p.Lambda * r * r / 3.0;
}

double metric_F_prime(const BlackHoleParams& p, double r) {
  return 2.0 * p.M / (r * r) - 2.0 * p.Q * p.Q / (r * r * r) - 2.0 * p.Lambda * r / 3.0;
}

PhotonSphereData photon_sphere(const BlackHoleParams& p) {
  PhotonSphereData d;
  d.r0 = photon_sphere_radius(p);
  const double r0 = d.r0;
  d.F0 = metric_F(p, r0);
  d.dF0 = metric_F_prime(p, r0);
  const double z2 = p.M / (r0 * r0 * r0) - p.Q * p.Q / (r0 * r0 * r0 * r0) - p.Lambda / 3.0;
  if (!(z2 > 0.0)) throw Error(ErrorKind::NoPhotonSphere, fmt::format("z0^2 = {} is not positive", z2));
  d.z0 = std::sqrt(z2);
  d.alpha = std::sqrt(3.0 * p.M / r0 - 4.0 * p.Q * p.Q / (r0 * r0)) * z2;
  d.H_per_k = 4.0 * std::sqrt(d.F0) * r0 * r0 / (8.0 * p.Q * p.Q - 6.0 * p.M * r0);
  return d;
}

cplx leading_qnm(const BlackHoleParams& p, double l_half, int m) {
  if (p.a != 0.0) throw Error(ErrorKind::Refusal, "leading formula requires a = 0");
  const PhotonSphereData d = photon_sphere(p);
  return {d.z0 * l_half, -(d.alpha / d.z0) * (m + 0.5)};
}

cplx next_order_qnm(const BlackHoleParams& p, double l_half, int m, double b02, cplx b12) {
  const PhotonSphereData d = photon_sphere(p);
  const double n = 2.0 * m + 1.0;
  const cplx bracket = -d.alpha / (4.0 * d.z0 * d.z0) * n + 0.5 * b02 * n + cplx(0, 1) * b12;
  return leading_qnm(p, l_half, m) - (d.alpha / d.z0) * (m + 0.5) / l_half * bracket;
}

double radial_symbol(const BlackHoleParams& p, double lt, double kt, int branch) {
  const PhotonSphereData d = photon_sphere(p);
  const double isf = 1.0 / std::sqrt(d.F0);
  const double plus =
      lt * d.r0 * isf + (p.a / d.r0) * (d.H(kt) * (1.0 - d.r0 * d.dF0 / (2.0 * d.F0)) - isf * kt);
  return branch >= 0 ? plus : -plus;
}

AngularSymbol angular_symbol(const BlackHoleParams& p, double lt, double kt, int edge) {
  const double v = p.E() * kt - p.a * lt;
  return {v * v, edge >= 0 ? 2.0 * kt : -2.0 * kt, -2.0 * p.a * lt};
}

double bottom_well(const BlackHoleParams& p, double kt, double lambda_breve) {
  const double al = p.a * lambda_breve;
  return kt * kt - al * al - (p.E() - 1.0) * (al - kt) * (al - kt);
}

double angular_omega_squared(const BlackHoleParams& p, double kt, double lambda_breve, int m, double h) {
  const double U0 = bottom_well(p, kt, lambda_breve);
  if (U0 < 0.0) throw Error(ErrorKind::Domain, fmt::format("U0(0) = {} is negative", U0));
  const double E = p.E();
  const double s = kt - p.a * lambda_breve;
  return E * E * s * s + (2.0 * m + 1.0) * h * std::sqrt(U0);
}

double trapping_function(const BlackHoleParams& p, double r, double lt, double kt) {
  const double D = lt * (r * r + p.a * p.a) - p.a * p.E() * kt;
  return delta_r(p, r) / (D * D);
}

TrappedFrequency trapped_frequency(const BlackHoleParams& p, double lt, double kt) {
  const Spacetime st(p);
  const HorizonSet& hs = st.horizons();
  const double g = p.a * p.E() * kt;
  // D(r) = lt (r^2 + a^2) - g must not vanish on the exterior.
  const double Dm = lt * (hs.r_minus * hs.r_minus + p.a * p.a) - g;
  const double Dp = lt * (hs.r_plus * hs.r_plus + p.a * p.a) - g;
  if (!(Dm * Dp > 0.0)) throw Error(ErrorKind::Domain, "trapping denominator vanishes on (r_-, r_+)");

  // F_V' ~ phi = Delta' D - 2 Delta D'
  auto phi = [&](double r) {
    const double D = lt * (r * r + p.a * p.a) - g, D1 = 2.0 * lt * r, D2 = 2.0 * lt;
    const double A = delta_r(p, r), A1 = delta_r_prime(p, r), A2 = delta_r_second(p, r);
    Jet j;
    j.f = A / (D * D);
    j.d1 = A1 * D - 2.0 * A * D1;
    j.d2 = A2 * D - A1 * D1 - 2.0 * A * D2;
    return j;
  };
  const double r = interior_extremum(phi, hs.r_minus, hs.r_plus, +1);
  if (std::isnan(r)) throw Error(ErrorKind::NoTrapping, "maximum of F_V at the boundary");

  TrappedFrequency t;
  t.r_trap = r;
  t.omega0 = 1.0 / std::sqrt(trapping_function(p, r, lt, kt));
  t.x_trap = st.map().x(st.map().point_from_r(r));
  const PhotonSphereData d = photon_sphere(p);
  t.r_expansion = d.r0 + p.a * d.H(kt) / t.omega0;
  return t;
}

double beta0(const BlackHoleParams& p, double lt, double wt, double kt, int side) {
  const HorizonSet hs = horizon_roots(p);
  const double sgn = side > 0 ? 1.0 : -1.0;
  const double aw = std::abs(wt);
  auto g = [&](double r) {
    const Jet c = c0_jet(p, r, kt), f = frak_a_jet(p, r);
    return Jet{c.f + sgn * aw * f.f, c.d1 + sgn * aw * f.d1, c.d2 + sgn * aw * f.d2};
  };
  const double r = interior_extremum(g, hs.r_minus, hs.r_plus, side > 0 ? +1 : -1);
  if (std::isnan(r)) throw Error(ErrorKind::NoTrapping, "critical point of c0 +- |w| a at the boundary");

  const Jet j = g(r);
  const double rho2 = r * r + p.a * p.a;
  const double dxdr_inv = delta_r(p, r) / rho2;
  const double gxx = dxdr_inv * dxdr_inv * j.d2;  // g_xx = (Delta/rho^2)^2 g_rr at a critical point
  if (!(std::abs(gxx) > 1e-12)) throw Error(ErrorKind::DegenerateTrapping, fmt::format("g'' = {}", gxx));

  const double c0 = c0_jet(p, r, kt).f;
  const double fa = frak_a_jet(p, r).f;
  const double scale = std::sqrt(aw * fa) / std::sqrt(std::abs(gxx));
  if (side > 0) return -(c0 - lt + wt * fa) * scale;
  return (c0 - lt - wt * fa) * scale;
}

ZeemanSlopes zeeman_slopes(const BlackHoleParams& p) {
  const PhotonSphereData d = photon_sphere(p);
  const double G = 4.0 * d.F0 * d.r0 * d.r0 / (8.0 * p.Q * p.Q - 6.0 * p.M * d.r0) *
                   (1.0 - d.r0 * d.dF0 / (2.0 * d.F0));
  const double first = (p.a / (d.r0 * d.r0)) * (G - 1.0);
  const double second = p.a * d.z0 * std::sqrt(d.F0) / d.r0;
  return {-first - second, -first + second, first - second};
}

CombinedQuantization combined_quantization(const BlackHoleParams& p, double kt, int branch) {
  if (kt == 0.0) throw Error(ErrorKind::Domain, "k~ must be nonzero");
  const double br = branch >= 0 ? 1.0 : -1.0;
  // branch (A lambda~ + a b k~) = |E k~ - a lambda~|
  const double A = radial_symbol(p, 1.0, 0.0, +1);
  const double abk = radial_symbol(p, 0.0, kt, +1);
  const double E = p.E();
  CombinedQuantization out;
  out.edge = static_cast<int>(br) * (kt > 0 ? 1 : -1);
  bool found = false;
  for (double s : {1.0, -1.0}) {
    const double den = br * A + s * p.a;
    if (den == 0.0) continue;
    const double lam = (s * E * kt - br * abk) / den;
    if (s * (E * kt - p.a * lam) >= 0.0) {
      out.lambda = lam;
      found = true;
      break;
    }
  }
  if (!found) throw Error(ErrorKind::Domain, "no real solution of the combined condition");
  out.in_window = std::abs(out.lambda) > 1.0 && std::abs(out.lambda) < 2.0;
  out.slope = zeeman_slopes(p).minus;
  return out;
}

KerrDsCheck kerr_ds_check(const BlackHoleParams& p) {
  BlackHoleParams q = p;
  q.Q = 0.0;
  q.a = 1e-2;
  const double A = radial_symbol(q, 1.0, 0.0, +1);
  const double b = radial_symbol(q, 0.0, 1.0, +1) / q.a;
  const double w = 1.0 - 9.0 * q.M * q.M * q.Lambda;
  KerrDsCheck c;
  c.coef_l2 = A * A;
  c.coef_l2_closed = 27.0 * q.M * q.M / w;
  c.coef_alk = 2.0 * A * b;
  c.coef_alk_closed = -6.0 / w;
  c.split = b;
  c.split_closed = -1.0 / (q.M * std::sqrt(3.0) * std::sqrt(w));
  auto rel = [](double x, double y) { return std::abs(x - y) / std::abs(y); };
  c.max_rel_error = std::max({rel(c.coef_l2, c.coef_l2_closed), rel(c.coef_alk, c.coef_alk_closed),
                              rel(c.split, c.split_closed)});
  return c;
}

}  // namespace knds
