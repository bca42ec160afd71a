#include "knds/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "knds/errors.hpp"

namespace knds {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Nonphysical: return "nonphysical input";
    case ErrorKind::Inadmissible: return "inadmissible parameters";
    case ErrorKind::Degenerate: return "parameter set degenerate / near-extremal";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::NoPhotonSphere: return "no photon sphere";
    case ErrorKind::Refusal: return "refused";
    case ErrorKind::Ambiguity: return "eigenvalue continuation ambiguity";
    case ErrorKind::GammaPole: return "Gamma pole";
    case ErrorKind::RadiusExceeded: return "radius exceeded";
    case ErrorKind::Stiffness: return "stiffness";
    case ErrorKind::NoTrapping: return "no interior trapping";
    case ErrorKind::DegenerateTrapping: return "degenerate trapping";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::Diagnostic: return "diagnostic failure";
  }
  return "error";
}

Admissibility validate_params(const BlackHoleParams& p) {
  if (!(p.M > 0.0)) throw Error(ErrorKind::Nonphysical, fmt::format("M must be positive (M = {})", p.M));
  if (!(p.Lambda > 0.0))
    throw Error(ErrorKind::Nonphysical, fmt::format("Lambda must be positive (Lambda = {})", p.Lambda));
  if (!std::isfinite(p.Q) || !std::isfinite(p.a) || !std::isfinite(p.q) || !(p.m >= 0.0) || !std::isfinite(p.m))
    throw Error(ErrorKind::Nonphysical, "Q, a, q must be finite and m nonnegative");

  Admissibility out;
  out.rotation_ratio = p.a * p.a * p.Lambda / 3.0;
  out.rotation_bound = 7.0 - 4.0 * std::sqrt(3.0);
  out.rotation_ok = out.rotation_ratio <= out.rotation_bound;
  out.E_minus = 1.0 - out.rotation_ratio;
  out.F = 4.0 * p.Lambda * (p.a * p.a + p.Q * p.Q);

  const double disc = out.E_minus * out.E_minus - out.F;
  if (disc >= 0.0 && out.E_minus > 0.0) {
    const double sq = std::sqrt(disc);
    const double pref = 1.0 / std::sqrt(18.0 * p.Lambda);
    out.Mcrit_minus = pref * std::sqrt(out.E_minus - sq) * (2.0 * out.E_minus + sq);
    out.Mcrit_plus = pref * std::sqrt(out.E_minus + sq) * (2.0 * out.E_minus - sq);
    out.mass_ok = out.Mcrit_minus < p.M && p.M < out.Mcrit_plus;
  } else {
    out.Mcrit_minus = std::numeric_limits<double>::quiet_NaN();
    out.Mcrit_plus = std::numeric_limits<double>::quiet_NaN();
    out.mass_ok = false;
  }

  out.admissible = out.rotation_ok && out.mass_ok;
  if (!out.rotation_ok) {
    out.violated = fmt::format("a^2 Lambda/3 <= 7 - 4 sqrt(3) violated ({:.17g} > {:.17g})", out.rotation_ratio,
                               out.rotation_bound);
  } else if (!std::isfinite(out.Mcrit_minus)) {
    out.violated = fmt::format("E_-^2 >= 4 Lambda (a^2 + Q^2) violated (E_-^2 = {:.17g}, F = {:.17g})",
                               out.E_minus * out.E_minus, out.F);
  } else if (!out.mass_ok) {
    out.violated = fmt::format("M_crit^- < M < M_crit^+ violated (M_crit^- = {:.17g}, M = {:.17g}, M_crit^+ = {:.17g})",
                               out.Mcrit_minus, p.M, out.Mcrit_plus);
  }
  return out;
}

double delta_r(const BlackHoleParams& p, double r) {
  return (r * r + p.a * p.a) * (1.0 - p.Lambda * r * r / 3.0) - 2.0 * p.M * r + p.Q * p.Q;
}

double delta_r_prime(const BlackHoleParams& p, double r) {
  return 2.0 * r * (1.0 - p.Lambda * r * r / 3.0) - 2.0 * p.Lambda * r * (r * r + p.a * p.a) / 3.0 - 2.0 * p.M;
}

double photon_sphere_radius(const BlackHoleParams& p) {
  const double h = 1.5 * p.M;
  const double disc = h * h - 2.0 * p.Q * p.Q;
  if (!(disc > 0.0))
    throw Error(ErrorKind::NoPhotonSphere, fmt::format("2Q^2 >= (3M/2)^2 (Q = {}, M = {})", p.Q, p.M));
  return h + std::sqrt(disc);
}

HorizonSet horizon_roots(const BlackHoleParams& p) {
  const Admissibility adm = validate_params(p);
  if (!adm.admissible) throw Error(ErrorKind::Inadmissible, adm.violated);

  // Monic form: r^4 + c2 r^2 + c1 r + c0 = 0.
  const double L3 = p.Lambda / 3.0;
  const double c2 = -(1.0 - L3 * p.a * p.a) / L3;
  const double c1 = 2.0 * p.M / L3;
  const double c0 = -(p.a * p.a + p.Q * p.Q) / L3;

  Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
  comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
  comp(0, 3) = -c0;
  comp(1, 3) = -c1;
  comp(2, 3) = -c2;
  comp(3, 3) = 0.0;
  Eigen::EigenSolver<Eigen::Matrix4d> es(comp, false);
  const auto ev = es.eigenvalues();

  const double scale = std::max({1.0, std::abs(c2), std::sqrt(std::abs(c1)), std::sqrt(std::sqrt(std::abs(c0)))});
  std::vector<double> roots;
  for (int i = 0; i < 4; ++i) {
    if (std::abs(ev(i).imag()) > 1e-7 * scale)
      throw Error(ErrorKind::Degenerate, fmt::format("complex root {}{:+}i of Delta_r", ev(i).real(), ev(i).imag()));
    double r = ev(i).real();
    const double d = delta_r_prime(p, r);
    if (d != 0.0) r -= delta_r(p, r) / d;
    roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end());
  for (int i = 0; i < 3; ++i) {
    if (roots[i + 1] - roots[i] < 1e-6 * scale)
      throw Error(ErrorKind::Degenerate, fmt::format("nearly multiple roots {} and {}", roots[i], roots[i + 1]));
  }
  if (!(roots[0] < 0.0 && roots[1] > 0.0))
    throw Error(ErrorKind::Degenerate, "root pattern is not r_n < 0 < r_c < r_- < r_+");

  HorizonSet h;
  h.r_n = roots[0];
  h.r_c = roots[1];
  h.r_minus = roots[2];
  h.r_plus = roots[3];
  auto kap = [&](double r) { return delta_r_prime(p, r) / (2.0 * (r * r + p.a * p.a)); };
  h.kappa_n = kap(h.r_n);
  h.kappa_c = kap(h.r_c);
  h.kappa_minus = kap(h.r_minus);
  h.kappa_plus = kap(h.r_plus);
  h.aE = p.a * p.E();
  h.qQ = p.q * p.Q;
  h.a2 = p.a * p.a;
  return h;
}

ReggeWheeler::ReggeWheeler(const BlackHoleParams& p, const HorizonSet& h) : p_(p), h_(h) {
  r_anchor_ = photon_sphere_radius(p);
  if (!(r_anchor_ > h.r_minus && r_anchor_ < h.r_plus))
    throw Error(ErrorKind::Domain, fmt::format("anchor radius {} outside (r_-, r_+)", r_anchor_));
  C_ = 0.0;
  C_ = -log_sum(point_from_r(r_anchor_));

  const double width = h.r_plus - h.r_minus;
  const double xp = x(point_from_r(h.r_plus - 0.05 * width));
  const double xm = x(point_from_r(h.r_minus + 0.05 * width));
  X0_ = std::max(xp, -xm);
}

RadialPoint ReggeWheeler::point_from_r(double r) const {
  if (!(r > h_.r_minus && r < h_.r_plus))
    throw Error(ErrorKind::Domain, fmt::format("r = {} outside (r_-, r_+) = ({}, {})", r, h_.r_minus, h_.r_plus));
  return RadialPoint{r, r - h_.r_minus, h_.r_plus - r};
}

double ReggeWheeler::log_sum(const RadialPoint& pt) const {
  return std::log(pt.r - h_.r_n) / (2.0 * h_.kappa_n) +
         std::log((h_.r_minus - h_.r_c) + pt.d_minus) / (2.0 * h_.kappa_c) +
         std::log(pt.d_minus) / (2.0 * h_.kappa_minus) + std::log(pt.d_plus) / (2.0 * h_.kappa_plus);
}

double ReggeWheeler::x(const RadialPoint& pt) const { return log_sum(pt) + C_; }

double ReggeWheeler::x(double r) const { return x(point_from_r(r)); }

double ReggeWheeler::dxdr(double r) const {
  const RadialPoint pt = point_from_r(r);
  const double delta =
      p_.Lambda / 3.0 * (r - h_.r_n) * ((h_.r_minus - h_.r_c) + pt.d_minus) * pt.d_minus * pt.d_plus;
  return (r * r + p_.a * p_.a) / delta;
}

RadialPoint ReggeWheeler::point(double xt) const {
  if (!std::isfinite(xt)) throw Error(ErrorKind::Domain, "non-finite x");
  // Unknown y = log of the distance to the nearer horizon; x(y) is close to linear in y.
  const int side = xt >= 0.0 ? 1 : -1;
  const double width = h_.r_plus - h_.r_minus;
  auto make = [&](double y) {
    const double s = std::exp(y);
    return side > 0 ? RadialPoint{h_.r_plus - s, width - s, s} : RadialPoint{h_.r_minus + s, s, width - s};
  };
  // resid(y) = dir (x(y) - xt) is increasing in y on both sides.
  const double dir = side > 0 ? -1.0 : 1.0;
  auto resid = [&](const RadialPoint& pt) { return dir * (x(pt) - xt); };
  auto dresid = [&](const RadialPoint& pt) {
    const double other = side > 0 ? pt.d_minus : pt.d_plus;
    const double rest = p_.Lambda / 3.0 * (pt.r - h_.r_n) * ((h_.r_minus - h_.r_c) + pt.d_minus) * other;
    return (pt.r * pt.r + p_.a * p_.a) / rest;
  };

  const double y_max = std::log(width);
  const double rh = h_.horizon(side);
  const double far_kappa = side > 0 ? h_.kappa_minus : h_.kappa_plus;
  const double cst = C_ + std::log(rh - h_.r_n) / (2.0 * h_.kappa_n) + std::log(rh - h_.r_c) / (2.0 * h_.kappa_c) +
                     std::log(width) / (2.0 * far_kappa);
  double y = std::min(2.0 * h_.kappa(side) * (xt - cst), y_max - 1.0);

  double lo = y, step = 1.0;
  while (resid(make(lo)) > 0.0) {
    lo -= step;
    step *= 2.0;
    if (lo < -700.0) throw Error(ErrorKind::Domain, fmt::format("x = {} beyond representable distance", xt));
  }
  double hi = y;
  step = 0.5;
  while (resid(make(hi)) < 0.0) {
    hi = std::min(hi + step, y_max - 1e-15);
    step *= 2.0;
    if (hi >= y_max - 1e-15) break;
  }
  y = std::clamp(y, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const RadialPoint pt = make(y);
    const double f = resid(pt);
    if (f == 0.0) break;
    if (f > 0.0) hi = y; else lo = y;
    double ynew = y - f / dresid(pt);
    if (!(ynew > lo && ynew < hi)) ynew = 0.5 * (lo + hi);
    const double dy = ynew - y;
    y = ynew;
    const double tol = 1e-15 * std::max(1.0, std::abs(y));
    if (std::abs(dy) < tol || hi - lo < tol) break;
  }
  return make(y);
}

Spacetime::Spacetime(const BlackHoleParams& p) : p_(p), h_(horizon_roots(p)), map_(p, h_) {
  for (int side : {1, -1}) {
    const double kap = h_.kappa(side);
    const double xs = side * (map_.X0() + 5.0 / std::abs(kap));
    const RadialPoint pt = map_.point(xs);
    const double e = std::exp(-kap * xs);
    const double av = frak_a(pt) * e;
    const double bv = frak_b(pt) * e;
    const double rh = h_.horizon(side);
    const double dist = side > 0 ? pt.d_plus : -pt.d_minus;  // r_h - r
    const double den = (pt.r * pt.r + p_.a * p_.a) * (rh * rh + p_.a * p_.a);
    const double e2 = e * e;
    const double g1 = dist * (rh + pt.r) / den * e2;
    const double g2 = dist * (pt.r * rh - p_.a * p_.a) / den * e2;
    if (side > 0) {
      a_plus_ = av;
      b_plus_ = bv;
      cg_plus_[0] = g1;
      cg_plus_[1] = g2;
    } else {
      a_minus_ = av;
      b_minus_ = bv;
      cg_minus_[0] = g1;
      cg_minus_[1] = g2;
    }
  }
}

double Spacetime::delta(const RadialPoint& pt) const {
  return p_.Lambda / 3.0 * (pt.r - h_.r_n) * ((h_.r_minus - h_.r_c) + pt.d_minus) * pt.d_minus * pt.d_plus;
}

double Spacetime::frak_a(const RadialPoint& pt) const {
  return std::sqrt(delta(pt)) / (pt.r * pt.r + p_.a * p_.a);
}

double Spacetime::frak_b(const RadialPoint& pt) const { return p_.m * pt.r * frak_a(pt); }

double Spacetime::c(const RadialPoint& pt, double k) const {
  return (h_.aE * k + h_.qQ * pt.r) / (pt.r * pt.r + p_.a * p_.a);
}

double Spacetime::c_coef(int side, double k) const {
  const double* g = side > 0 ? cg_plus_ : cg_minus_;
  return h_.aE * k * g[0] + h_.qQ * g[1];
}

}  // namespace knds
