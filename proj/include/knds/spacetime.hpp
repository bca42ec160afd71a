#pragma once

#include <array>
#include <string>

namespace knds {

// Physical parameters in geometric units. q is the field charge, m the field mass.
struct BlackHoleParams {
  double M = 1.0;
  double Q = 0.0;
  double a = 0.0;
  double Lambda = 0.04;
  double q = 0.0;
  double m = 0.0;

  double E() const { return 1.0 + a * a * Lambda / 3.0; }
};

struct Admissibility {
  bool admissible = false;
  bool rotation_ok = false;
  bool mass_ok = false;
  double rotation_ratio = 0.0;  // a^2 Lambda / 3
  double rotation_bound = 0.0;  // 7 - 4 sqrt(3)
  double E_minus = 0.0;
  double F = 0.0;
  double Mcrit_minus = 0.0;
  double Mcrit_plus = 0.0;
  std::string violated;  // empty when admissible
};

// Throws Error(Nonphysical) for M <= 0 or Lambda <= 0.
Admissibility validate_params(const BlackHoleParams& p);

double delta_r(const BlackHoleParams& p, double r);
double delta_r_prime(const BlackHoleParams& p, double r);

// Closed-form photon-sphere radius of the non-rotating metric.
double photon_sphere_radius(const BlackHoleParams& p);

struct HorizonSet {
  double r_n = 0, r_c = 0, r_minus = 0, r_plus = 0;
  double kappa_n = 0, kappa_c = 0, kappa_minus = 0, kappa_plus = 0;
  double aE = 0;  // a E
  double qQ = 0;  // field charge times Q
  double a2 = 0;  // a^2

  std::array<double, 4> roots() const { return {r_n, r_c, r_minus, r_plus}; }
  std::array<double, 4> kappas() const { return {kappa_n, kappa_c, kappa_minus, kappa_plus}; }

  double Omega_minus(double k) const { return (aE * k + qQ * r_minus) / (r_minus * r_minus + a2); }
  double Omega_plus(double k) const { return (aE * k + qQ * r_plus) / (r_plus * r_plus + a2); }
  double Omega(int side, double k) const { return side > 0 ? Omega_plus(k) : Omega_minus(k); }
  double kappa(int side) const { return side > 0 ? kappa_plus : kappa_minus; }
  double horizon(int side) const { return side > 0 ? r_plus : r_minus; }
};

// Requires admissible parameters. Companion-matrix eigenvalues plus one Newton polish.
HorizonSet horizon_roots(const BlackHoleParams& p);

// A radius in (r_-, r_+) carried together with accurate distances to both horizons.
struct RadialPoint {
  double r = 0;
  double d_minus = 0;  // r - r_-
  double d_plus = 0;   // r_+ - r
};

class ReggeWheeler {
 public:
  ReggeWheeler(const BlackHoleParams& p, const HorizonSet& h);

  double x(double r) const;
  double x(const RadialPoint& pt) const;
  double dxdr(double r) const;
  RadialPoint point(double x) const;
  double r(double x) const { return point(x).r; }
  RadialPoint point_from_r(double r) const;

  double X0() const { return X0_; }
  double r_anchor() const { return r_anchor_; }
  double constant() const { return C_; }

 private:
  double log_sum(const RadialPoint& pt) const;

  BlackHoleParams p_;
  HorizonSet h_;
  double C_ = 0;
  double r_anchor_ = 0;
  double X0_ = 0;
};

// Bundles parameters, horizons, the tortoise map and the coefficient functions.
class Spacetime {
 public:
  explicit Spacetime(const BlackHoleParams& p);

  const BlackHoleParams& params() const { return p_; }
  const HorizonSet& horizons() const { return h_; }
  const ReggeWheeler& map() const { return map_; }
  double X0() const { return map_.X0(); }

  double delta(const RadialPoint& pt) const;
  double frak_a(const RadialPoint& pt) const;
  double frak_b(const RadialPoint& pt) const;
  double c(const RadialPoint& pt, double k) const;

  double frak_a(double x) const { return frak_a(map_.point(x)); }
  double frak_b(double x) const { return frak_b(map_.point(x)); }
  double c(double x, double k) const { return c(map_.point(x), k); }

  // Leading asymptotic coefficients sampled at +-(X0 + 5/|kappa|).
  double a_coef(int side) const { return side > 0 ? a_plus_ : a_minus_; }
  double b_coef(int side) const { return side > 0 ? b_plus_ : b_minus_; }
  double c_coef(int side, double k) const;

 private:
  BlackHoleParams p_;
  HorizonSet h_;
  ReggeWheeler map_;
  double a_plus_ = 0, a_minus_ = 0, b_plus_ = 0, b_minus_ = 0;
  double cg_plus_[2] = {0, 0}, cg_minus_[2] = {0, 0};
};

}  // namespace knds
