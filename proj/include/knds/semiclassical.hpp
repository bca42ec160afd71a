#pragma once

#include <complex>

#include "knds/spacetime.hpp"

namespace knds {

using cplx = std::complex<double>;

// F(r) = 1 - 2M/r + Q^2/r^2 - Lambda r^2 / 3 and its derivative.
double metric_F(const BlackHoleParams& p, double r);
double metric_F_prime(const BlackHoleParams& p, double r);

struct PhotonSphereData {
  double r0 = 0;
  double z0 = 0;
  double alpha = 0;
  double F0 = 0;        // F(r0)
  double dF0 = 0;       // F'(r0)
  double H_per_k = 0;   // H / k~ = 4 F^{1/2}(r0) r0^2 / (8 Q^2 - 6 M r0)

  double H(double kt) const { return kt * H_per_k; }
};

// Throws Error(NoPhotonSphere) when 2 Q^2 >= (3M/2)^2.
PhotonSphereData photon_sphere(const BlackHoleParams& p);

// z0 (l + 1/2) - i (alpha / z0)(m + 1/2); l_half = l + 1/2. Refuses a != 0.
cplx leading_qnm(const BlackHoleParams& p, double l_half, int m);

// Leading formula plus the next-order a = 0 term; b02 real, b12 complex, both fitted.
cplx next_order_qnm(const BlackHoleParams& p, double l_half, int m, double b02, cplx b12);

// F^{r,branch}_0(lambda~, k~), branch = +1 or -1.
double radial_symbol(const BlackHoleParams& p, double lt, double kt, int branch);

// F^theta_0 at the edge l~ = +-k~: (E k~ - a lambda~)^2 and its l~-derivative +-2k~.
struct AngularSymbol {
  double value = 0;
  double dl_edge = 0;
  double dk_edge = 0;  // -2 a lambda~
};
AngularSymbol angular_symbol(const BlackHoleParams& p, double lt, double kt, int edge);

// U0(0) = k^2 - (a Re lambda_breve)^2 - (E - 1)(a Re lambda_breve - k)^2 with lambda_breve = lambda~ / E.
double bottom_well(const BlackHoleParams& p, double kt, double lambda_breve);
// E^2 (k~ - a lambda_breve)^2 + (2m + 1) h sqrt(U0(0)).
double angular_omega_squared(const BlackHoleParams& p, double kt, double lambda_breve, int m, double h);

struct TrappedFrequency {
  double omega0 = 0;     // omega~_0 = F_V(r_trap)^{-1/2}
  double r_trap = 0;
  double x_trap = 0;
  double r_expansion = 0;  // r0 + a H / omega~_0
};

// F_V(r) = Delta_r / [lambda~ (r^2 + a^2) - a E k~]^2.
double trapping_function(const BlackHoleParams& p, double r, double lt, double kt);
TrappedFrequency trapped_frequency(const BlackHoleParams& p, double lt, double kt);

// Principal normal-form coefficient near the trapping point x_+ (side = +1) or x_- (side = -1).
double beta0(const BlackHoleParams& p, double lt, double wt, double kt, int side);

struct ZeemanSlopes {
  double minus = 0;          // -(a/r0^2)[G - 1] - a z0 F^{1/2}/r0 (selected for Re lambda > 0)
  double plus = 0;           // -(a/r0^2)[G - 1] + a z0 F^{1/2}/r0
  double flipped = 0;        // +(a/r0^2)[G - 1] - a z0 F^{1/2}/r0
};
ZeemanSlopes zeeman_slopes(const BlackHoleParams& p);

// Leading-order solution of F^{r,branch}_0(lambda~, k~) = sqrt(F^theta_0) at the edge; the edge sign is
// l~ / k~ = branch * sgn(k~), so that lambda~ = branch E z0 |k~| at a = 0.
struct CombinedQuantization {
  double lambda = 0;
  int edge = 1;
  bool in_window = false;  // 1 < |lambda~| < 2
  double slope = 0;        // closed-form d lambda~ / d k~ at fixed l~
};
CombinedQuantization combined_quantization(const BlackHoleParams& p, double kt, int branch);

struct KerrDsCheck {
  double coef_l2 = 0, coef_l2_closed = 0;    // lambda~^2 coefficient of (F^r_0)^2
  double coef_alk = 0, coef_alk_closed = 0;  // a lambda~ k~ coefficient
  double split = 0, split_closed = 0;        // a k~ coefficient of F^r_0
  double max_rel_error = 0;
};
// Evaluated at Q = 0 with M, Lambda from p.
KerrDsCheck kerr_ds_check(const BlackHoleParams& p);

}  // namespace knds
