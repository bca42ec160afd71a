#pragma once

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "knds/spacetime.hpp"

namespace knds {

using cplx = std::complex<double>;

// Dirac2: 2-spinor system (sigma_3 D_x + V) f = 0 with V = c - lambda + omega a sigma_1 + b sigma_2;
// for m = 0 this is the massless system, for m > 0 the first Gamma-adapted sector of the massive one.
// Dirac4: the full 4-spinor massive system with the Gamma^0..Gamma^3 representation.
enum class RadialSystem { Dirac2, Dirac4 };

struct RadialProblem {
  cplx lambda = 0;
  cplx omega = 0;
  double k = 0.5;
  RadialSystem system = RadialSystem::Dirac2;
};

int system_dim(RadialSystem s);

// Taylor data of the coefficient functions in the scaled horizon variable
// w_hat = exp(kappa (x - x_ref)), x_ref = side * X0. Index j is the power of w_hat.
struct HorizonExpansion {
  int side = 1;
  double kappa = 0;
  double x_ref = 0;
  double log_K = 0;   // w^2 = K s phi(s), s the distance to the horizon
  double u_ref = 0;   // exp(2 kappa x_ref) / K
  std::vector<double> inv_rho2;  // 1/(r^2+a^2), even powers
  std::vector<double> r_inv_rho2;  // r/(r^2+a^2), even powers
  std::vector<double> frak_a;    // odd powers
  std::vector<double> r_frak_a;  // r a(x), odd powers; times m gives b(x)
  std::vector<double> dist;      // distance to the horizon, even powers

  int order() const { return static_cast<int>(frak_a.size()); }
};

class RadialContext {
 public:
  explicit RadialContext(const BlackHoleParams& p, int order = 320);

  const Spacetime& spacetime() const { return st_; }
  const BlackHoleParams& params() const { return st_.params(); }
  const HorizonExpansion& expansion(int side) const { return side > 0 ? plus_ : minus_; }
  double X0() const { return st_.X0(); }

 private:
  Spacetime st_;
  HorizonExpansion plus_, minus_;
};

// Log-scaled spinor frame: value = exp(log_scale) * v, columns are independent solutions.
struct LogFrame {
  Eigen::MatrixXcd v;
  cplx log_scale = 0;

  void normalize();
  Eigen::MatrixXcd value() const { return std::exp(log_scale) * v; }
};

struct HorizonSeries {
  int side = 1;
  int dim = 2;
  RadialProblem prob;
  double kappa = 0;
  double x_ref = 0;  // series variable is exp(kappa (x - x_ref)); valid for side * x >= side * x_ref
  cplx tau = 0;      // f = exp(i tau x) v(w)
  cplx Omega = 0;
  std::vector<Eigen::MatrixXcd> coef;  // dim x (dim/2) per power; Jost normalized (free block = identity)
  cplx log_norm = 0;                   // log of the Gamma normalization of the free component
  bool norm_zero = false;              // Gamma normalization vanishes (exceptional point)
  double tail = 0;                     // tail estimate at the reference point, relative
  double cancellation = 1;             // max term / |sum| at the reference point
  int J() const { return static_cast<int>(coef.size()) - 1; }
};

struct SeriesOptions {
  int J = 40;
  double tail_tol = 1e-14;
  double depth = 0;  // extra distance beyond X0 for the reference point
};

HorizonSeries horizon_series(const RadialContext& ctx, const RadialProblem& prob, int side, const SeriesOptions& opt = {});

struct OutgoingValue {
  Eigen::MatrixXcd v;   // analytic factor v(w), Jost normalized
  Eigen::MatrixXcd dv;  // d v / dx
  cplx phase = 0;       // i tau x
  cplx log_norm = 0;    // Gamma normalization (log)

  // f = exp(log_norm + phase) v; df/dx = exp(log_norm + phase)(i tau v + dv)
  LogFrame frame(bool include_norm = false) const;
};

OutgoingValue evaluate_outgoing(const HorizonSeries& s, double x);

struct IntegrateOptions {
  double tol = 1e-12;
  double min_step = 1e-14;
};

// Integrates the frame from x_from to each of the targets in order (monotone), returns frames there.
std::vector<LogFrame> integrate_interior(const RadialContext& ctx, const RadialProblem& prob, const LogFrame& init,
                                         double x_from, const std::vector<double>& targets,
                                         const IntegrateOptions& opt = {});
LogFrame integrate_interior(const RadialContext& ctx, const RadialProblem& prob, const LogFrame& init, double x_from,
                            double x_to, const IntegrateOptions& opt = {});

// Right-hand side matrix A(x) with f' = A f.
Eigen::MatrixXcd system_matrix(const RadialContext& ctx, const RadialProblem& prob, const RadialPoint& pt);

struct WronskianValue {
  cplx W = 0;          // with Gamma normalization; may be 0 or inf when not representable
  cplx log_W = 0;
  cplx W_jost = 0;     // Jost normalized (free components equal to one)
  cplx log_jost = 0;
  cplx log_norm = 0;   // log of the product of the Gamma normalizations
  double x_m = 0;
  double sine = 0;     // |W| over the norms of the two outgoing frames at x_m
  double drift = 0;    // relative change across x_m in {0, X0/2, -X0/2}
  bool degenerate = false;
  int J_plus = 0, J_minus = 0;
  double depth = 0;
};

struct WronskianOptions {
  bool drift = true;
  SeriesOptions series;
  IntegrateOptions integrate;
  int max_depth_tries = 6;
};

WronskianValue wronskian(const RadialContext& ctx, const RadialProblem& prob, const WronskianOptions& opt = {});

struct ResonanceBox {
  double re0 = 0, re1 = 1, im0 = -1, im1 = 0;
};

struct RadialZero {
  cplx lambda = 0;
  cplx omega = 0;
  double k = 0;
  double residual = 0;  // |W_jost| at the zero over its scale on the box boundary
  int winding_box = 0;  // winding number of the box the zero was isolated in
  int multiplicity = 1;
  bool exceptional = false;  // zero of the Gamma normalization with a regular Jost solution; not classified
};

struct ResonanceSearch {
  bool vary_lambda = true;  // search in lambda at fixed omega, else in omega at fixed lambda
  cplx fixed = 0;
  double k = 0.5;
  RadialSystem system = RadialSystem::Dirac2;
  ResonanceBox box;
  int max_boxes = 64;
};

std::vector<RadialZero> radial_resonances(const RadialContext& ctx, const ResonanceSearch& search);

// Number of zeros of W inside the box: winding of W_jost plus its poles at the exceptional points.
int winding_number(const RadialContext& ctx, const ResonanceSearch& search, const ResonanceBox& box);

// q^2 - (c - lambda)^2 + sign * q' with q = omega a(x), h = 1.
cplx schrodinger_potential(const RadialContext& ctx, const RadialProblem& prob, double x, int sign);

struct SchrodingerCheck {
  double residual = 0;          // sign-corrected identity
  double residual_flipped = 0;  // identity with the opposite commutator sign
};
SchrodingerCheck schrodinger_reduction_check(const RadialContext& ctx, const RadialProblem& prob, int grid = 2048,
                                             int spinors = 20, unsigned seed = 7, bool zero_c_prime = false);

}  // namespace knds
