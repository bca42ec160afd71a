#pragma once

#include <complex>

#include <Eigen/Dense>

#include "knds/spacetime.hpp"

namespace knds {

using cplx = std::complex<double>;

// k in Z + 1/2, l != 0; the sign of l selects the spectral branch.
struct AngularMode {
  double k = 0.5;
  int l = 1;
};

void check_mode(const AngularMode& mode);
double exact_eigenvalue_a0(const AngularMode& mode);

// zeta = a^2 Lambda / 3, xi = a lambda, nu = a m.
struct AngularCoupling {
  double zeta = 0;
  cplx xi = 0;
  double nu = 0;
};
AngularCoupling angular_coupling(const BlackHoleParams& p, cplx lambda);

// Galerkin matrix of A_k(lambda) in the eigenbasis of the a = 0 operator.
// Massless: 2N x 2N. Massive (m > 0): 4N x 4N, block diagonal in the Gamma^5-adapted
// sectors; the first block is A_k - nu cos(theta) sigma_3, the second A_k + nu cos(theta) sigma_3.
struct AngularDiscretization {
  double k = 0.5;
  int N = 0;
  bool massive = false;
  AngularCoupling coupling;
  Eigen::MatrixXcd matrix;
  Eigen::MatrixXcd dmatrix;  // d matrix / d lambda (constant)
};
AngularDiscretization discretize(const BlackHoleParams& p, double k, cplx lambda, int N);

struct AngularOptions {
  int N = 64;
  int steps = 8;
  bool estimate_error = true;
  double refine_tol = 1e-9;
  int max_N = 256;
  double collision_tol = 1e-8;
  double nu0 = 2.0;  // admissible |Im lambda|
};

struct AngularEigenvalue {
  cplx mu;
  AngularMode mode;
  cplx lambda;
  double continuation_distance = 0;  // |(zeta, xi, nu)|
  double est_error = 0;
  int N = 0;
};

// Eigenvalue selected by continuation from (zeta, xi, nu) = 0. For massive parameters the value
// lives in the first sector block.
AngularEigenvalue eigenvalue(const BlackHoleParams& p, const AngularMode& mode, cplx lambda,
                             const AngularOptions& opt = {});

// Eigenvalue of the first sector block nearest to guess, at fixed N. Throws Ambiguity when the
// two nearest candidates are not separated.
cplx eigenvalue_near(const BlackHoleParams& p, double k, cplx lambda, cplx guess, int N = 64);

// Real-lambda bounds; massive version includes the |a| m term.
struct MuBounds {
  double lower = 0;
  double upper = 0;
};
double bound_C1();
double bound_C2();
MuBounds mu_bounds(const BlackHoleParams& p, const AngularMode& mode, double lambda);

// Eigenvalue of the scalar squared operator D+ D- nearest mu^2, discretized as a bilinear form in a
// scalar basis; returns |mu^2 - that eigenvalue|.
double squared_operator_check(const BlackHoleParams& p, const AngularMode& mode, cplx lambda, int N = 64);
cplx squared_operator_eigenvalue(const BlackHoleParams& p, double k, cplx lambda, cplx target, int N = 64);

}  // namespace knds
