#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "knds/angular.hpp"
#include "knds/radial.hpp"
#include "knds/spacetime.hpp"

namespace knds {

using cplx = std::complex<double>;

// Angular index l (sign selects the branch) and overtone m. The shifted label
// l_T + 1/2 = |k| - 1/2 + |l| is surfaced as l_half().
struct QnmMode {
  double k = 0.5;
  int l = 1;
  int m = 0;

  double l_half() const;
};

struct QnmRecord {
  QnmMode mode;
  cplx lambda = 0;
  cplx mu = 0;
  double residual = 0;  // |W| over the outgoing-frame norms at x = 0
  double step = 0;      // last Newton step relative to |lambda|
  std::string method = "wronskian";
  cplx seed = 0;
  bool auto_seed = false;
  int iterations = 0;
  bool noise_floor = false;  // accepted by the stagnation rule
};

struct QnmOptions {
  int angular_N = 64;
  int max_iter = 50;
  double step_tol = 1e-10;    // relative
  double floor_tol = 1e-8;    // relative step accepted after stagnation
  double residual_tol = 1e-6;
  double fd_step = 1e-6;      // relative finite-difference step
  int continuation_steps = 4;
  WronskianOptions wronskian = [] {
    WronskianOptions o;
    o.drift = false;
    return o;
  }();

  // Scales step_tol, floor_tol and residual_tol by QNM_TOL_OVERRIDE when set.
  static QnmOptions from_env();
};

RadialSystem qnm_system(const BlackHoleParams& p);

// Seed from the leading formula with (l + 1/2) -> l_half(); the sign of l selects Re lambda.
cplx leading_seed(const BlackHoleParams& p, const QnmMode& mode);

// Newton on G(lambda) = W(lambda, mu_kl(lambda), k). Without a seed: leading formula at a = 0, continuation
// in a from the a = 0 record otherwise. Throws NonConvergence with the iteration trace.
QnmRecord qnm_solve(const BlackHoleParams& p, const QnmMode& mode, std::optional<cplx> seed = std::nullopt,
                    const QnmOptions& opt = {});

struct QnmFailure {
  QnmMode mode;
  std::string message;
};

struct SpectrumTable {
  std::vector<QnmRecord> records;
  std::vector<QnmFailure> failures;
  std::vector<QnmFailure> duplicates;  // converged onto an earlier record
};

struct SpectrumRequest {
  std::vector<double> ks;
  std::vector<int> ls;
  std::vector<int> ms;
  std::vector<QnmMode> modes;              // explicit list; replaces the (k, l, m) grid when non-empty
  std::vector<std::optional<cplx>> seeds;  // optional, one per mode in request order
};

std::vector<QnmMode> request_modes(const SpectrumRequest& req);

// Mode-parallel with a fixed reduction order; output independent of workers.
SpectrumTable spectrum_table(const BlackHoleParams& p, const SpectrumRequest& req, const QnmOptions& opt = {},
                             int workers = 1);
SpectrumTable spectrum_table_serial(const BlackHoleParams& p, const SpectrumRequest& req, const QnmOptions& opt = {});

struct MassRow {
  double mass = 0;
  QnmMode mode;
  cplx lambda0 = 0, lambda = 0;
  double diff = 0;
};

struct MassFit {
  double mass = 0;
  double exponent = 0;  // slope of log diff against log(l + 1/2)
  double constant = 0;
  double max_shift_mu = 0;  // max |mu(nu) - mu(0)|
  double shift_bound = 0;   // |a| mass
};

struct MassReport {
  std::vector<MassRow> rows;
  std::vector<MassFit> fits;
};

MassReport mass_independence_experiment(const BlackHoleParams& p, const std::vector<double>& masses,
                                        const std::vector<QnmMode>& modes, const QnmOptions& opt = {}, int workers = 1);

struct ConvergenceRow {
  QnmMode mode;
  double l_half = 0;
  cplx lambda = 0, leading = 0, next = 0;
  double error = 0, ratio = 0, error_next = 0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  std::vector<cplx> bracket;  // fitted next-order bracket per overtone
};

// a = 0 only. Modes (k, l, m) with l chosen so that l_half() runs over l_halves; the next-order bracket
// is fitted from the first two l_halves per m.
ConvergenceStudy convergence_study(const BlackHoleParams& p, double k, const std::vector<int>& ms,
                                   const std::vector<double>& l_halves, const QnmOptions& opt = {}, int workers = 1);

struct ZeemanRow {
  double a = 0;
  double k = 0;
  cplx lambda_plus = 0, lambda_minus = 0;
  double slope = 0;           // Re [lambda(k) - lambda(-k)] / (2k)
  double slope_formula = 0;
  double rel_error = 0;
};

// Edge modes l = 1 at +-k, m = 0.
ZeemanRow zeeman_experiment(const BlackHoleParams& p, double k, const QnmOptions& opt = {});

struct RealGridScan {
  double min_sine = 0;
  double lambda_at_min = 0, omega_at_min = 0;
  int evaluations = 0;
};

// min over an n x n grid of real (lambda, omega) of the normalized Wronskian.
RealGridScan real_axis_scan(const RadialContext& ctx, double k, double lam0, double lam1, double om0, double om1,
                            int n, int workers = 1);
RealGridScan real_axis_scan_serial(const RadialContext& ctx, double k, double lam0, double lam1, double om0,
                                   double om1, int n);

}  // namespace knds
