#include "knds/angular.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "knds/errors.hpp"

namespace knds {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

bool is_half_integer(double k) {
  const double t = k - 0.5;
  return std::isfinite(k) && std::abs(t - std::round(t)) < 1e-12;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      const double p = std::legendre(n, z);
      const double pm = std::legendre(n - 1, z);
      dp = n * (z * p - pm) / (z * z - 1.0);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      const double p = std::legendre(n, z);
      const double pm = std::legendre(n - 1, z);
      dp = n * (z * p - pm) / (z * z - 1.0);
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

// Orthonormal Jacobi polynomials p_0..p_{n-1} for weight (1-x)^al (1+x)^be on [-1,1].
void jacobi_orthonormal(double al, double be, int n, double x, double* out) {
  if (n <= 0) return;
  const double h0 = std::exp((al + be + 1.0) * std::log(2.0) + std::lgamma(al + 1.0) + std::lgamma(be + 1.0) -
                             std::lgamma(al + be + 2.0));
  auto bcoef = [&](int j) {
    const double s = 2.0 * j + al + be;
    return (be * be - al * al) / (s * (s + 2.0));
  };
  auto acoef = [&](int j) {
    const double s = 2.0 * j + al + be;
    return 4.0 * j * (j + al) * (j + be) * (j + al + be) / (s * s * (s + 1.0) * (s - 1.0));
  };
  out[0] = 1.0 / std::sqrt(h0);
  if (n == 1) return;
  out[1] = (x - bcoef(0)) * out[0] / std::sqrt(acoef(1));
  for (int j = 1; j + 1 < n; ++j)
    out[j + 1] = ((x - bcoef(j)) * out[j] - std::sqrt(acoef(j)) * out[j - 1]) / std::sqrt(acoef(j + 1));
}

// Eigenfunctions (a_n, i b_n) of the a = 0 operator with eigenvalue |k| + 1/2 + n, on Gauss nodes.
struct SpinBasis {
  double k = 0.5;
  int N = 0;
  int Q = 0;
  VectorXd theta, w, mu;
  MatrixXd A, B;  // Q x N

  SpinBasis(double kk, int n) : k(kk), N(n) {
    Q = 2 * N + 2 * static_cast<int>(std::ceil(std::abs(k))) + 48;
    std::vector<double> xs, ws;
    gauss_legendre(Q, xs, ws);
    theta.resize(Q);
    w.resize(Q);
    for (int q = 0; q < Q; ++q) {
      theta(q) = 0.5 * M_PI * (xs[q] + 1.0);
      w(q) = 0.5 * M_PI * ws[q];
    }
    mu.resize(N);
    for (int j = 0; j < N; ++j) mu(j) = std::abs(k) + 0.5 + j;

    const double k1 = k > 0 ? k : 1.0 - k;
    const double k2 = k > 0 ? k + 1.0 : -k;
    const double al = k1 - 0.5, be = k2 - 0.5;
    const double C = std::pow(2.0, 0.5 * (al + be));
    A.resize(Q, N);
    B.resize(Q, N);
    std::vector<double> p(N), dp(N);
    for (int q = 0; q < Q; ++q) {
      const double th = theta(q);
      const double S = std::sin(0.5 * th), K = std::cos(0.5 * th), x = std::cos(th);
      jacobi_orthonormal(al, be, N, x, p.data());
      dp[0] = 0.0;
      if (N > 1) {
        jacobi_orthonormal(al + 1.0, be + 1.0, N - 1, x, dp.data() + 1);
        for (int j = 1; j < N; ++j) dp[j] *= std::sqrt(j * (j + al + be + 1.0));
      }
      const double pb = C * std::pow(S, k1) * std::pow(K, k2);
      for (int j = 0; j < N; ++j) {
        B(q, j) = pb * p[j];
        double ra;
        if (k > 0)
          ra = C * std::pow(S, k1 + 1.0) * std::pow(K, k2 - 1.0) * (-(2.0 * k + 1.0) / 2.0 * p[j] - 2.0 * K * K * dp[j]);
        else
          ra = C * std::pow(S, k1 - 1.0) * std::pow(K, k2 + 1.0) * ((1.0 - 2.0 * k) / 2.0 * p[j] - 2.0 * S * S * dp[j]);
        A(q, j) = ra / mu(j);
      }
    }
  }

  MatrixXd pair(const MatrixXd& L, const VectorXd& f, const MatrixXd& R) const {
    return L.transpose() * (w.cwiseProduct(f)).asDiagonal() * R;
  }
};

struct SectorParts {
  MatrixXcd base;   // A_k at xi = 0, nu = 0
  MatrixXcd dxi;    // coefficient of xi
  MatrixXcd mass;   // coefficient of nu (sector 1: -cos(theta) sigma_3)
};

SectorParts sector_parts(const SpinBasis& bs, double zeta) {
  const int N = bs.N, Q = bs.Q;
  VectorXd sd(Q), b12(Q), b21(Q), fxi(Q), cs(Q);
  for (int q = 0; q < Q; ++q) {
    const double th = bs.theta(q);
    const double s = std::sin(th), c = std::cos(th);
    const double D = 1.0 + zeta * c * c;
    sd(q) = std::sqrt(D);
    const double t1 = zeta * std::sin(2.0 * th) / 4.0;
    const double t2 = zeta * bs.k * s;
    b12(q) = (t1 + t2) / sd(q);
    b21(q) = (t1 - t2) / sd(q);
    fxi(q) = s / sd(q);
    cs(q) = c;
  }
  const MatrixXd Gaa = bs.pair(bs.A, sd, bs.A), Gbb = bs.pair(bs.B, sd, bs.B);
  const MatrixXd P12 = bs.pair(bs.A, b12, bs.B), P21 = bs.pair(bs.A, b21, bs.B).transpose();
  const MatrixXd Pf = bs.pair(bs.A, fxi, bs.B);
  const MatrixXd Caa = bs.pair(bs.A, cs, bs.A), Cbb = bs.pair(bs.B, cs, bs.B);

  SectorParts out;
  out.base = MatrixXcd::Zero(2 * N, 2 * N);
  out.dxi = MatrixXcd::Zero(2 * N, 2 * N);
  out.mass = MatrixXcd::Zero(2 * N, 2 * N);
  for (int bi = 0; bi < 2; ++bi) {
    const double si = bi == 0 ? 1.0 : -1.0;
    for (int bj = 0; bj < 2; ++bj) {
      const double sj = bj == 0 ? 1.0 : -1.0;
      MatrixXd G = Gaa + si * sj * Gbb;
      for (int j = 0; j < N; ++j) G.col(j) *= sj * bs.mu(j);
      const MatrixXd Bp = -sj * P12 + si * P21;
      out.base.block(bi * N, bj * N, N, N) = (G + Bp).cast<cplx>();
      out.dxi.block(bi * N, bj * N, N, N) = (sj * Pf + si * Pf.transpose()).cast<cplx>();
      out.mass.block(bi * N, bj * N, N, N) = (-(Caa - si * sj * Cbb)).cast<cplx>();
    }
  }
  return out;
}

MatrixXcd sector_matrix(const SectorParts& sp, cplx xi, double nu) {
  return sp.base + xi * sp.dxi + cplx(nu) * sp.mass;
}

Eigen::VectorXcd spectrum(const MatrixXcd& m) {
  Eigen::ComplexEigenSolver<MatrixXcd> es(m, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Diagnostic, "angular eigen-solve failed");
  return es.eigenvalues();
}

cplx pick_nearest(const Eigen::VectorXcd& ev, cplx target, double tol, bool check) {
  int best = -1, second = -1;
  double d1 = 1e300, d2 = 1e300;
  for (int i = 0; i < ev.size(); ++i) {
    const double d = std::abs(ev(i) - target);
    if (d < d1) {
      d2 = d1;
      second = best;
      d1 = d;
      best = i;
    } else if (d < d2) {
      d2 = d;
      second = i;
    }
  }
  if (check && second >= 0) {
    const double scale = std::max(1.0, std::abs(target));
    if (std::abs(ev(best) - ev(second)) < tol * scale || d2 <= 2.0 * d1 + tol * scale) {
      throw Error(ErrorKind::Ambiguity,
                  fmt::format("candidates {:.17g}{:+.17g}i and {:.17g}{:+.17g}i near {:.17g}{:+.17g}i",
                              ev(best).real(), ev(best).imag(), ev(second).real(), ev(second).imag(), target.real(),
                              target.imag()));
    }
  }
  return ev(best);
}

struct Tracked {
  cplx mu;
  Eigen::VectorXcd v;
  bool ok = false;
};

// Rayleigh-quotient iteration from (guess, v0); v0 may be empty.
Tracked rqi(const MatrixXcd& m, cplx guess, Eigen::VectorXcd v0) {
  const int n = static_cast<int>(m.rows());
  if (v0.size() != n || v0.norm() == 0.0) {
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(m(i, i) - guess) < std::abs(m(best, best) - guess)) best = i;
    v0 = Eigen::VectorXcd::Zero(n);
    v0(best) = 1.0;
  }
  Tracked t{guess, v0.normalized(), false};
  const double scale = std::max(1.0, std::abs(guess));
  for (int it = 0; it < 40; ++it) {
    MatrixXcd shifted = m;
    shifted.diagonal().array() -= t.mu;
    Eigen::VectorXcd w = shifted.partialPivLu().solve(t.v);
    if (!w.allFinite() || w.norm() == 0.0) {
      t.ok = true;
      break;
    }
    t.v = w.normalized();
    const cplx next = t.v.dot(m * t.v);
    const double step = std::abs(next - t.mu);
    t.mu = next;
    if (step < 1e-14 * scale && it > 0) {
      t.ok = true;
      break;
    }
  }
  return t;
}

// Tracks one eigenvalue from guess; falls back to the full spectrum when the iteration jumps.
Tracked track(const MatrixXcd& m, cplx guess, const Eigen::VectorXcd& v0, double tol, double max_jump) {
  Tracked t = rqi(m, guess, v0);
  if (!t.ok || std::abs(t.mu - guess) > max_jump) {
    const cplx mu = pick_nearest(spectrum(m), guess, tol, true);
    t = rqi(m, mu, Eigen::VectorXcd());
    t.mu = mu;
  }
  return t;
}

// Embeds a coefficient vector of size 2N into the nested basis of size 2*N2.
Eigen::VectorXcd embed(const Eigen::VectorXcd& v, int N, int N2) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(2 * N2);
  out.head(N) = v.head(N);
  out.segment(N2, N) = v.tail(N);
  return out;
}

void check_lambda(cplx lambda, double nu0) {
  if (!(std::abs(lambda.imag()) <= nu0) || !std::isfinite(lambda.real()))
    throw Error(ErrorKind::Domain, fmt::format("|Im lambda| = {} exceeds the strip width {}", std::abs(lambda.imag()), nu0));
}

}  // namespace

void check_mode(const AngularMode& mode) {
  if (!is_half_integer(mode.k)) throw Error(ErrorKind::Domain, fmt::format("k = {} is not a half-integer", mode.k));
  if (mode.l == 0) throw Error(ErrorKind::Domain, "l must be nonzero");
}

double exact_eigenvalue_a0(const AngularMode& mode) {
  check_mode(mode);
  const double n = std::abs(mode.k) - 0.5 + std::abs(mode.l);
  return mode.l > 0 ? n : -n;
}

AngularCoupling angular_coupling(const BlackHoleParams& p, cplx lambda) {
  return AngularCoupling{p.a * p.a * p.Lambda / 3.0, p.a * lambda, p.a * p.m};
}

AngularDiscretization discretize(const BlackHoleParams& p, double k, cplx lambda, int N) {
  if (N < 16) throw Error(ErrorKind::Refusal, fmt::format("N = {} below the minimum 16", N));
  check_mode(AngularMode{k, 1});
  const SpinBasis bs(k, N);
  const AngularCoupling c = angular_coupling(p, lambda);
  const SectorParts sp = sector_parts(bs, c.zeta);
  AngularDiscretization out;
  out.k = k;
  out.N = N;
  out.coupling = c;
  out.massive = p.m > 0.0;
  if (!out.massive) {
    out.matrix = sector_matrix(sp, c.xi, 0.0);
    out.dmatrix = cplx(p.a) * sp.dxi;
  } else {
    out.matrix = MatrixXcd::Zero(4 * N, 4 * N);
    out.dmatrix = MatrixXcd::Zero(4 * N, 4 * N);
    out.matrix.topLeftCorner(2 * N, 2 * N) = sector_matrix(sp, c.xi, c.nu);
    out.matrix.bottomRightCorner(2 * N, 2 * N) = sector_matrix(sp, c.xi, -c.nu);
    out.dmatrix.topLeftCorner(2 * N, 2 * N) = cplx(p.a) * sp.dxi;
    out.dmatrix.bottomRightCorner(2 * N, 2 * N) = cplx(p.a) * sp.dxi;
  }
  return out;
}

AngularEigenvalue eigenvalue(const BlackHoleParams& p, const AngularMode& mode, cplx lambda, const AngularOptions& opt) {
  check_mode(mode);
  check_lambda(lambda, opt.nu0);
  if (opt.N < 16) throw Error(ErrorKind::Refusal, fmt::format("N = {} below the minimum 16", opt.N));
  const AngularCoupling c = angular_coupling(p, lambda);

  AngularEigenvalue out;
  out.mode = mode;
  out.lambda = lambda;
  out.continuation_distance = std::sqrt(c.zeta * c.zeta + std::norm(c.xi) + c.nu * c.nu);

  int N = opt.N;
  cplx mu = exact_eigenvalue_a0(mode);
  Eigen::VectorXcd v;
  {
    const SpinBasis bs(mode.k, N);
    const bool trivial = out.continuation_distance == 0.0;
    const int steps = trivial ? 1 : std::max(1, opt.steps);
    for (int s = 1; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      const SectorParts sp = sector_parts(bs, t * c.zeta);
      const Tracked tr = track(sector_matrix(sp, t * c.xi, t * c.nu), mu, v, opt.collision_tol, 0.3);
      mu = tr.mu;
      v = tr.v;
    }
  }
  out.N = N;
  out.mu = mu;
  if (opt.estimate_error) {
    while (true) {
      const int N2 = 2 * N;
      const SpinBasis bs(mode.k, N2);
      const SectorParts sp = sector_parts(bs, c.zeta);
      const Tracked tr = track(sector_matrix(sp, c.xi, c.nu), mu, embed(v, N, N2), opt.collision_tol, 0.1);
      out.est_error = std::abs(tr.mu - mu);
      out.mu = tr.mu;
      out.N = N2;
      if (out.est_error <= opt.refine_tol || N2 >= opt.max_N) break;
      N = N2;
      mu = tr.mu;
      v = tr.v;
    }
  }
  return out;
}

cplx eigenvalue_near(const BlackHoleParams& p, double k, cplx lambda, cplx guess, int N) {
  check_mode(AngularMode{k, 1});
  const SpinBasis bs(k, N);
  const AngularCoupling c = angular_coupling(p, lambda);
  const SectorParts sp = sector_parts(bs, c.zeta);
  return track(sector_matrix(sp, c.xi, c.nu), guess, Eigen::VectorXcd(), 1e-8, 0.3).mu;
}

double bound_C1() { return 2.0 * (std::exp(1.0 / 26.0) - 1.0) * (1.0 + 1.0 / 26.0); }
double bound_C2() { return bound_C1() / 4.0; }

MuBounds mu_bounds(const BlackHoleParams& p, const AngularMode& mode, double lambda) {
  check_mode(mode);
  const double n = std::abs(mode.k) - 0.5 + std::abs(mode.l);
  const double e = std::exp(1.0 / 26.0);
  const double slack = bound_C1() * std::abs(mode.k) + bound_C2() + std::abs(p.a) * (std::abs(lambda) + p.m);
  const MuBounds pos{(2.0 - e) * n - slack, e * n + slack};
  if (mode.l > 0) return pos;
  return MuBounds{-pos.upper, -pos.lower};
}

cplx squared_operator_eigenvalue(const BlackHoleParams& p, double k, cplx lambda, cplx target, int N) {
  if (N < 16) throw Error(ErrorKind::Refusal, fmt::format("N = {} below the minimum 16", N));
  if (p.a * p.m != 0.0) throw Error(ErrorKind::Refusal, "squared-operator check is defined for the massless operator");
  check_mode(AngularMode{k, 1});
  const SpinBasis bs(k, N);
  const AngularCoupling c = angular_coupling(p, lambda);
  const int Q = bs.Q;
  // phi_n = sqrt(2) a_n, phi_n' from the first-order system: a' = -mu b - (k/s) a.
  const MatrixXd phi = std::sqrt(2.0) * bs.A;
  MatrixXd dphi(Q, N);
  VectorXd sd(Q), dsd(Q), ks(Q);
  Eigen::VectorXcd b12(Q), b21(Q);
  for (int q = 0; q < Q; ++q) {
    const double th = bs.theta(q), s = std::sin(th), co = std::cos(th);
    const double D = 1.0 + c.zeta * co * co;
    sd(q) = std::sqrt(D);
    dsd(q) = -c.zeta * std::sin(2.0 * th) / (2.0 * sd(q));
    ks(q) = k / s;
    const double t1 = c.zeta * std::sin(2.0 * th) / 4.0;
    b12(q) = cplx(0, 1) * (t1 + (c.zeta * k - c.xi) * s) / sd(q);
    b21(q) = cplx(0, 1) * (t1 - (c.zeta * k - c.xi) * s) / sd(q);
    for (int j = 0; j < N; ++j)
      dphi(q, j) = std::sqrt(2.0) * (-bs.mu(j) * bs.B(q, j) - ks(q) * bs.A(q, j));
  }
  const cplx I(0, 1);
  // psi_j = D- phi_j = sqrt(Delta)(-i phi' - i (k/s) phi) + B21 phi.
  Eigen::MatrixXcd psi(Q, N);
  for (int q = 0; q < Q; ++q)
    for (int j = 0; j < N; ++j)
      psi(q, j) = sd(q) * (-I * dphi(q, j) - I * ks(q) * phi(q, j)) + b21(q) * phi(q, j);
  // <phi_i, D+ psi> = int i (sqrt(Delta) phi_i)' psi + i sqrt(Delta)(k/s) phi_i psi + B12 phi_i psi.
  Eigen::MatrixXcd left(Q, N);
  for (int q = 0; q < Q; ++q)
    for (int i = 0; i < N; ++i)
      left(q, i) = bs.w(q) * (I * (dsd(q) * phi(q, i) + sd(q) * dphi(q, i)) + I * sd(q) * ks(q) * phi(q, i) +
                              b12(q) * phi(q, i));
  const Eigen::MatrixXcd P = left.transpose() * psi;
  return pick_nearest(spectrum(P), target, 0.0, false);
}

double squared_operator_check(const BlackHoleParams& p, const AngularMode& mode, cplx lambda, int N) {
  AngularOptions opt;
  opt.N = N;
  opt.estimate_error = false;
  const cplx mu = eigenvalue(p, mode, lambda, opt).mu;
  const cplx ev = squared_operator_eigenvalue(p, mode.k, lambda, mu * mu, N);
  return std::abs(mu * mu - ev);
}

}  // namespace knds
