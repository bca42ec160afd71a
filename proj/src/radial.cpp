#include "knds/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "knds/errors.hpp"
#include "knds/series.hpp"
#include "knds/special.hpp"

namespace knds {

namespace {

namespace ser = knds::series;
using Mat = Eigen::MatrixXcd;
constexpr cplx I{0.0, 1.0};

// Gamma^1 = diag(1, 1, -1, -1); Gamma^0 and Gamma^2 as below.
Mat gamma0() {
  Mat g = Mat::Zero(4, 4);
  g(0, 2) = -I;
  g(1, 3) = I;
  g(2, 0) = I;
  g(3, 1) = -I;
  return g;
}

Mat gamma2() {
  Mat g = Mat::Zero(4, 4);
  g(0, 3) = 1.0;
  g(1, 2) = -1.0;
  g(2, 1) = -1.0;
  g(3, 0) = 1.0;
  return g;
}

double gamma1(int i) { return i < 2 ? 1.0 : -1.0; }
double sigma3(int i) { return i == 0 ? 1.0 : -1.0; }

// Coupling matrix M(a, b, c) without the lambda term: f' = -i Gamma^1 (M - lambda) f.
Mat coupling(RadialSystem sys, cplx omega, double a, double b, double c) {
  if (sys == RadialSystem::Dirac2) {
    Mat m(2, 2);
    m(0, 0) = c;
    m(1, 1) = c;
    m(0, 1) = omega * a - I * b;
    m(1, 0) = omega * a + I * b;
    return m;
  }
  static const Mat g0 = gamma0();
  static const Mat g2 = gamma2();
  Mat m = b * g0 + (omega * a) * g2;
  for (int i = 0; i < 4; ++i) m(i, i) += c;
  return m;
}

double gamma_diag(RadialSystem sys, int i) { return sys == RadialSystem::Dirac2 ? sigma3(i) : gamma1(i); }

// Indices of the components that are free at the given horizon.
std::vector<int> free_components(RadialSystem sys, int side) {
  if (sys == RadialSystem::Dirac2) return {side > 0 ? 0 : 1};
  return side > 0 ? std::vector<int>{0, 1} : std::vector<int>{2, 3};
}

HorizonExpansion build_expansion(const Spacetime& st, int side, int order) {
  const BlackHoleParams& p = st.params();
  const HorizonSet& h = st.horizons();
  HorizonExpansion e;
  e.side = side;
  e.kappa = h.kappa(side);
  e.x_ref = side * st.X0();
  const double rh = h.horizon(side);
  const double kh = e.kappa;

  const auto roots = h.roots();
  const auto kaps = h.kappas();
  std::vector<double> D, ratio;
  double log_abs_prod = 0.0;
  e.log_K = 2.0 * kh * st.map().constant();
  for (int i = 0; i < 4; ++i) {
    if (roots[i] == rh) continue;
    D.push_back(rh - roots[i]);
    ratio.push_back(kh / kaps[i]);
    log_abs_prod += std::log(std::abs(rh - roots[i]));
    e.log_K += kh / kaps[i] * std::log(std::abs(rh - roots[i]));
  }
  e.u_ref = std::exp(2.0 * kh * e.x_ref - e.log_K);
  const double ur = e.u_ref;

  // Work in sigma = s / u_ref and t = u / u_ref = w_hat^2.
  const int n = order / 2 + 2;
  ser::Series log_phi(n, 0.0), P{1.0};
  for (std::size_t i = 0; i < D.size(); ++i) {
    const double y = -side * ur / D[i];  // 1 - side s / D = 1 + y sigma
    double yp = y;
    for (int k = 1; k < n; ++k) {
      log_phi[k] += ratio[i] * (k % 2 == 1 ? yp : -yp) / k;
      yp *= y;
    }
    P = ser::mul(P, ser::Series{1.0, y}, n);
  }
  const ser::Series phi = ser::exp(log_phi, n);
  ser::Series t_of_sigma(n, 0.0);
  for (int k = 1; k < n; ++k) t_of_sigma[k] = phi[k - 1];
  const ser::Series sigma = ser::revert(t_of_sigma, n);
  ser::Series psi(n, 0.0);  // sigma / t
  for (int k = 0; k + 1 < n; ++k) psi[k] = sigma[k + 1];

  const ser::Series r_sig{rh, -side * ur};
  const ser::Series rho2 = ser::add(ser::mul(r_sig, r_sig, n), ser::Series{p.a * p.a}, n);
  const ser::Series g1_sig = ser::recip(rho2, n);
  const ser::Series g1 = ser::compose(g1_sig, sigma, n);
  const ser::Series r_t = ser::compose(r_sig, sigma, n);
  const ser::Series g2 = ser::mul(r_t, g1, n);
  const ser::Series sqrtP = ser::compose(ser::pow(P, 0.5, n), sigma, n);
  const ser::Series sqrt_psi = ser::pow(psi, 0.5, n);
  const double pref = std::sqrt(ur) * std::exp(0.5 * (std::log(p.Lambda / 3.0) + log_abs_prod));
  const ser::Series frak = ser::scale(ser::mul(ser::mul(sqrt_psi, sqrtP, n), g1, n), pref);
  const ser::Series rfrak = ser::mul(frak, r_t, n);

  e.inv_rho2.assign(order, 0.0);
  e.r_inv_rho2.assign(order, 0.0);
  e.frak_a.assign(order, 0.0);
  e.r_frak_a.assign(order, 0.0);
  e.dist.assign(order, 0.0);
  for (int k = 0; k < n; ++k) {
    if (2 * k < order) {
      e.inv_rho2[2 * k] = g1[k];
      e.r_inv_rho2[2 * k] = g2[k];
      e.dist[2 * k] = ur * sigma[k];
    }
    if (2 * k + 1 < order) {
      e.frak_a[2 * k + 1] = frak[k];
      e.r_frak_a[2 * k + 1] = rfrak[k];
    }
  }
  return e;
}

// Geometric coefficients of the recursion at a given depth (rescaled by rho^j).
struct GeomCoef {
  std::vector<double> a, b, c;
};

GeomCoef geometry(const RadialContext& ctx, const RadialProblem& prob, int side, double rho) {
  const HorizonExpansion& e = ctx.expansion(side);
  const HorizonSet& h = ctx.spacetime().horizons();
  const double m = ctx.params().m;
  const int L = e.order();
  GeomCoef g;
  g.a.resize(L);
  g.b.resize(L);
  g.c.resize(L);
  double f = 1.0;
  for (int j = 0; j < L; ++j) {
    g.a[j] = e.frak_a[j] * f;
    g.b[j] = m * e.r_frak_a[j] * f;
    g.c[j] = (h.aE * prob.k * e.inv_rho2[j] + h.qQ * e.r_inv_rho2[j]) * f;
    f *= rho;
  }
  return g;
}

cplx log_gamma_argument(const RadialContext& ctx, const RadialProblem& prob, int side) {
  const HorizonSet& h = ctx.spacetime().horizons();
  const double kap = h.kappa(side);
  const cplx d = prob.lambda - h.Omega(side, prob.k);
  return side > 0 ? 1.0 - 2.0 * d / (I * kap) : 1.0 + 2.0 * d / (I * kap);
}

double max_abs(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

int system_dim(RadialSystem s) { return s == RadialSystem::Dirac2 ? 2 : 4; }

RadialContext::RadialContext(const BlackHoleParams& p, int order)
    : st_(p), plus_(build_expansion(st_, 1, order)), minus_(build_expansion(st_, -1, order)) {}

void LogFrame::normalize() {
  const double s = max_abs(v);
  if (s > 0.0 && std::isfinite(s)) {
    v /= s;
    log_scale += std::log(s);
  }
}

HorizonSeries horizon_series(const RadialContext& ctx, const RadialProblem& prob, int side, const SeriesOptions& opt) {
  if (opt.J < 1) throw Error(ErrorKind::Domain, "series truncation J must be positive");
  const HorizonSet& h = ctx.spacetime().horizons();
  HorizonSeries s;
  s.side = side;
  s.dim = system_dim(prob.system);
  s.prob = prob;
  s.kappa = h.kappa(side);
  s.x_ref = side * (ctx.X0() + opt.depth);
  s.Omega = h.Omega(side, prob.k);
  s.tau = side > 0 ? prob.lambda - s.Omega : s.Omega - prob.lambda;

  const cplx z = log_gamma_argument(ctx, prob, side);
  const LogRGamma lg = log_rgamma(z);
  s.norm_zero = lg.is_zero;
  s.log_norm = lg.log_value;
  if (s.norm_zero)
    throw Error(ErrorKind::GammaPole, fmt::format("lambda = {}{:+}i is exceptional at the {} horizon", prob.lambda.real(),
                                                  prob.lambda.imag(), side > 0 ? "+" : "-"));

  const double rho = std::exp(-std::abs(s.kappa) * opt.depth);
  const GeomCoef g = geometry(ctx, prob, side, rho);
  const int L = static_cast<int>(g.a.size());
  const int dim = s.dim;
  const std::vector<int> freec = free_components(prob.system, side);
  const int nc = static_cast<int>(freec.size());

  std::vector<Mat> Ml(L);
  for (int l = 1; l < L; ++l) Ml[l] = coupling(prob.system, prob.omega, g.a[l], g.b[l], g.c[l]);

  const cplx Om = s.Omega - prob.lambda;
  Mat v0 = Mat::Zero(dim, nc);
  for (int c = 0; c < nc; ++c) v0(freec[c], c) = 1.0;
  s.coef.push_back(v0);
  Mat sum = v0;
  double max_term = 1.0;
  auto diag = [&](int i, int j) { return gamma_diag(prob.system, i) * (s.tau - I * s.kappa * double(j)) + Om; };

  int J = opt.J;
  for (int j = 1;; ++j) {
    Mat rhs = Mat::Zero(dim, nc);
    for (int l = 1; l <= j && l < L; ++l) rhs.noalias() -= Ml[l] * s.coef[j - l];
    Mat vj(dim, nc);
    for (int i = 0; i < dim; ++i) {
      const cplx d = diag(i, j);
      const double scale = std::abs(s.tau) + std::abs(s.kappa) * j + std::abs(Om) + 1.0;
      if (std::abs(d) < 1e-14 * scale)
        throw Error(ErrorKind::GammaPole, fmt::format("vanishing recursion denominator at order {}", j));
      vj.row(i) = rhs.row(i) / d;
    }
    s.coef.push_back(vj);
    sum += vj;
    max_term = std::max(max_term, max_abs(vj));

    if (j >= J) {
      const auto block_max = [&](int from, int to) {
        double m = 0.0;
        for (int q = from; q <= to; ++q) m = std::max(m, max_abs(s.coef[q]));
        return m;
      };
      const double m1 = block_max(j - 3, j);
      const double m0 = block_max(j - 7, j - 4);
      const double total = max_abs(sum);
      s.cancellation = max_term / total;
      if (m1 == 0.0) {
        s.tail = 0.0;
        break;
      }
      const double ratio = m0 > 0.0 ? std::pow(m1 / m0, 0.25) : 1.0;
      s.tail = ratio < 0.95 ? m1 * ratio / (1.0 - ratio) / total : std::numeric_limits<double>::infinity();
      if (s.tail < opt.tail_tol) break;
      if (j >= L - 1)
        throw Error(ErrorKind::RadiusExceeded,
                    fmt::format("horizon series not converged at J = {} (tail {:.3e})", j, s.tail));
      J = std::min(2 * J, L - 1);
    }
  }
  return s;
}

OutgoingValue evaluate_outgoing(const HorizonSeries& s, double x) {
  const double tol = 1e-12 * std::max(1.0, std::abs(s.x_ref));
  if (s.side * (x - s.x_ref) < -tol)
    throw Error(ErrorKind::Domain, fmt::format("x = {} outside the series region (reference {})", x, s.x_ref));
  const double w = std::exp(s.kappa * (x - s.x_ref));
  OutgoingValue out;
  const int J = s.J();
  out.v = s.coef[J];
  out.dv = double(J) * s.coef[J];
  for (int j = J - 1; j >= 0; --j) {
    out.v = out.v * w + s.coef[j];
    out.dv = out.dv * w + double(j) * s.coef[j];
  }
  out.dv *= s.kappa;
  out.phase = I * s.tau * x;
  out.log_norm = s.log_norm;
  return out;
}

LogFrame OutgoingValue::frame(bool include_norm) const {
  LogFrame f{v, phase + (include_norm ? log_norm : cplx(0.0))};
  f.normalize();
  return f;
}

Mat system_matrix(const RadialContext& ctx, const RadialProblem& prob, const RadialPoint& pt) {
  const Spacetime& st = ctx.spacetime();
  Mat m = coupling(prob.system, prob.omega, st.frak_a(pt), st.frak_b(pt), st.c(pt, prob.k));
  const int dim = system_dim(prob.system);
  for (int i = 0; i < dim; ++i) m(i, i) -= prob.lambda;
  for (int i = 0; i < dim; ++i) m.row(i) *= -I * gamma_diag(prob.system, i);
  return m;
}

namespace {

// Integrates Y' = A Y, or P' = A P + P A^T for a wedge product P = u ^ v (compound = true).
std::vector<LogFrame> integrate_state(const RadialContext& ctx, const RadialProblem& prob, const LogFrame& init,
                                      double x_from, const std::vector<double>& targets, const IntegrateOptions& opt,
                                      bool compound) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<cplx>;
  const ReggeWheeler& map = ctx.spacetime().map();
  const HorizonSet& h = ctx.spacetime().horizons();
  const int dim = static_cast<int>(init.v.rows());
  const int nc = static_cast<int>(init.v.cols());
  if (dim != system_dim(prob.system)) throw Error(ErrorKind::Domain, "frame dimension does not match the system");

  LogFrame cur = init;
  std::vector<LogFrame> out;
  out.reserve(targets.size());
  if (max_abs(cur.v) == 0.0) {
    for (std::size_t i = 0; i < targets.size(); ++i) out.push_back(cur);
    return out;
  }
  cur.normalize();

  auto rhs = [&](const State& y, State& dy, double r) {
    const RadialPoint pt{r, r - h.r_minus, h.r_plus - r};
    const Mat A = system_matrix(ctx, prob, pt) * map.dxdr(r);
    Eigen::Map<const Mat> Y(y.data(), dim, nc);
    Eigen::Map<Mat> DY(dy.data(), dim, nc);
    DY.noalias() = A * Y;
    if (compound) DY.noalias() += Y * A.transpose();
  };

  auto stepper = odeint::make_controlled(opt.tol, opt.tol, odeint::runge_kutta_fehlberg78<State>());
  double r = map.point(x_from).r;
  double x_prev = x_from;
  double dr = 0.0;
  for (double xt : targets) {
    if (xt == x_prev) {
      out.push_back(cur);
      continue;
    }
    const double r_to = map.point(xt).r;
    const double dir = r_to > r ? 1.0 : -1.0;
    if (dr == 0.0 || dr * dir < 0.0) dr = dir * std::min(1e-3, std::abs(r_to - r));
    State y(cur.v.data(), cur.v.data() + dim * nc);
    while ((r_to - r) * dir > 0.0) {
      if (std::abs(dr) > std::abs(r_to - r)) dr = r_to - r;
      const double r_before = r;
      const auto res = stepper.try_step(rhs, y, r, dr);
      if (res == odeint::fail) {
        if (std::abs(dr) < opt.min_step * std::max(1.0, std::abs(r)))
          throw Error(ErrorKind::Stiffness, fmt::format("step size underflow at r = {} (x = {})", r, map.x(r)));
        continue;
      }
      if (r == r_before) throw Error(ErrorKind::Stiffness, fmt::format("no progress at r = {}", r));
      double m = 0.0;
      for (const cplx& c : y) m = std::max(m, std::abs(c));
      if (!std::isfinite(m)) throw Error(ErrorKind::Stiffness, fmt::format("non-finite solution at r = {}", r));
      if (m > 0.0) {
        for (cplx& c : y) c /= m;
        cur.log_scale += std::log(m);
      }
    }
    r = r_to;
    cur.v = Eigen::Map<Mat>(y.data(), dim, nc);
    cur.normalize();
    out.push_back(cur);
    x_prev = xt;
  }
  return out;
}

// u ^ v as an antisymmetric matrix.
LogFrame wedge(const LogFrame& f) {
  LogFrame w{f.v.col(0) * f.v.col(1).transpose() - f.v.col(1) * f.v.col(0).transpose(), 2.0 * f.log_scale};
  w.normalize();
  return w;
}

}  // namespace

std::vector<LogFrame> integrate_interior(const RadialContext& ctx, const RadialProblem& prob, const LogFrame& init,
                                         double x_from, const std::vector<double>& targets,
                                         const IntegrateOptions& opt) {
  return integrate_state(ctx, prob, init, x_from, targets, opt, false);
}

LogFrame integrate_interior(const RadialContext& ctx, const RadialProblem& prob, const LogFrame& init, double x_from,
                            double x_to, const IntegrateOptions& opt) {
  return integrate_interior(ctx, prob, init, x_from, std::vector<double>{x_to}, opt).front();
}

namespace {

// 2x2: det[a, b] of two columns. 4x4: det[u1, u2, v1, v2] from the wedges P = u1 ^ u2, Q = v1 ^ v2.
cplx log_det(const LogFrame& a, const LogFrame& b) {
  const Mat& P = a.v;
  const Mat& Q = b.v;
  cplx d;
  if (P.rows() == 2) {
    d = P(0, 0) * Q(1, 0) - P(1, 0) * Q(0, 0);
  } else {
    d = P(0, 1) * Q(2, 3) - P(0, 2) * Q(1, 3) + P(0, 3) * Q(1, 2) + P(1, 2) * Q(0, 3) - P(1, 3) * Q(0, 2) +
        P(2, 3) * Q(0, 1);
  }
  return a.log_scale + b.log_scale + std::log(d);
}

// |det| over the product of the column-set norms; 1 for orthogonal frames.
double frame_sine(const LogFrame& a, const LogFrame& b) {
  const double ext = a.v.rows() == 2 ? 1.0 : 0.5;
  const double na = a.v.norm() * std::sqrt(ext), nb = b.v.norm() * std::sqrt(ext);
  return std::exp((log_det(a, b) - a.log_scale - b.log_scale).real()) / (na * nb);
}

}  // namespace

WronskianValue wronskian(const RadialContext& ctx, const RadialProblem& prob, const WronskianOptions& opt) {
  WronskianValue out;
  out.x_m = 0.0;
  const int per_side = system_dim(prob.system) / 2;

  for (int side : {1, -1}) {
    if (log_rgamma(log_gamma_argument(ctx, prob, side)).is_zero) {
      out.degenerate = true;
      out.W = 0.0;
      out.W_jost = std::numeric_limits<double>::quiet_NaN();
      out.log_W = -std::numeric_limits<double>::infinity();
      return out;
    }
  }

  SeriesOptions so = opt.series;
  HorizonSeries sp, sm;
  for (int attempt = 0;; ++attempt) {
    try {
      sp = horizon_series(ctx, prob, 1, so);
      sm = horizon_series(ctx, prob, -1, so);
      if (sp.cancellation > 1e4 || sm.cancellation > 1e4)
        throw Error(ErrorKind::RadiusExceeded, "cancellation in the horizon series");
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::RadiusExceeded || attempt + 1 >= opt.max_depth_tries) throw;
      const HorizonSet& h = ctx.spacetime().horizons();
      so.depth += 1.0 / std::min(std::abs(h.kappa_plus), std::abs(h.kappa_minus));
    }
  }
  out.depth = so.depth;
  out.J_plus = sp.J();
  out.J_minus = sm.J();

  const double X0 = ctx.X0();
  const bool compound = per_side == 2;
  LogFrame fp0 = evaluate_outgoing(sp, sp.x_ref).frame();
  LogFrame fm0 = evaluate_outgoing(sm, sm.x_ref).frame();
  if (compound) {
    fp0 = wedge(fp0);
    fm0 = wedge(fm0);
  }
  std::vector<double> tp{0.0}, tm{0.0};
  if (opt.drift) {
    tp = {0.5 * X0, 0.0, -0.5 * X0};
    tm = {-0.5 * X0, 0.0, 0.5 * X0};
  }
  const auto Fp = integrate_state(ctx, prob, fp0, sp.x_ref, tp, opt.integrate, compound);
  const auto Fm = integrate_state(ctx, prob, fm0, sm.x_ref, tm, opt.integrate, compound);

  const int i0 = opt.drift ? 1 : 0;
  out.log_jost = log_det(Fp[i0], Fm[i0]);
  out.sine = frame_sine(Fp[i0], Fm[i0]);
  if (opt.drift) {
    const cplx lp = log_det(Fp[0], Fm[2]);  // x_m = X0/2
    const cplx lm = log_det(Fp[2], Fm[0]);  // x_m = -X0/2
    out.drift = std::max(std::abs(std::exp(lp - out.log_jost) - 1.0), std::abs(std::exp(lm - out.log_jost) - 1.0));
  }
  out.log_norm = double(per_side) * (sp.log_norm + sm.log_norm);
  out.log_W = out.log_jost + out.log_norm;
  out.W_jost = std::exp(out.log_jost);
  out.W = std::exp(out.log_W);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Zero search.

namespace {

struct Sample {
  cplx z;
  cplx logW;
};

cplx eval_log_w(const RadialContext& ctx, const ResonanceSearch& s, cplx z) {
  RadialProblem prob;
  prob.k = s.k;
  prob.system = s.system;
  prob.lambda = s.vary_lambda ? z : s.fixed;
  prob.omega = s.vary_lambda ? s.fixed : z;
  WronskianOptions opt;
  opt.drift = false;
  const WronskianValue w = wronskian(ctx, prob, opt);
  if (w.degenerate) throw Error(ErrorKind::GammaPole, "exceptional point on the search path");
  return w.log_jost;
}

double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

// Adaptive boundary sampling: consecutive samples differ in arg by < pi/4 and in log|W| by < 1.
void sample_edge(const RadialContext& ctx, const ResonanceSearch& s, const Sample& a, const Sample& b, int depth,
                 std::vector<Sample>& out) {
  const double darg = wrap(b.logW.imag() - a.logW.imag());
  const double dmag = std::abs(b.logW.real() - a.logW.real());
  if ((std::abs(darg) < std::numbers::pi / 4 && dmag < 1.0) || depth > 18) {
    out.push_back(b);
    return;
  }
  const cplx zm = 0.5 * (a.z + b.z);
  const Sample m{zm, eval_log_w(ctx, s, zm)};
  sample_edge(ctx, s, a, m, depth + 1, out);
  sample_edge(ctx, s, m, b, depth + 1, out);
}

std::vector<Sample> boundary(const RadialContext& ctx, const ResonanceSearch& s, const ResonanceBox& b) {
  const cplx c[4] = {{b.re0, b.im0}, {b.re1, b.im0}, {b.re1, b.im1}, {b.re0, b.im1}};
  const int per_edge = 8;
  std::vector<Sample> pts;
  Sample prev{c[0], eval_log_w(ctx, s, c[0])};
  pts.push_back(prev);
  for (int e = 0; e < 4; ++e) {
    for (int i = 1; i <= per_edge; ++i) {
      const cplx z = c[e] + (c[(e + 1) % 4] - c[e]) * (double(i) / per_edge);
      const Sample nx{z, (e == 3 && i == per_edge) ? pts.front().logW : eval_log_w(ctx, s, z)};
      sample_edge(ctx, s, prev, nx, 0, pts);
      prev = pts.back();
    }
  }
  return pts;
}

int winding_of(const std::vector<Sample>& pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += wrap(pts[i].logW.imag() - pts[i - 1].logW.imag());
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

// Exceptional points in lambda (zeros of the Gamma normalization) inside the box, each with the order of
// W_jost there, measured by the winding on a small square: -1 for a simple pole, 0 where the Jost
// solution stays regular.
struct Exceptional {
  cplx z;
  int order = 0;
};

std::vector<Exceptional> exceptional_points(const RadialContext& ctx, const ResonanceSearch& s, const ResonanceBox& b) {
  std::vector<Exceptional> out;
  if (!s.vary_lambda) return out;
  const HorizonSet& h = ctx.spacetime().horizons();
  for (int side : {1, -1}) {
    const double step = 0.5 * std::abs(h.kappa(side));
    for (int n = 1; n * step <= -b.im0; ++n) {
      const cplx z(h.Omega(side, s.k), -n * step);
      if (z.real() < b.re0 || z.real() > b.re1 || z.imag() < b.im0 || z.imag() > b.im1) continue;
      const double r = 1e-3 * step;
      const ResonanceBox small{z.real() - r, z.real() + r, z.imag() - r, z.imag() + r};
      out.push_back({z, winding_of(boundary(ctx, s, small))});
    }
  }
  return out;
}

// Power sums s_p = (1/2 pi i) \oint z^p d log W by midpoint rule on the sampled increments.
std::vector<cplx> power_sums(const std::vector<Sample>& pts, int n, cplx center) {
  std::vector<cplx> s(n + 1, 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const cplx d = cplx(pts[i].logW.real() - pts[i - 1].logW.real(), wrap(pts[i].logW.imag() - pts[i - 1].logW.imag()));
    const cplx zm = 0.5 * (pts[i].z + pts[i - 1].z) - center;
    cplx zp = 1.0;
    for (int p = 0; p <= n; ++p) {
      s[p] += zp * d;
      zp *= zm;
    }
  }
  for (cplx& v : s) v /= 2.0 * std::numbers::pi * I;
  return s;
}

std::vector<cplx> roots_from_power_sums(const std::vector<cplx>& s, int n) {
  // Newton identities: e_k = (1/k) sum_{i=1}^k (-1)^{i-1} e_{k-i} s_i.
  std::vector<cplx> e(n + 1, 0.0);
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    cplx acc = 0.0;
    for (int i = 1; i <= k; ++i) acc += (i % 2 == 1 ? 1.0 : -1.0) * e[k - i] * s[i];
    e[k] = acc / double(k);
  }
  // Polynomial z^n - e1 z^{n-1} + e2 z^{n-2} - ...
  Mat C = Mat::Zero(n, n);
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (int k = 1; k <= n; ++k) C(n - k, n - 1) = (k % 2 == 1 ? 1.0 : -1.0) * e[k];
  Eigen::ComplexEigenSolver<Mat> es(C);
  std::vector<cplx> r(n);
  for (int i = 0; i < n; ++i) r[i] = es.eigenvalues()(i);
  return r;
}

}  // namespace

int winding_number(const RadialContext& ctx, const ResonanceSearch& search, const ResonanceBox& box) {
  const int per_side = system_dim(search.system) / 2;
  int n = winding_of(boundary(ctx, search, box));
  n += per_side * static_cast<int>(exceptional_points(ctx, search, box).size());
  return n;
}

std::vector<RadialZero> radial_resonances(const RadialContext& ctx, const ResonanceSearch& search) {
  std::vector<RadialZero> zeros;
  std::vector<ResonanceBox> queue{search.box};
  const std::vector<Exceptional> all_exceptional = exceptional_points(ctx, search, search.box);
  int processed = 0;
  auto newton = [&](cplx z, double scale, bool& ok) {
    ok = false;
    for (int it = 0; it < 40; ++it) {
      const double hfd = 1e-6 * std::max(1.0, std::abs(z));
      const cplx l0 = eval_log_w(ctx, search, z);
      const cplx lp = eval_log_w(ctx, search, z + hfd);
      const cplx lm = eval_log_w(ctx, search, z - hfd);
      const cplx dlog = (std::exp(lp - l0) - std::exp(lm - l0)) / (2.0 * hfd);  // W'/W
      const cplx step = 1.0 / dlog;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return z;
      if (std::abs(step) < 1e-12 * std::max(1.0, std::abs(z)) + 1e-13 * scale) {
        ok = true;
        return z;
      }
    }
    return z;
  };

  while (!queue.empty()) {
    const ResonanceBox b = queue.back();
    queue.pop_back();
    if (++processed > search.max_boxes)
      throw Error(ErrorKind::Diagnostic, "zero search exceeded the box budget (persistent count mismatch)");
    const auto pts = boundary(ctx, search, b);
    int n = winding_of(pts);
    std::vector<Exceptional> exc;
    for (const Exceptional& e : all_exceptional)
      if (e.z.real() >= b.re0 && e.z.real() <= b.re1 && e.z.imag() >= b.im0 && e.z.imag() <= b.im1) {
        exc.push_back(e);
        n -= e.order;
      }
    if (n < 0) throw Error(ErrorKind::Diagnostic, fmt::format("negative winding number {} on a search box", n));
    if (n == 0) continue;
    auto split = [&]() {
      const double wr = b.re1 - b.re0, wi = b.im1 - b.im0;
      if (wr >= wi) {
        const double mid = b.re0 + 0.5 * wr + 1e-7 * wr;
        queue.push_back({b.re0, mid, b.im0, b.im1});
        queue.push_back({mid, b.re1, b.im0, b.im1});
      } else {
        const double mid = b.im0 + 0.5 * wi + 1e-7 * wi;
        queue.push_back({b.re0, b.re1, b.im0, mid});
        queue.push_back({b.re0, b.re1, mid, b.im1});
      }
    };
    if (n > 3) {
      split();
      continue;
    }
    const cplx center(0.5 * (b.re0 + b.re1), 0.5 * (b.im0 + b.im1));
    const double scale = std::max(b.re1 - b.re0, b.im1 - b.im0);
    double mean_mag = 0.0;
    for (const Sample& s : pts) mean_mag += s.logW.real();
    mean_mag /= double(pts.size());
    auto sums = power_sums(pts, n, center);
    for (const Exceptional& e : exc) {
      cplx zp = -double(e.order);
      for (int p = 0; p <= n; ++p, zp *= e.z - center) sums[p] += zp;
    }
    const auto guesses = roots_from_power_sums(sums, n);
    std::vector<cplx> found;
    bool good = true;
    for (const cplx& g : guesses) {
      bool ok = false;
      const cplx z = newton(center + g, scale, ok);
      const bool inside = z.real() >= b.re0 && z.real() <= b.re1 && z.imag() >= b.im0 && z.imag() <= b.im1;
      if (!ok || !inside) {
        good = false;
        break;
      }
      bool dup = false;
      for (const cplx& f : found) dup = dup || std::abs(f - z) < 1e-8 * std::max(1.0, std::abs(z));
      if (!dup) found.push_back(z);
    }
    if (!good || static_cast<int>(found.size()) != n) {
      // Count each distinct zero only once unless the guesses coincide (multiple zero).
      if (good && found.size() == 1) {
        RadialZero rz;
        rz.lambda = search.vary_lambda ? found[0] : search.fixed;
        rz.omega = search.vary_lambda ? search.fixed : found[0];
        rz.k = search.k;
        rz.winding_box = n;
        rz.multiplicity = n;
        rz.residual = std::exp(eval_log_w(ctx, search, found[0]).real() - mean_mag);
        zeros.push_back(rz);
        continue;
      }
      if (scale < 1e-6) throw Error(ErrorKind::Diagnostic, "winding/Newton count mismatch persists after subdivision");
      split();
      continue;
    }
    for (const cplx& z : found) {
      RadialZero rz;
      rz.lambda = search.vary_lambda ? z : search.fixed;
      rz.omega = search.vary_lambda ? search.fixed : z;
      rz.k = search.k;
      rz.winding_box = n;
      rz.residual = std::exp(eval_log_w(ctx, search, z).real() - mean_mag);
      zeros.push_back(rz);
    }
  }
  const int per_side = system_dim(search.system) / 2;
  for (const Exceptional& e : all_exceptional) {
    if (e.order + per_side <= 0) continue;
    RadialZero rz;
    rz.lambda = e.z;
    rz.omega = search.fixed;
    rz.k = search.k;
    rz.multiplicity = e.order + per_side;
    rz.winding_box = rz.multiplicity;
    rz.exceptional = true;
    zeros.push_back(rz);
  }
  std::sort(zeros.begin(), zeros.end(), [&](const RadialZero& a, const RadialZero& b) {
    const cplx za = search.vary_lambda ? a.lambda : a.omega;
    const cplx zb = search.vary_lambda ? b.lambda : b.omega;
    return za.real() != zb.real() ? za.real() < zb.real() : za.imag() < zb.imag();
  });
  return zeros;
}

// ---------------------------------------------------------------------------------------------
// Schrodinger reduction.

namespace {

struct CoefJet {
  cplx q, dq, c, dc;
};

// q = omega a(x), c(x, k) and their x-derivatives; d/dx = (Delta / (r^2 + a^2)) d/dr.
CoefJet coef_jet(const RadialContext& ctx, const RadialProblem& prob, double x) {
  const Spacetime& st = ctx.spacetime();
  const BlackHoleParams& p = st.params();
  const HorizonSet& h = st.horizons();
  const RadialPoint pt = st.map().point(x);
  const double r = pt.r;
  const double rho2 = r * r + p.a * p.a;
  const double D = st.delta(pt);
  const double dD = delta_r_prime(p, r);
  const double sq = std::sqrt(D);
  const double da_dr = dD / (2.0 * sq * rho2) - 2.0 * r * sq / (rho2 * rho2);
  const double dxr = D / rho2;
  const double num = h.aE * prob.k + h.qQ * r;
  const double dc_dr = h.qQ / rho2 - 2.0 * r * num / (rho2 * rho2);
  return {prob.omega * (sq / rho2), prob.omega * da_dr * dxr, num / rho2, dc_dr * dxr};
}

}  // namespace

cplx schrodinger_potential(const RadialContext& ctx, const RadialProblem& prob, double x, int sign) {
  const CoefJet j = coef_jet(ctx, prob, x);
  const cplx cl = j.c - prob.lambda;
  return j.q * j.q - cl * cl + double(sign) * j.dq;
}

SchrodingerCheck schrodinger_reduction_check(const RadialContext& ctx, const RadialProblem& prob, int grid,
                                             int spinors, unsigned seed, bool zero_c_prime) {
  if (prob.system != RadialSystem::Dirac2 || ctx.params().m != 0.0)
    throw Error(ErrorKind::Refusal, "the Schrodinger reduction is defined for the massless system");
  using V2 = Eigen::Vector2cd;
  using M2 = Eigen::Matrix2cd;
  const double s2 = 1.0 / std::sqrt(2.0);
  M2 U, Uinv, s1, s3;
  U << I * s2, -s2, I * s2, s2;
  Uinv << -I * s2, -I * s2, -s2, s2;
  s1 << 0, 1, 1, 0;
  s3 << 1, 0, 0, -1;

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double X = ctx.X0();
  SchrodingerCheck out;
  double ref = 0.0;
  std::vector<CoefJet> jets(grid);
  std::vector<double> xs(grid);
  for (int g = 0; g < grid; ++g) {
    xs[g] = -X + 2.0 * X * (g + 0.5) / grid;
    jets[g] = coef_jet(ctx, prob, xs[g]);
    if (zero_c_prime) {
      jets[g].c = ctx.spacetime().horizons().Omega_plus(prob.k);
      jets[g].dc = 0.0;
    }
  }
  for (int t = 0; t < spinors; ++t) {
    // f_i(x) = A_i exp(-(x - x_i)^2 / s_i^2 + i k_i x)
    cplx A[2];
    double x0[2], sw[2], kk[2];
    for (int i = 0; i < 2; ++i) {
      A[i] = cplx(uni(rng), uni(rng));
      x0[i] = 0.5 * X * uni(rng);
      sw[i] = 0.5 * X * (1.0 + 0.5 * (uni(rng) + 1.0));
      kk[i] = 2.0 * uni(rng);
    }
    for (int g = 0; g < grid; ++g) {
      const double x = xs[g];
      V2 f, df, d2f;
      for (int i = 0; i < 2; ++i) {
        const cplx e = A[i] * std::exp(-(x - x0[i]) * (x - x0[i]) / (sw[i] * sw[i]) + I * kk[i] * x);
        const cplx p1 = -2.0 * (x - x0[i]) / (sw[i] * sw[i]) + I * kk[i];
        f(i) = e;
        df(i) = p1 * e;
        d2f(i) = (p1 * p1 - 2.0 / (sw[i] * sw[i])) * e;
      }
      const CoefJet& j = jets[g];
      const cplx cl = j.c - prob.lambda;
      // D- f = i s3 f' - q s1 f - (c - lambda) f;  D+ g = i s3 g' - q s1 g + (c - lambda) g.
      const V2 gv = I * (s3 * df) - j.q * (s1 * f) - cl * f;
      const V2 dg = I * (s3 * d2f) - j.dq * (s1 * f) - j.q * (s1 * df) - j.dc * f - cl * df;
      const V2 lhs = I * (s3 * dg) - j.q * (s1 * gv) + cl * gv;
      // U^{-1} diag(P-, P+) U f with P^{+-} = -d^2 + q^2 - (c - lambda)^2 +- q'.
      const V2 Uf = U * f, Ud2f = U * d2f;
      V2 Pu;
      Pu(0) = -Ud2f(0) + (j.q * j.q - cl * cl - j.dq) * Uf(0);
      Pu(1) = -Ud2f(1) + (j.q * j.q - cl * cl + j.dq) * Uf(1);
      const V2 base = Uinv * Pu;
      const V2 comm = I * j.dc * (s3 * f);
      ref = std::max(ref, lhs.cwiseAbs().maxCoeff());
      out.residual = std::max(out.residual, (lhs - (base - comm)).cwiseAbs().maxCoeff());
      out.residual_flipped = std::max(out.residual_flipped, (lhs - (base + comm)).cwiseAbs().maxCoeff());
    }
  }
  if (ref > 0.0) {
    out.residual /= ref;
    out.residual_flipped /= ref;
  }
  return out;
}

}  // namespace knds
