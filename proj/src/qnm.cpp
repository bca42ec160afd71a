#include "knds/qnm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>

#include <fmt/format.h>

#include "knds/errors.hpp"
#include "knds/semiclassical.hpp"

namespace knds {

namespace {

std::string cstr(cplx z) { return fmt::format("{}{:+}i", z.real(), z.imag()); }

}  // namespace

double QnmMode::l_half() const { return std::abs(k) - 0.5 + std::abs(l); }

QnmOptions QnmOptions::from_env() {
  QnmOptions o;
  if (const char* s = std::getenv("QNM_TOL_OVERRIDE")) {
    char* end = nullptr;
    const double f = std::strtod(s, &end);
    if (end == s || !(f > 0.0) || !std::isfinite(f))
      throw Error(ErrorKind::Domain, fmt::format("QNM_TOL_OVERRIDE = '{}' is not a positive number", s));
    o.step_tol *= f;
    o.floor_tol *= f;
    o.residual_tol *= f;
  }
  return o;
}

RadialSystem qnm_system(const BlackHoleParams&) { return RadialSystem::Dirac2; }

cplx leading_seed(const BlackHoleParams& p, const QnmMode& mode) {
  BlackHoleParams p0 = p;
  p0.a = 0.0;
  const cplx lead = leading_qnm(p0, mode.l_half(), mode.m);
  return {mode.l > 0 ? lead.real() : -lead.real(), lead.imag()};
}

namespace {

class CombinedCondition {
 public:
  CombinedCondition(const BlackHoleParams& p, const QnmMode& mode, const QnmOptions& opt)
      : p_(p), mode_(mode), opt_(opt), ctx_(p) {}

  cplx mu(cplx lambda, cplx guess) const {
    if (p_.a == 0.0) return exact_eigenvalue_a0(AngularMode{mode_.k, mode_.l});
    return eigenvalue_near(p_, mode_.k, lambda, guess, opt_.angular_N);
  }

  cplx initial_mu(cplx lambda) const {
    if (p_.a == 0.0) return exact_eigenvalue_a0(AngularMode{mode_.k, mode_.l});
    AngularOptions ao;
    ao.N = opt_.angular_N;
    ao.estimate_error = false;
    return eigenvalue(p_, AngularMode{mode_.k, mode_.l}, lambda, ao).mu;
  }

  WronskianValue value(cplx lambda, cplx mu) const {
    RadialProblem prob{lambda, mu, mode_.k, qnm_system(p_)};
    return wronskian(ctx_, prob, opt_.wronskian);
  }

  // Jost normalization: same zeros away from the exceptional points, without the Gamma growth.
  cplx log_g(cplx lambda, cplx mu) const {
    const WronskianValue w = value(lambda, mu);
    if (w.degenerate) throw Error(ErrorKind::GammaPole, fmt::format("normalization vanishes at lambda = {}", cstr(lambda)));
    return w.log_jost;
  }

 private:
  BlackHoleParams p_;
  QnmMode mode_;
  QnmOptions opt_;
  RadialContext ctx_;
};

QnmRecord newton(const BlackHoleParams& p, const QnmMode& mode, cplx seed, const QnmOptions& opt) {
  const CombinedCondition g(p, mode, opt);
  QnmRecord rec;
  rec.mode = mode;
  rec.seed = seed;
  cplx lam = seed;
  cplx mu = g.initial_mu(lam);
  std::string trace;
  double prev_rel = std::numeric_limits<double>::infinity();
  bool done = false;
  for (int it = 1; it <= opt.max_iter && !done; ++it) {
    const double h = opt.fd_step * std::max(1.0, std::abs(lam));
    mu = g.mu(lam, mu);
    const cplx l0 = g.log_g(lam, mu);
    const cplx lp = g.log_g(lam + h, g.mu(lam + h, mu));
    const cplx lm = g.log_g(lam - h, g.mu(lam - h, mu));
    const cplx dlog = (std::exp(lp - l0) - std::exp(lm - l0)) / (2.0 * h);  // G'/G
    const cplx step = 1.0 / dlog;
    lam -= step;
    const double rel = std::abs(step) / std::max(1.0, std::abs(lam));
    trace += fmt::format("  it {}: lambda = {:.17g}{:+.17g}i, step = {:.3e}\n", it, lam.real(), lam.imag(), rel);
    rec.iterations = it;
    rec.step = rel;
    if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag())) break;
    if (rel < opt.step_tol) {
      done = true;
    } else if (it >= 3 && rel < opt.floor_tol && prev_rel < opt.floor_tol) {
      rec.noise_floor = true;
      done = true;
    }
    prev_rel = rel;
  }
  if (!done)
    throw Error(ErrorKind::NonConvergence, fmt::format("mode (k={}, l={}, m={}) seed {}: no convergence in {} iterations\n{}",
                                                       mode.k, mode.l, mode.m, cstr(seed), opt.max_iter, trace));
  rec.lambda = lam;
  rec.mu = g.mu(lam, mu);
  rec.residual = g.value(lam, rec.mu).sine;
  if (!(rec.residual <= opt.residual_tol))
    throw Error(ErrorKind::NonConvergence,
                fmt::format("mode (k={}, l={}, m={}): residual {:.3e} above tolerance {:.3e}\n{}", mode.k, mode.l,
                            mode.m, rec.residual, opt.residual_tol, trace));
  if (!(lam.imag() < 0.0))
    throw Error(ErrorKind::NonConvergence,
                fmt::format("mode (k={}, l={}, m={}): limit {} outside the lower half-plane", mode.k, mode.l, mode.m, cstr(lam)));
  return rec;
}

}  // namespace

QnmRecord qnm_solve(const BlackHoleParams& p, const QnmMode& mode, std::optional<cplx> seed, const QnmOptions& opt) {
  check_mode(AngularMode{mode.k, mode.l});
  if (mode.m < 0) throw Error(ErrorKind::Domain, fmt::format("overtone m = {} is negative", mode.m));
  if (seed) {
    if (!(std::abs(seed->imag()) < 2.0)) throw Error(ErrorKind::Domain, fmt::format("seed {} outside the strip", cstr(*seed)));
    return newton(p, mode, *seed, opt);
  }
  const cplx lead = leading_seed(p, mode);
  if (p.a == 0.0) {
    QnmRecord rec = newton(p, mode, lead, opt);
    rec.auto_seed = true;
    return rec;
  }

  BlackHoleParams pj = p;
  pj.a = 0.0;
  QnmRecord rec = newton(pj, mode, lead, opt);
  int total = rec.iterations;
  const int steps = std::max(1, opt.continuation_steps);
  for (int j = 1; j <= steps; ++j) {
    pj.a = p.a * j / steps;
    rec = newton(pj, mode, rec.lambda, opt);
    total += rec.iterations;
  }
  rec.seed = lead;
  rec.auto_seed = true;
  rec.iterations = total;
  return rec;
}

std::vector<QnmMode> request_modes(const SpectrumRequest& req) {
  if (!req.modes.empty()) return req.modes;
  std::vector<QnmMode> modes;
  for (double k : req.ks)
    for (int l : req.ls)
      for (int m : req.ms) modes.push_back({k, l, m});
  return modes;
}

namespace {

SpectrumTable assemble(const std::vector<QnmMode>& modes, std::vector<std::optional<QnmRecord>>& recs,
                       std::vector<std::string>& errs) {
  SpectrumTable t;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (!recs[i]) {
      t.failures.push_back({modes[i], errs[i]});
      continue;
    }
    const QnmRecord& r = *recs[i];
    const double scale = std::max(1.0, std::abs(r.lambda));
    auto dup = std::find_if(t.records.begin(), t.records.end(),
                            [&](const QnmRecord& o) { return std::abs(o.lambda - r.lambda) < 1e-8 * scale; });
    if (dup != t.records.end()) {
      t.duplicates.push_back({modes[i], fmt::format("duplicate of mode (k={}, l={}, m={})", dup->mode.k, dup->mode.l,
                                                  dup->mode.m)});
      continue;
    }
    t.records.push_back(r);
  }
  std::stable_sort(t.records.begin(), t.records.end(), [](const QnmRecord& a, const QnmRecord& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return -a.lambda.imag() < -b.lambda.imag();
  });
  return t;
}

void solve_one(const BlackHoleParams& p, const SpectrumRequest& req, const std::vector<QnmMode>& modes,
               const QnmOptions& opt, std::size_t i, std::vector<std::optional<QnmRecord>>& recs,
               std::vector<std::string>& errs) {
  try {
    const std::optional<cplx> seed = i < req.seeds.size() ? req.seeds[i] : std::nullopt;
    recs[i] = qnm_solve(p, modes[i], seed, opt);
  } catch (const std::exception& e) {
    errs[i] = e.what();
  }
}

}  // namespace

SpectrumTable spectrum_table(const BlackHoleParams& p, const SpectrumRequest& req, const QnmOptions& opt, int workers) {
  const auto modes = request_modes(req);
  const long n = static_cast<long>(modes.size());
  std::vector<std::optional<QnmRecord>> recs(modes.size());
  std::vector<std::string> errs(modes.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, workers))
  for (long i = 0; i < n; ++i) solve_one(p, req, modes, opt, static_cast<std::size_t>(i), recs, errs);
  return assemble(modes, recs, errs);
}

SpectrumTable spectrum_table_serial(const BlackHoleParams& p, const SpectrumRequest& req, const QnmOptions& opt) {
  const auto modes = request_modes(req);
  std::vector<std::optional<QnmRecord>> recs(modes.size());
  std::vector<std::string> errs(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) solve_one(p, req, modes, opt, i, recs, errs);
  return assemble(modes, recs, errs);
}

namespace {

// Runs body(i) for i < n in parallel; rethrows the first failure in index order.
template <class F>
void parallel_indexed(long n, int workers, F body) {
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, workers))
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (const auto& e : errs)
    if (e) std::rethrow_exception(e);
}

// Least-squares line y = c + e x.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double e = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {(sy - e * sx) / n, e};
}

}  // namespace

MassReport mass_independence_experiment(const BlackHoleParams& p, const std::vector<double>& masses,
                                        const std::vector<QnmMode>& modes, const QnmOptions& opt, int workers) {
  BlackHoleParams p0 = p;
  p0.m = 0.0;
  const long nm = static_cast<long>(modes.size());
  std::vector<QnmRecord> base(modes.size());
  parallel_indexed(nm, workers, [&](long i) { base[i] = qnm_solve(p0, modes[i], std::nullopt, opt); });

  MassReport rep;
  rep.rows.resize(masses.size() * modes.size());
  const long total = static_cast<long>(rep.rows.size());
  parallel_indexed(total, workers, [&](long t) {
    const std::size_t im = static_cast<std::size_t>(t) / modes.size(), id = static_cast<std::size_t>(t) % modes.size();
    BlackHoleParams pm = p;
    pm.m = masses[im];
    MassRow& row = rep.rows[t];
    row.mass = masses[im];
    row.mode = modes[id];
    row.lambda0 = base[id].lambda;
    row.lambda = masses[im] == 0.0 ? base[id].lambda : qnm_solve(pm, modes[id], base[id].lambda, opt).lambda;
    row.diff = std::abs(row.lambda - row.lambda0);
  });

  for (std::size_t im = 0; im < masses.size(); ++im) {
    MassFit f;
    f.mass = masses[im];
    f.shift_bound = std::abs(p.a) * masses[im];
    std::vector<double> lx, ly;
    for (std::size_t id = 0; id < modes.size(); ++id) {
      const MassRow& row = rep.rows[im * modes.size() + id];
      if (row.diff > 0.0) {
        lx.push_back(std::log(modes[id].l_half()));
        ly.push_back(std::log(row.diff));
      }
      if (p.a != 0.0 && masses[im] != 0.0) {
        BlackHoleParams pm = p;
        pm.m = masses[im];
        const cplx m0 = eigenvalue_near(p0, modes[id].k, row.lambda, base[id].mu, opt.angular_N);
        const cplx m1 = eigenvalue_near(pm, modes[id].k, row.lambda, m0, opt.angular_N);
        f.max_shift_mu = std::max(f.max_shift_mu, std::abs(m1 - m0));
      }
    }
    if (lx.size() >= 2) {
      const auto [c, e] = fit_line(lx, ly);
      f.constant = std::exp(c);
      f.exponent = e;
    }
    rep.fits.push_back(f);
  }
  return rep;
}

ConvergenceStudy convergence_study(const BlackHoleParams& p, double k, const std::vector<int>& ms,
                                   const std::vector<double>& l_halves, const QnmOptions& opt, int workers) {
  if (p.a != 0.0) throw Error(ErrorKind::Refusal, "convergence study requires a = 0");
  ConvergenceStudy st;
  for (int m : ms)
    for (double L : l_halves) {
      const double l = L - std::abs(k) + 0.5;
      if (l < 1.0 || l != std::floor(l))
        throw Error(ErrorKind::Domain, fmt::format("l + 1/2 = {} not reachable with k = {}", L, k));
      ConvergenceRow row;
      row.mode = {k, static_cast<int>(l), m};
      row.l_half = L;
      st.rows.push_back(row);
    }
  const long n = static_cast<long>(st.rows.size());
  parallel_indexed(n, workers, [&](long i) {
    ConvergenceRow& row = st.rows[i];
    row.lambda = qnm_solve(p, row.mode, std::nullopt, opt).lambda;
    row.leading = leading_qnm(p, row.l_half, row.mode.m);
    row.error = std::abs(row.lambda - row.leading);
  });

  const PhotonSphereData d = photon_sphere(p);
  const std::size_t nl = l_halves.size();
  for (std::size_t im = 0; im < ms.size(); ++im) {
    const int m = ms[im];
    // lambda - leading = c(L) B with c(L) = -(alpha/z0)(m + 1/2)/L, B fitted from the first two L.
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < std::min<std::size_t>(2, nl); ++j) {
      const ConvergenceRow& row = st.rows[im * nl + j];
      const double c = -(d.alpha / d.z0) * (m + 0.5) / row.l_half;
      num += c * (row.lambda - row.leading);
      den += c * c;
    }
    const cplx B = den > 0.0 ? num / den : 0.0;
    st.bracket.push_back(B);
    const cplx b12 = (B + d.alpha / (4.0 * d.z0 * d.z0) * (2.0 * m + 1.0)) / cplx(0.0, 1.0);
    for (std::size_t j = 0; j < nl; ++j) {
      ConvergenceRow& row = st.rows[im * nl + j];
      row.next = next_order_qnm(p, row.l_half, m, 0.0, b12);
      row.error_next = std::abs(row.lambda - row.next);
      row.ratio = j > 0 ? row.error / st.rows[im * nl + j - 1].error : 0.0;
    }
  }
  return st;
}

ZeemanRow zeeman_experiment(const BlackHoleParams& p, double k, const QnmOptions& opt) {
  ZeemanRow z;
  z.a = p.a;
  z.k = std::abs(k);
  z.lambda_plus = qnm_solve(p, {z.k, 1, 0}, std::nullopt, opt).lambda;
  z.lambda_minus = qnm_solve(p, {-z.k, 1, 0}, std::nullopt, opt).lambda;
  z.slope = (z.lambda_plus - z.lambda_minus).real() / (2.0 * z.k);
  z.slope_formula = zeeman_slopes(p).minus;
  z.rel_error = std::abs(z.slope - z.slope_formula) / std::abs(z.slope_formula);
  return z;
}

namespace {

double grid_sine(const RadialContext& ctx, double k, double lam, double om) {
  WronskianOptions o;
  o.drift = false;
  return wronskian(ctx, RadialProblem{lam, om, k, RadialSystem::Dirac2}, o).sine;
}

RealGridScan reduce(const std::vector<double>& vals, double lam0, double dl, double om0, double dw, int n) {
  RealGridScan s;
  s.min_sine = std::numeric_limits<double>::infinity();
  s.evaluations = static_cast<int>(vals.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = vals[static_cast<std::size_t>(i) * n + j];
      if (v < s.min_sine || std::isnan(v)) {
        s.min_sine = v;
        s.lambda_at_min = lam0 + i * dl;
        s.omega_at_min = om0 + j * dw;
      }
    }
  return s;
}

}  // namespace

RealGridScan real_axis_scan(const RadialContext& ctx, double k, double lam0, double lam1, double om0, double om1,
                            int n, int workers) {
  const double dl = n > 1 ? (lam1 - lam0) / (n - 1) : 0.0, dw = n > 1 ? (om1 - om0) / (n - 1) : 0.0;
  std::vector<double> vals(static_cast<std::size_t>(n) * n);
  const long total = static_cast<long>(vals.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(std::max(1, workers))
  for (long t = 0; t < total; ++t) vals[t] = grid_sine(ctx, k, lam0 + (t / n) * dl, om0 + (t % n) * dw);
  return reduce(vals, lam0, dl, om0, dw, n);
}

RealGridScan real_axis_scan_serial(const RadialContext& ctx, double k, double lam0, double lam1, double om0,
                                   double om1, int n) {
  const double dl = n > 1 ? (lam1 - lam0) / (n - 1) : 0.0, dw = n > 1 ? (om1 - om0) / (n - 1) : 0.0;
  std::vector<double> vals(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) vals[static_cast<std::size_t>(i) * n + j] = grid_sine(ctx, k, lam0 + i * dl, om0 + j * dw);
  return reduce(vals, lam0, dl, om0, dw, n);
}

}  // namespace knds
