#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "knds/angular.hpp"
#include "knds/errors.hpp"
#include "knds/qnm.hpp"
#include "knds/radial.hpp"
#include "knds/semiclassical.hpp"
#include "knds/spacetime.hpp"
#include "params_io.hpp"

using namespace knds;
using io::num;

namespace {

struct RunConfig {
  std::string params_file;
  std::optional<double> M, Q, a, Lambda, q, mass;
  std::string format = "csv";
  std::string output;
  int workers = 1;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("-p,--params", cfg.params_file, "key=value parameter file (M, Q, a, Lambda, q, mass)");
  sub->add_option("--M", cfg.M, "black-hole mass");
  sub->add_option("--Q", cfg.Q, "black-hole charge");
  sub->add_option("--a", cfg.a, "rotation parameter");
  sub->add_option("--Lambda", cfg.Lambda, "cosmological constant");
  sub->add_option("--q", cfg.q, "field charge");
  sub->add_option("--mass", cfg.mass, "field mass");
  sub->add_option("-f,--format", cfg.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("-o,--output", cfg.output, "output path (default stdout)");
  sub->add_option("-w,--workers", cfg.workers, "worker threads")->check(CLI::PositiveNumber);
}

BlackHoleParams load_params(const RunConfig& cfg) {
  BlackHoleParams p;
  try {
    if (!cfg.params_file.empty()) p = io::read_params_file(cfg.params_file, p);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (cfg.M) p.M = *cfg.M;
  if (cfg.Q) p.Q = *cfg.Q;
  if (cfg.a) p.a = *cfg.a;
  if (cfg.Lambda) p.Lambda = *cfg.Lambda;
  if (cfg.q) p.q = *cfg.q;
  if (cfg.mass) p.m = *cfg.mass;
  return p;
}

QnmOptions load_options() {
  try {
    return QnmOptions::from_env();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) throw Error(ErrorKind::Domain, fmt::format("cannot write '{}'", cfg.output));
  out << text;
}

void emit_table(const RunConfig& cfg, const io::Table& t) { emit(cfg, cfg.format == "json" ? t.json() : t.csv()); }

std::string str(int v) { return std::to_string(v); }

// ---------------------------------------------------------------------------------------------

int run_validate(const RunConfig& cfg) {
  const BlackHoleParams p = load_params(cfg);
  const Admissibility adm = validate_params(p);
  io::Table t({"admissible", "rotation_ratio", "rotation_bound", "E_minus", "F", "Mcrit_minus", "Mcrit_plus", "violated"});
  t.add({adm.admissible ? "true" : "false", num(adm.rotation_ratio), num(adm.rotation_bound), num(adm.E_minus),
         num(adm.F), num(adm.Mcrit_minus), num(adm.Mcrit_plus), adm.violated},
        {true, true, true, true, true, true, true, false});
  emit_table(cfg, t);
  if (!adm.admissible) {
    std::cerr << "inadmissible: " << adm.violated << "\n";
    return 1;
  }
  return 0;
}

int run_horizons(const RunConfig& cfg) {
  const HorizonSet h = horizon_roots(load_params(cfg));
  io::Table t({"r_n", "r_c", "r_minus", "r_plus", "kappa_n", "kappa_c", "kappa_minus", "kappa_plus"});
  std::vector<std::string> cells;
  for (double r : h.roots()) cells.push_back(num(r));
  for (double k : h.kappas()) cells.push_back(num(k));
  t.add(cells, std::vector<bool>(8, true));
  emit_table(cfg, t);
  return 0;
}

struct AngularArgs {
  std::vector<double> ks{0.5};
  std::vector<int> ls{1};
  double lambda_re = 0, lambda_im = 0;
  int N = 64;
};

int run_angular(const RunConfig& cfg, const AngularArgs& a) {
  const BlackHoleParams p = load_params(cfg);
  AngularOptions opt;
  opt.N = a.N;
  io::Table t({"k", "l", "lambda_re", "lambda_im", "mu_re", "mu_im", "N", "est_error"});
  for (double k : a.ks)
    for (int l : a.ls) {
      const AngularEigenvalue e = eigenvalue(p, AngularMode{k, l}, cplx(a.lambda_re, a.lambda_im), opt);
      t.add({num(k), str(l), num(a.lambda_re), num(a.lambda_im), num(e.mu.real()), num(e.mu.imag()), str(e.N),
             num(e.est_error)},
            std::vector<bool>(8, true));
    }
  emit_table(cfg, t);
  return 0;
}

struct RadialArgs {
  double k = 0.5;
  std::string vary = "lambda";
  double fixed_re = 1, fixed_im = 0;
  std::vector<double> box{0.5, 2.0, -0.5, -0.01};
  int system = 2;
};

int run_radial(const RunConfig& cfg, const RadialArgs& a) {
  const BlackHoleParams p = load_params(cfg);
  const RadialContext ctx(p);
  ResonanceSearch s;
  s.vary_lambda = a.vary == "lambda";
  s.fixed = cplx(a.fixed_re, a.fixed_im);
  s.k = a.k;
  s.system = a.system == 4 ? RadialSystem::Dirac4 : RadialSystem::Dirac2;
  s.box = {a.box[0], a.box[1], a.box[2], a.box[3]};
  const auto zeros = radial_resonances(ctx, s);
  io::Table t({"lambda_re", "lambda_im", "omega_re", "omega_im", "k", "residual", "winding_box", "exceptional"});
  for (const RadialZero& z : zeros)
    t.add({num(z.lambda.real()), num(z.lambda.imag()), num(z.omega.real()), num(z.omega.imag()), num(z.k),
           num(z.residual), str(z.winding_box), z.exceptional ? "true" : "false"},
          std::vector<bool>(8, true));
  emit_table(cfg, t);
  return 0;
}

struct AsymptoticArgs {
  double lt = 1.5, kt = 1.0;
};

int run_asymptotics(const RunConfig& cfg, const AsymptoticArgs& a) {
  const BlackHoleParams p = load_params(cfg);
  const PhotonSphereData d = photon_sphere(p);
  const ZeemanSlopes z = zeeman_slopes(p);
  const KerrDsCheck c = kerr_ds_check(p);
  const std::vector<std::pair<std::string, double>> kv{
      {"r0", d.r0},
      {"z0", d.z0},
      {"alpha", d.alpha},
      {"H_per_ktilde", d.H_per_k},
      {"Fr0_plus", radial_symbol(p, a.lt, a.kt, +1)},
      {"Ftheta0", angular_symbol(p, a.lt, a.kt, +1).value},
      {"zeeman_slope_minus", z.minus},
      {"zeeman_slope_plus", z.plus}};
  const std::vector<std::pair<std::string, double>> kds{{"coef_l2", c.coef_l2},
                                                        {"coef_l2_closed", c.coef_l2_closed},
                                                        {"coef_alk", c.coef_alk},
                                                        {"coef_alk_closed", c.coef_alk_closed},
                                                        {"split", c.split},
                                                        {"split_closed", c.split_closed},
                                                        {"max_rel_error", c.max_rel_error}};
  std::string out;
  if (cfg.format == "json") {
    out = "{\n";
    for (const auto& [k, v] : kv) out += fmt::format("  \"{}\": {},\n", k, num(v));
    out += "  \"kerr_ds_check\": {";
    for (std::size_t i = 0; i < kds.size(); ++i) out += fmt::format("{}\"{}\": {}", i ? ", " : "", kds[i].first, num(kds[i].second));
    out += "}\n}\n";
  } else {
    out = "key,value\n";
    for (const auto& [k, v] : kv) out += k + "," + num(v) + "\n";
    for (const auto& [k, v] : kds) out += "kerr_ds_check." + k + "," + num(v) + "\n";
  }
  emit(cfg, out);
  return 0;
}

struct QnmArgs {
  std::vector<double> ks{0.5};
  std::vector<int> ls{1};
  std::vector<int> ms{0};
  std::string seed_file;
  bool compare_leading = false;
};

int run_qnm(const RunConfig& cfg, const QnmArgs& a) {
  const BlackHoleParams p = load_params(cfg);
  const QnmOptions opt = load_options();
  SpectrumRequest req;
  req.ks = a.ks;
  req.ls = a.ls;
  req.ms = a.ms;
  if (!a.seed_file.empty()) {
    std::vector<io::SeedEntry> seeds;
    try {
      seeds = io::read_seed_file(a.seed_file);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    for (const auto& s : seeds) {
      req.modes.push_back(s.mode);
      req.seeds.push_back(s.seed);
    }
  }
  const SpectrumTable tab = spectrum_table(p, req, opt, cfg.workers);

  std::vector<std::string> cols{"k", "l", "m", "lambda_re", "lambda_im", "residual", "seed_re", "seed_im",
                                "seed_kind", "method", "mu_re", "mu_im", "iterations"};
  if (a.compare_leading)
    for (const char* c : {"leading_re", "leading_im", "err"}) cols.push_back(c);
  io::Table t(cols);
  for (const QnmRecord& r : tab.records) {
    std::vector<std::string> cells{num(r.mode.k),       str(r.mode.l),         str(r.mode.m),
                                   num(r.lambda.real()), num(r.lambda.imag()), num(r.residual),
                                   num(r.seed.real()),   num(r.seed.imag()),   r.auto_seed ? "auto" : "explicit",
                                   r.method,             num(r.mu.real()),     num(r.mu.imag()),
                                   str(r.iterations)};
    std::vector<bool> numeric(cells.size(), true);
    numeric[8] = numeric[9] = false;
    if (a.compare_leading) {
      cplx lead = leading_qnm(p, r.mode.l_half(), r.mode.m);
      if (r.mode.l < 0) lead = cplx(-lead.real(), lead.imag());
      for (const std::string& s : {num(lead.real()), num(lead.imag()), num(std::abs(r.lambda - lead))}) {
        cells.push_back(s);
        numeric.push_back(true);
      }
    }
    t.add(cells, numeric);
  }
  emit_table(cfg, t);
  for (const QnmFailure& d : tab.duplicates)
    std::cerr << fmt::format("note: mode (k={}, l={}, m={}) {}\n", d.mode.k, d.mode.l, d.mode.m, d.message);
  for (const QnmFailure& f : tab.failures)
    std::cerr << fmt::format("failed: mode (k={}, l={}, m={}): {}\n", f.mode.k, f.mode.l, f.mode.m, f.message);
  return tab.failures.empty() ? 0 : 1;
}

struct ExperimentArgs {
  std::string name;
  std::vector<double> ks{0.5};
  std::vector<int> ms{0, 1};
  std::vector<double> l_halves{5, 10, 20};
  std::vector<double> masses{0.05, 0.1};
  int n = 50;
  double range = 5.0;
};

int run_experiment(const RunConfig& cfg, const ExperimentArgs& a) {
  const BlackHoleParams p = load_params(cfg);
  const QnmOptions opt = load_options();
  if (a.name == "convergence") {
    io::Table t({"k", "l", "m", "l_half", "lambda_re", "lambda_im", "leading_re", "leading_im", "error", "ratio",
                 "next_re", "next_im", "error_next"});
    for (double k : a.ks) {
      const ConvergenceStudy st = convergence_study(p, k, a.ms, a.l_halves, opt, cfg.workers);
      for (const ConvergenceRow& r : st.rows)
        t.add({num(r.mode.k), str(r.mode.l), str(r.mode.m), num(r.l_half), num(r.lambda.real()), num(r.lambda.imag()),
               num(r.leading.real()), num(r.leading.imag()), num(r.error), num(r.ratio), num(r.next.real()),
               num(r.next.imag()), num(r.error_next)},
              std::vector<bool>(13, true));
    }
    emit_table(cfg, t);
  } else if (a.name == "mass") {
    std::vector<QnmMode> modes;
    for (double k : a.ks)
      for (double L : a.l_halves) modes.push_back({k, static_cast<int>(L - std::abs(k) + 0.5), 0});
    const MassReport rep = mass_independence_experiment(p, a.masses, modes, opt, cfg.workers);
    io::Table t({"mass", "k", "l", "m", "l_half", "lambda_re", "lambda_im", "lambda0_re", "lambda0_im", "diff",
                 "fit_exponent", "fit_constant"});
    for (const MassRow& r : rep.rows) {
      const MassFit* f = nullptr;
      for (const MassFit& x : rep.fits)
        if (x.mass == r.mass) f = &x;
      t.add({num(r.mass), num(r.mode.k), str(r.mode.l), str(r.mode.m), num(r.mode.l_half()), num(r.lambda.real()),
             num(r.lambda.imag()), num(r.lambda0.real()), num(r.lambda0.imag()), num(r.diff), num(f->exponent),
             num(f->constant)},
            std::vector<bool>(12, true));
    }
    emit_table(cfg, t);
  } else if (a.name == "zeeman") {
    io::Table t({"a", "k", "lambda_plus_re", "lambda_plus_im", "lambda_minus_re", "lambda_minus_im", "slope",
                 "slope_formula", "rel_error"});
    for (double k : a.ks) {
      const ZeemanRow z = zeeman_experiment(p, k, opt);
      t.add({num(z.a), num(z.k), num(z.lambda_plus.real()), num(z.lambda_plus.imag()), num(z.lambda_minus.real()),
             num(z.lambda_minus.imag()), num(z.slope), num(z.slope_formula), num(z.rel_error)},
            std::vector<bool>(9, true));
    }
    emit_table(cfg, t);
  } else if (a.name == "real-axis") {
    const RadialContext ctx(p);
    io::Table t({"k", "min_sine", "lambda_at_min", "omega_at_min", "evaluations"});
    for (double k : a.ks) {
      const RealGridScan s = real_axis_scan(ctx, k, -a.range, a.range, -a.range, a.range, a.n, cfg.workers);
      t.add({num(k), num(s.min_sine), num(s.lambda_at_min), num(s.omega_at_min), str(s.evaluations)},
            std::vector<bool>(5, true));
    }
    emit_table(cfg, t);
  } else {
    throw UsageError(fmt::format("unknown experiment '{}'", a.name));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charged massive Dirac resonances of slowly rotating black holes with a cosmological constant"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* validate = app.add_subcommand("validate", "check admissibility");
  add_common(validate, cfg);
  auto* horizons = app.add_subcommand("horizons", "horizon radii and surface gravities");
  add_common(horizons, cfg);

  AngularArgs aa;
  auto* angular = app.add_subcommand("angular-spectrum", "angular eigenvalues mu_kl(lambda)");
  add_common(angular, cfg);
  angular->add_option("--k", aa.ks, "k values (half-integers)")->delimiter(',');
  angular->add_option("--l", aa.ls, "l values (nonzero)")->delimiter(',');
  angular->add_option("--lambda-re", aa.lambda_re);
  angular->add_option("--lambda-im", aa.lambda_im);
  angular->add_option("--N", aa.N, "basis size")->check(CLI::PositiveNumber);

  RadialArgs ra;
  auto* radial = app.add_subcommand("radial-zeros", "zeros of the radial Wronskian in a box");
  add_common(radial, cfg);
  radial->add_option("--k", ra.k);
  radial->add_option("--vary", ra.vary, "variable searched")->check(CLI::IsMember({"lambda", "omega"}));
  radial->add_option("--fixed-re", ra.fixed_re, "real part of the fixed variable");
  radial->add_option("--fixed-im", ra.fixed_im, "imaginary part of the fixed variable");
  radial->add_option("--box", ra.box, "re0,re1,im0,im1")->delimiter(',')->expected(4);
  radial->add_option("--system", ra.system, "2 or 4 spinor components")->check(CLI::IsMember({2, 4}));

  AsymptoticArgs as;
  auto* asym = app.add_subcommand("asymptotics", "closed-form semiclassical quantities");
  add_common(asym, cfg);
  asym->add_option("--lt", as.lt, "scaled lambda");
  asym->add_option("--kt", as.kt, "scaled k");

  QnmArgs qa;
  auto* qnm = app.add_subcommand("qnm", "self-consistent QNM table");
  add_common(qnm, cfg);
  qnm->add_option("--k", qa.ks)->delimiter(',');
  qnm->add_option("--l", qa.ls)->delimiter(',');
  qnm->add_option("--m", qa.ms, "overtones")->delimiter(',');
  qnm->add_option("--seed-file", qa.seed_file, "JSON records from a previous run");
  qnm->add_flag("--compare-leading", qa.compare_leading, "append the leading-formula prediction and error");

  ExperimentArgs ea;
  auto* exp = app.add_subcommand("experiments", "verification experiments");
  add_common(exp, cfg);
  exp->add_option("name", ea.name, "convergence | mass | zeeman | real-axis")
      ->required()
      ->check(CLI::IsMember({"convergence", "mass", "zeeman", "real-axis"}));
  exp->add_option("--k", ea.ks)->delimiter(',');
  exp->add_option("--m", ea.ms)->delimiter(',');
  exp->add_option("--L", ea.l_halves, "values of l + 1/2")->delimiter(',');
  exp->add_option("--masses", ea.masses)->delimiter(',');
  exp->add_option("--n", ea.n, "grid size")->check(CLI::PositiveNumber);
  exp->add_option("--range", ea.range, "half-width of the real grid")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return run_validate(cfg);
    if (horizons->parsed()) return run_horizons(cfg);
    if (angular->parsed()) return run_angular(cfg, aa);
    if (radial->parsed()) return run_radial(cfg, ra);
    if (asym->parsed()) return run_asymptotics(cfg, as);
    if (qnm->parsed()) return run_qnm(cfg, qa);
    if (exp->parsed()) return run_experiment(cfg, ea);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
