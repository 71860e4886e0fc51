#include "buridan/cli.hpp"

#include "buridan/analytic.hpp"
#include "buridan/config.hpp"
#include "buridan/fokker_planck.hpp"
#include "buridan/io.hpp"
#include "buridan/master.hpp"
#include "buridan/measurement.hpp"
#include "buridan/numerics.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace buridan {

namespace fs = std::filesystem;

namespace {

/// Thrown by `compare --assert-l1` when a distance exceeds the bound.
struct ComparisonFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  unsigned threads = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void apply_sets(RunConfig& cfg, const std::vector<std::string>& sets) {
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(0, "--set expects key=value, got '" + s + "'");
    try {
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1), 0);
    } catch (const ConfigError& e) {
      throw ConfigError(0, std::string("--set ") + e.what());
    }
  }
}

RunConfig load(const Common& c) {
  if (c.config_path.empty()) throw ConfigError(0, "--config is required for this command");
  RunConfig cfg = parse_config(read_file(c.config_path));
  apply_sets(cfg, c.sets);
  validate_config(cfg);
  if (c.threads) cfg.threads = c.threads;
  return cfg;
}

fs::path out_root(const Common& c, const RunConfig* cfg) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (cfg && !cfg->out_dir.empty()) return cfg->out_dir;
  if (const char* env = std::getenv("BURIDAN_OUT_DIR"); env && *env) return env;
  return ".";
}

double theta_of(const ModelParams& p) { return derived_scales(p).theta; }

std::vector<double> output_times(const RunConfig& cfg) {
  if (!cfg.times_abs.empty()) return cfg.times_abs;
  require_ferromagnetic(cfg);
  const double th = theta_of(cfg.params);
  std::vector<double> t = cfg.times.empty() ? std::vector<double>{cfg.t_end} : cfg.times;
  for (double& x : t) x *= th;
  return t;
}

Profile profile_of(const DiscreteDistribution& d) {
  Profile pr;
  pr.t = d.time;
  for (int k = 0; k <= d.n_spins; ++k) {
    pr.m.push_back(d.m_at(k));
    pr.p.push_back(d.density_at(k));
  }
  return pr;
}

Profile profile_of(const ContinuumField& f) { return {f.time, f.centers, f.values}; }

std::vector<Profile> run_master(const RunConfig& cfg, const std::vector<double>& times) {
  const auto kind = cfg.init == "gaussian" ? InitKind::gaussian : InitKind::exact_paramagnet;
  const auto start = initial_distribution(cfg.params, kind);
  EvolveOptions eo;
  eo.tol = cfg.tol;
  eo.mode = cfg.memory == "full" ? MemoryMode::full_memory : MemoryMode::short_memory;
  eo.snapshot_times = times;
  const auto res = evolve(start, cfg.params, times.back(), eo);
  std::vector<Profile> out;
  for (const auto& s : res.snapshots) out.push_back(profile_of(s));
  return out;
}

std::vector<Profile> run_fp(const RunConfig& cfg, const std::vector<double>& times) {
  FpConfig fc;
  fc.cells = cfg.cells;
  fc.tol = cfg.tol;
  const auto init = gaussian_field(cfg.params, cfg.cells);
  const auto res = solve_fp(cfg.params, init, times, fc);
  std::vector<Profile> out;
  for (const auto& s : res.snapshots) out.push_back(profile_of(s));
  return out;
}

void print_regime(std::ostream& out, const RegimeReport& r, double theta) {
  auto opt = [&](const std::optional<double>& v) {
    return v ? fmt(*v / theta) : std::string("diverges (b <= 0)");
  };
  out << "lambda = " << fmt(r.lambda) << " (" << to_string(r.regime) << ")\n"
      << "p_plus = " << fmt(r.p_plus) << ", p_minus = " << fmt(r.p_minus) << "\n"
      << "tau_reg/theta = " << opt(r.times.tau_reg) << "\n"
      << "t_width_max/theta = " << opt(r.times.t_width_max) << "\n"
      << "delta_max = " << (r.times.delta_max ? fmt(*r.times.delta_max) : "diverges (b <= 0)") << "\n"
      << "t_flat/theta = " << fmt(r.times.t_flat / theta) << "\n"
      << "tau_relax/theta = " << fmt(r.times.tau_relax / theta) << "\n"
      << "purity ratio = " << fmt(r.purity_ratio) << (r.purity_ok ? " (ok)" : " (violated)") << "\n"
      << "coupling ratio = " << fmt(r.coupling_ratio) << (r.coupling_ok ? " (ok)" : " (violated)")
      << "\n";
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

MeasurementOptions measure_options(const RunConfig& cfg) {
  MeasurementOptions mo;
  mo.p_wrong_bound = cfg.p_wrong_bound;
  mo.lambda_threshold = cfg.lambda_threshold;
  mo.purity_limit = cfg.purity_limit;
  mo.coupling_limit = cfg.coupling_limit;
  mo.g_spread = cfg.g_spread;
  mo.cells = cfg.cells;
  mo.tol = cfg.tol;
  return mo;
}

MeasurementReport measure_with(const RunConfig& cfg) {
  require_ferromagnetic(cfg);
  SpinState spin{cfg.r_up, 1.0 - cfg.r_up, cfg.offdiag};
  const double t_end = cfg.t_end * theta_of(cfg.params);
  const Engine engine = cfg.engine == "fp" ? Engine::fokker_planck : Engine::master;
  return run_measurement(spin, cfg.params, engine, t_end, measure_options(cfg));
}

std::string summary_csv(const MeasurementReport& r) {
  std::string s = "sector,p_correct,p_wrong,peak_m,tau_red,tau_reg,lambda,faithful\n";
  const double tau_red = r.offdiag.tau_red;
  const double tau_reg =
      r.regime.times.tau_reg ? *r.regime.times.tau_reg : std::numeric_limits<double>::infinity();
  for (const auto& sec : r.sectors) {
    if (!sec.ran) continue;
    s += std::string(sec.sector == Sector::up ? "up" : "down") + ',' + fmt(sec.p_correct) + ',' +
         fmt(sec.p_wrong) + ',' + fmt(sec.peak_m) + ',' + fmt(tau_red) + ',' + fmt(tau_reg) +
         ',' + fmt(r.regime.lambda) + ',' + bool_str(r.faithful) + '\n';
  }
  return s;
}

std::string report_text(const MeasurementReport& r, const ModelParams& p) {
  std::ostringstream os;
  const double th = theta_of(p);
  os << "spin: r_up = " << fmt(r.spin.r_up) << ", r_down = " << fmt(r.spin.r_down)
     << ", |r_updown| = " << fmt(r.spin.offdiag_mag) << " (decays on tau_red, not evolved)\n";
  os << "t_end/theta = " << fmt(r.t_end / th) << "\n";
  for (const auto& s : r.sectors) {
    const char* name = s.sector == Sector::up ? "up" : "down";
    if (!s.ran) {
      os << "sector " << name << ": zero weight, skipped\n";
      continue;
    }
    os << "sector " << name << ": weight " << fmt(s.weight) << ", split at m = " << fmt(s.split)
       << ", p_correct = " << fmt(s.p_correct) << ", p_wrong = " << fmt(s.p_wrong)
       << ", peak m = " << fmt(s.peak_m) << ", mean = " << fmt(s.mean) << ", sd = "
       << fmt(s.stddev) << ", mass drift = " << fmt(s.mass_drift) << "\n";
  }
  os << "born check (max mass drift) = " << fmt(r.born_check) << "\n";
  if (p.coupling_g > 0.0) {
    os << "tau_red = " << fmt(r.offdiag.tau_red) << ", t_recurrence = " << fmt(r.offdiag.t_recurrence)
       << ", bath ratio = " << fmt(r.offdiag.bath_ratio) << ", spread ratio = "
       << fmt(r.offdiag.spread_ratio) << ", ordering tau_red < theta < tau_reg: "
       << bool_str(r.offdiag.ordering_ok) << "\n";
  }
  print_regime(os, r.regime, th);
  os << "inconclusive = " << bool_str(r.inconclusive) << "\n";
  os << "faithful = " << bool_str(r.faithful) << "\n";
  return os.str();
}

int cmd_fixed_points(const Common& c, std::ostream& out) {
  const RunConfig cfg = load(c);
  out << "kind,m,stability\n";
  auto name = [](Stability s) {
    return s == Stability::stable ? "stable" : s == Stability::unstable ? "unstable" : "marginal";
  };
  for (const auto& f : fixed_points(cfg.params)) out << "mean-field," << fmt(f.m) << ',' << name(f.stability) << '\n';
  for (const auto& f : drift_zeros(cfg.params)) out << "drift-zero," << fmt(f.m) << ',' << name(f.stability) << '\n';
  if (cfg.params.temp_bath < cfg.params.coupling_j) {
    const auto ds = derived_scales(cfg.params);
    out << "# m_F = " << fmt(ds.m_ferro) << ", m_P = " << fmt(ds.m_repel) << ", theta = "
        << fmt(ds.theta) << ", delta_F = " << fmt(ds.delta_ferro) << ", delta = " << fmt(ds.delta)
        << ", b = " << fmt(ds.bias) << ", lambda = " << fmt(ds.lambda) << '\n';
  }
  return exit_ok;
}

int cmd_simulate(const Common& c, const std::string& engine, const std::string& times,
                 const std::string& snap_dir, std::ostream& out) {
  RunConfig cfg = load(c);
  if (!engine.empty()) apply_setting(cfg, "engine", engine);
  if (!times.empty()) apply_setting(cfg, "times", times);
  validate_config(cfg);
  const auto t = output_times(cfg);
  const auto curves = cfg.engine == "fp" ? run_fp(cfg, t) : run_master(cfg, t);
  const fs::path dir = snap_dir.empty() ? out_root(c, &cfg) / "snapshots" : fs::path(snap_dir);
  write_profiles_csv(dir / "snapshots.csv", curves);
  write_profile_files(dir, curves);
  out << "engine " << cfg.engine << ": wrote " << curves.size() << " snapshots to "
      << dir.string() << "\n";
  return exit_ok;
}

int cmd_analytic(const Common& c, const std::string& model, const std::string& times,
                 std::ostream& out) {
  RunConfig cfg = load(c);
  if (!model.empty()) apply_setting(cfg, "model", model);
  if (!times.empty()) apply_setting(cfg, "times", times);
  validate_config(cfg);
  require_ferromagnetic(cfg);
  const auto t = output_times(cfg);
  const auto ds = derived_scales(cfg.params);
  const bool bounded = cfg.model == "gaussian-cubic" || cfg.model == "suzuki";
  const double edge = bounded ? ds.m_ferro : 1.0;
  const int n = 2000;
  std::vector<Profile> curves;
  for (double tt : t) {
    Profile pr;
    pr.t = tt;
    for (int i = 1; i < n; ++i) pr.m.push_back(-edge + 2.0 * edge * i / n);
    if (cfg.model == "suzuki") {
      const auto sz = suzuki_profile(cfg.params, tt);
      for (double m : pr.m) pr.p.push_back(sz.density(m));
    } else {
      const auto dm = cfg.model == "drift-only"        ? DensityModel::drift_only
                      : cfg.model == "gaussian-linear" ? DensityModel::gaussian_linear
                                                       : DensityModel::gaussian_cubic;
      pr.p = closed_form_profile(cfg.params, pr.m, tt, dm);
    }
    curves.push_back(std::move(pr));
  }
  const fs::path dir = out_root(c, &cfg);
  write_profiles_csv(dir / "analytic.csv", curves);
  out << "model " << cfg.model << ": wrote " << curves.size() << " profiles to "
      << (dir / "analytic.csv").string() << "\n";
  print_regime(out, classify_regime(cfg.params, cfg.lambda_threshold, cfg.purity_limit,
                                    cfg.coupling_limit),
               ds.theta);
  return exit_ok;
}

int cmd_sample(const Common& c, long long trajectories, long long seed, double t_end_theta,
               std::ostream& out) {
  RunConfig cfg = load(c);
  if (trajectories > 0) cfg.trajectories = static_cast<std::size_t>(trajectories);
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (t_end_theta > 0.0) cfg.t_end = t_end_theta;
  require_ferromagnetic(cfg);
  const double t_end = cfg.t_end * theta_of(cfg.params);
  const auto res = sample_trajectories(cfg.params, cfg.trajectories, t_end, cfg.seed, cfg.threads);
  Profile pr;
  pr.t = t_end;
  for (int k = 0; k <= res.n_spins; ++k) {
    pr.m.push_back(static_cast<double>(2 * k - res.n_spins) / res.n_spins);
    pr.p.push_back(0.5 * res.n_spins * res.histogram[k]);
  }
  const fs::path dir = out_root(c, &cfg);
  write_profiles_csv(dir / "sample.csv", {pr});
  out << "trajectories = " << cfg.trajectories << ", seed = " << cfg.seed << "\n"
      << "fraction above split = " << fmt(res.fraction_above) << "\n"
      << "fraction below split = " << fmt(res.fraction_below) << "\n";
  return exit_ok;
}

int cmd_measure(const Common& c, std::ostream& out) {
  const RunConfig cfg = load(c);
  const auto r = measure_with(cfg);
  const fs::path dir = out_root(c, &cfg);
  write_text(dir / "measure_summary.csv", summary_csv(r));
  const std::string text = report_text(r, cfg.params);
  write_text(dir / "measure_report.txt", text);
  out << text;
  return exit_ok;
}

int cmd_sweep(const Common& c, const std::string& axis, std::ostream& out) {
  RunConfig cfg = load(c);
  if (!axis.empty()) {
    const auto eq = axis.find('=');
    if (eq == std::string::npos) throw ConfigError(0, "--axis expects key=v1,v2,...");
    apply_setting(cfg, "sweep", axis.substr(0, eq) + ":" + axis.substr(eq + 1));
  }
  if (cfg.sweep_key.empty()) throw ConfigError(0, "sweep: no axis given (--axis or 'sweep' key)");
  const std::size_t k = cfg.sweep_values.size();
  std::vector<RunConfig> entries(k, cfg);
  for (std::size_t i = 0; i < k; ++i) {
    apply_setting(entries[i], cfg.sweep_key, fmt(cfg.sweep_values[i]), cfg.line_of("sweep"));
    validate_config(entries[i]);
  }
  const fs::path dir = out_root(c, &cfg);
  std::vector<MeasurementReport> reports(k);
  std::vector<std::exception_ptr> errors(k);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < k;) {
      try {
        reports[i] = measure_with(entries[i]);
        write_text(dir / ("entry_" + std::to_string(i)) / "measure_summary.csv", summary_csv(reports[i]));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned nw = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  nw = static_cast<unsigned>(std::min<std::size_t>(nw, std::max<std::size_t>(k, 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < nw; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::string s = cfg.sweep_key + ",lambda,p_wrong_up,p_wrong_down,peak_m_up,tau_reg,inconclusive,faithful\n";
  for (std::size_t i = 0; i < k; ++i) {
    const auto& r = reports[i];
    auto pw = [](const SectorOutcome& so) {
      return so.ran ? fmt(so.p_wrong) : std::string("nan");
    };
    s += fmt(cfg.sweep_values[i]) + ',' + fmt(r.regime.lambda) + ',' + pw(r.sectors[0]) + ',' +
         pw(r.sectors[1]) + ',' + (r.sectors[0].ran ? fmt(r.sectors[0].peak_m) : "nan") + ',' +
         (r.regime.times.tau_reg ? fmt(*r.regime.times.tau_reg) : "inf") + ',' +
         bool_str(r.inconclusive) + ',' + bool_str(r.faithful) + '\n';
  }
  write_text(dir / "sweep.csv", s);
  out << s;
  return exit_ok;
}

int cmd_compare(const Common& c, const std::string& against, const std::string& snap_dir,
                double assert_l1, std::ostream& out) {
  const fs::path ref_dir = against;
  fs::path cand_dir = snap_dir;
  if (cand_dir.empty()) {
    RunConfig* none = nullptr;
    cand_dir = out_root(c, none) / "snapshots";
  }
  const auto ref = read_profiles_csv(ref_dir / "snapshots.csv");
  const auto cand = read_profiles_csv(cand_dir / "snapshots.csv");
  std::string s = "t,l1\n";
  bool ok = true;
  std::size_t matched = 0;
  for (const auto& a : cand) {
    const auto it = std::find_if(ref.begin(), ref.end(), [&](const Profile& b) {
      return std::abs(a.t - b.t) <= 1e-9 * std::max(1.0, std::abs(a.t));
    });
    if (it == ref.end()) continue;
    ++matched;
    const double d = l1_distance(a, *it);
    if (!(d < assert_l1)) ok = false;
    s += fmt(a.t) + ',' + fmt(d) + '\n';
  }
  if (matched == 0) throw std::invalid_argument("compare: no common output times");
  write_text(cand_dir / "compare.csv", s);
  out << s;
  if (!ok) throw ComparisonFailure("compare: L1 distance above " + fmt(assert_l1));
  return exit_ok;
}

int cmd_figure(const Common& c, int which, std::ostream& out) {
  if (which != 1 && which != 2) throw ConfigError(0, "--which must be 1 or 2");
  RunConfig cfg;
  cfg.params.n_spins = 1000;
  cfg.params.temp_bath = 0.65;
  cfg.params.coupling_g = which == 1 ? 0.05 : 0.0;
  cfg.params.debye_cutoff = std::numeric_limits<double>::infinity();
  cfg.times = {0, 0.5, 1, 2.25, 3, 4, 5};
  if (which == 2) cfg.times.push_back(10);
  apply_sets(cfg, c.sets);
  validate_config(cfg);
  const auto t = output_times(cfg);
  const auto curves = run_master(cfg, t);
  const double th = theta_of(cfg.params);
  const fs::path dir = out_root(c, &cfg);
  const std::string stem = "figure" + std::to_string(which);
  write_profiles_csv(dir / (stem + ".csv"), curves);
  std::vector<SvgCurve> svg;
  for (const auto& cv : curves) {
    char label[48];
    std::snprintf(label, sizeof label, "t/theta = %g", cv.t / th);
    svg.push_back({label, cv.m, cv.p});
  }
  char title[128];
  std::snprintf(title, sizeof title, "P(m,t), N = %d, T = %g, g = %g", cfg.params.n_spins,
                cfg.params.temp_bath, cfg.params.coupling_g);
  write_text(dir / (stem + ".svg"), render_svg(svg, title, "m", "P(m,t)"));
  out << "wrote " << curves.size() << " curves to " << (dir / (stem + ".csv")).string() << " and "
      << (dir / (stem + ".svg")).string() << "\n";
  return exit_ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curie-Weiss measurement dynamics: master equation, Fokker-Planck, closed forms"};
  app.require_subcommand(1);
  Common c;
  app.add_option("-c,--config", c.config_path, "config file (key = value lines)");
  app.add_option("--set", c.sets, "override a config key, key=value (repeatable)");
  app.add_option("-o,--out", c.out_dir, "output directory (default: $BURIDAN_OUT_DIR or .)");
  app.add_option("--threads", c.threads, "worker threads (0: hardware)");

  auto* fp = app.add_subcommand("fixed-points", "roots of the mean-field equation and of the drift");
  fp->fallthrough();

  std::string engine, times, snap_dir;
  auto* sim = app.add_subcommand("simulate", "evolve P(m,t) and write snapshots");
  sim->fallthrough();
  sim->add_option("--engine", engine, "master | fp");
  sim->add_option("--times", times, "output times in units of theta, comma separated");
  sim->add_option("--snapshot-dir", snap_dir, "snapshot directory");

  std::string model, a_times;
  auto* an = app.add_subcommand("analytic", "closed-form profiles and time scales");
  an->fallthrough();
  an->add_option("--model", model, "drift-only | gaussian-linear | gaussian-cubic | suzuki");
  an->add_option("--times", a_times, "times in units of theta");

  long long trajectories = 0, seed = -1;
  double t_end_theta = 0.0;
  auto* sa = app.add_subcommand("sample", "kinetic Monte Carlo trajectories");
  sa->fallthrough();
  sa->add_option("--trajectories", trajectories, "number of trajectories");
  sa->add_option("--seed", seed, "base seed");
  sa->add_option("--t-end", t_end_theta, "final time in units of theta");

  auto* me = app.add_subcommand("measure", "run both spin sectors and judge the registration");
  me->fallthrough();

  std::string axis;
  auto* sw = app.add_subcommand("sweep", "measure over a list of values of one key");
  sw->fallthrough();
  sw->add_option("--axis", axis, "key=v1,v2,...");

  std::string against, c_snap;
  double assert_l1 = std::numeric_limits<double>::infinity();
  auto* cmp = app.add_subcommand("compare", "L1 distances between two snapshot directories");
  cmp->fallthrough();
  cmp->add_option("--against", against, "reference snapshot directory")->required();
  cmp->add_option("--snapshot-dir", c_snap, "candidate snapshot directory");
  cmp->add_option("--assert-l1", assert_l1, "fail (exit 3) if any distance reaches this");

  int which = 0;
  auto* fig = app.add_subcommand("figure", "reproduce a figure as CSV and SVG");
  fig->fallthrough();
  fig->add_option("--which", which, "1 or 2")->required();

  std::vector<std::string> argv_store{"buridan"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (fp->parsed()) return cmd_fixed_points(c, out);
    if (sim->parsed()) return cmd_simulate(c, engine, times, snap_dir, out);
    if (an->parsed()) return cmd_analytic(c, model, a_times, out);
    if (sa->parsed()) return cmd_sample(c, trajectories, seed, t_end_theta, out);
    if (me->parsed()) return cmd_measure(c, out);
    if (sw->parsed()) return cmd_sweep(c, axis, out);
    if (cmp->parsed()) return cmd_compare(c, against, c_snap, assert_l1, out);
    if (fig->parsed()) return cmd_figure(c, which, out);
  } catch (const ComparisonFailure& e) {
    err << "error: " << e.what() << "\n";
    return exit_comparison;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace buridan
