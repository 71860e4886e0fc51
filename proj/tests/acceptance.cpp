// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit status 1
// if any criterion fails.
#include "buridan/analytic.hpp"
#include "buridan/fokker_planck.hpp"
#include "buridan/io.hpp"
#include "buridan/master.hpp"
#include "buridan/measurement.hpp"
#include "buridan/model.hpp"
#include "buridan/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace buridan;

namespace {

// tolerances
constexpr double kFixedPointTol = 1e-5;
constexpr double kPeakTol = 0.01;
constexpr double kFlatSimTol = 0.05;
constexpr double kFlatFormulaTol = 0.005;
constexpr double kHalfMassTol = 1e-8;
constexpr double kSplitTol = 0.003;
constexpr double kSplitSymTol = 1e-8;
constexpr double kFreeEnergySlack = 1e-12;
constexpr double kStationaryL1 = 1e-6;
constexpr double kDetailedBalance = 1e-12;
constexpr double kCrossSolverL1 = 0.02;
constexpr double kWidthRel = 0.05;
constexpr double kWidthPeakRel = 0.05;
constexpr double kFormulaTol = 1e-9;
constexpr double kQuotedTol = 5e-4;
constexpr double kArrivalRel = 0.10;
constexpr double kErfcRel = 1e-12;
constexpr double kScaleTol = 1e-12;

const double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

int failures = 0;
std::map<int, std::string> lines;

void report(int id, const std::string& name, Outcome& o) {
  char head[64];
  std::snprintf(head, sizeof head, "[%s] %2d ", o.pass ? "PASS" : "FAIL", id);
  lines[id] = head + name + ": " + o.detail.str();
  if (!o.pass) ++failures;
}

std::string num(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

ModelParams figure_params(double g) {
  ModelParams p;
  p.n_spins = 1000;
  p.temp_bath = 0.65;
  p.coupling_g = g;
  p.debye_cutoff = kInf;
  return p;
}

// largest root of m = tanh((g + J m)/T), by bisection on [0.5, 1]
double mean_field_root(const ModelParams& p) {
  double lo = 0.5, hi = 1.0;
  auto f = [&](double m) { return m - std::tanh((p.coupling_g + p.coupling_j * m) / p.temp_bath); };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double continuum_median(const DiscreteDistribution& d) {
  const int n = d.n_spins;
  double c = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (c + d.weights[k] >= 0.5) {
      return d.m_at(k) - 1.0 / n + (0.5 - c) / d.weights[k] * (2.0 / n);
    }
    c += d.weights[k];
  }
  return 1.0;
}

std::vector<int> local_maxima(const DiscreteDistribution& d, double rel = 0.01) {
  const double top = *std::max_element(d.weights.begin(), d.weights.end());
  std::vector<int> out;
  const int n = d.n_spins;
  for (int k = 0; k <= n; ++k) {
    const double l = k > 0 ? d.weights[k - 1] : -1.0;
    const double r = k < n ? d.weights[k + 1] : -1.0;
    if (d.weights[k] > l && d.weights[k] >= r && d.weights[k] >= rel * top) out.push_back(k);
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> upper_half(const DiscreteDistribution& d) {
  std::vector<double> m, rho;
  for (int k = d.n_spins / 2 + 1; k <= d.n_spins; ++k) {
    m.push_back(d.m_at(k));
    rho.push_back(d.density_at(k));
  }
  return {m, rho};
}

double density_at_m(const DiscreteDistribution& d, double m) {
  const double x = (m + 1.0) * d.n_spins / 2.0;
  const int k = std::clamp(static_cast<int>(std::floor(x)), 0, d.n_spins - 1);
  const double f = x - k;
  return (1.0 - f) * d.density_at(k) + f * d.density_at(k + 1);
}

// sd of the distribution restricted to m > cut
double conditional_sd(const DiscreteDistribution& d, double cut) {
  double w = 0.0, s1 = 0.0, s2 = 0.0;
  for (int k = 0; k <= d.n_spins; ++k) {
    const double m = d.m_at(k);
    if (m <= cut) continue;
    w += d.weights[k];
    s1 += d.weights[k] * m;
    s2 += d.weights[k] * m * m;
  }
  const double mean = s1 / w;
  return std::sqrt(s2 / w - mean * mean);
}

// Gaussian sigma from the full width at half maximum of the highest peak
double fwhm_sigma(const DiscreteDistribution& d) {
  const auto& w = d.weights;
  const int top = static_cast<int>(std::max_element(w.begin(), w.end()) - w.begin());
  const double half = 0.5 * w[top];
  int l = top, r = top;
  while (l > 0 && w[l - 1] >= half) --l;
  while (r < d.n_spins && w[r + 1] >= half) ++r;
  const double dm = 2.0 / d.n_spins;
  const double ml = l > 0 ? d.m_at(l) - dm * (w[l] - half) / (w[l] - w[l - 1]) : d.m_at(l);
  const double mr = r < d.n_spins ? d.m_at(r) + dm * (w[r] - half) / (w[r] - w[r + 1]) : d.m_at(r);
  return (mr - ml) / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
}

double lattice_l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
  return s;
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

// binomial x Boltzmann weights via lgamma, normalized in log space
std::vector<double> boltzmann_oracle(const ModelParams& p) {
  const int n = p.n_spins;
  std::vector<double> lw(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double m = static_cast<double>(2 * k - n) / n;
    lw[k] = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
            n * (p.g_eff() * m + 0.5 * p.coupling_j * m * m) / p.temp_bath;
  }
  const double top = *std::max_element(lw.begin(), lw.end());
  double z = 0.0;
  for (double x : lw) z += std::exp(x - top);
  std::vector<double> w(n + 1);
  for (int k = 0; k <= n; ++k) w[k] = std::exp(lw[k] - top) / z;
  return w;
}

double worst_h_theorem = 0.0;

EvolveResult run_master(const ModelParams& p, double t_end, std::vector<double> snaps,
                        std::function<void(const DiscreteDistribution&)> on_step = {}) {
  EvolveOptions eo;
  eo.snapshot_times = std::move(snaps);
  eo.monitor_free_energy = true;
  eo.on_step = std::move(on_step);
  auto r = evolve(initial_distribution(p, InitKind::exact_paramagnet), p, t_end, eo);
  worst_h_theorem = std::min(worst_h_theorem, r.min_free_energy_increment);
  return r;
}

const DiscreteDistribution& snapshot_at(const EvolveResult& r, double t) {
  for (const auto& s : r.snapshots) {
    if (std::abs(s.time - t) <= 1e-9 * std::max(1.0, t)) return s;
  }
  throw std::runtime_error("missing snapshot at t = " + num(t));
}

// first time the tracked quantity reaches `target`, linearly interpolated between steps
struct Arrival {
  double target;
  double t_prev = 0.0, x_prev = -kInf;
  std::optional<double> when;

  void feed(double t, double x) {
    if (!when && x >= target) {
      when = x_prev == -kInf ? t : t_prev + (target - x_prev) / (x - x_prev) * (t - t_prev);
    }
    t_prev = t;
    x_prev = x;
  }
};

void criterion_fixed_points() {
  Outcome o;
  const double a = derived_scales(figure_params(0.05)).m_ferro;
  const double b = derived_scales(figure_params(0.0)).m_ferro;
  o.require(std::abs(a - 0.89707) < kFixedPointTol, "m_F(g=0.05) = " + num(a, 8));
  o.require(std::abs(b - 0.87206) < kFixedPointTol, "m_F(g=0) = " + num(b, 8));
  report(1, "fixed points", o);
}

void criterion_figure1(const ModelParams& p, const EvolveResult& run, const std::vector<double>& times) {
  Outcome o;
  const double th = derived_scales(p).theta;
  const double mf = derived_scales(p).m_ferro;
  const CharMap flow(p, CharModel::exact_quadrature);
  double worst = 0.0, worst_mode = 0.0;
  bool single = true;
  for (double t : times) {
    const auto& s = snapshot_at(run, t * th);
    single = single && local_maxima(s).size() == 1;
    const double ch = flow.forward(0.0, t * th);
    worst = std::max(worst, std::abs(continuum_median(s) - ch));
    std::vector<double> m, rho;
    for (int k = 0; k <= s.n_spins; ++k) {
      m.push_back(s.m_at(k));
      rho.push_back(s.density_at(k));
    }
    worst_mode = std::max(worst_mode, std::abs(mode_of(m, rho) - ch));
  }
  o.require(single, "single-peaked at every time");
  o.require(worst < kPeakTol, "max |median - characteristic| = " + num(worst, 3));
  const double end = continuum_median(snapshot_at(run, 5.0 * th));
  o.require(std::abs(end - mf) < kPeakTol, "peak at 5 theta = " + num(end, 6));
  o.detail << "; (mode vs characteristic, informational: " << num(worst_mode, 3) << ")";
  report(2, "figure 1 trajectory", o);
}

void criterion_figure2(const ModelParams& p, const EvolveResult& run, double t_flat) {
  Outcome o;
  const double th = derived_scales(p).theta;
  const auto& s = snapshot_at(run, 10.0 * th);
  const int n = s.n_spins;
  int kp = n / 2 + 1, km = 0;
  for (int k = n / 2 + 1; k <= n; ++k) {
    if (s.weights[k] > s.weights[kp]) kp = k;
  }
  for (int k = 0; k < n / 2; ++k) {
    if (s.weights[k] > s.weights[km]) km = k;
  }
  const double grid = 2.0 / n;
  o.require(std::abs(s.m_at(kp) - 0.87206) <= grid && std::abs(s.m_at(km) + 0.87206) <= grid,
            "peaks at " + num(s.m_at(km)) + ", " + num(s.m_at(kp)));
  double upper = 0.5 * s.weights[n / 2], lower = upper;
  for (int k = n / 2 + 1; k <= n; ++k) upper += s.weights[k];
  for (int k = 0; k < n / 2; ++k) lower += s.weights[k];
  o.require(std::abs(upper - 0.5) < kHalfMassTol && std::abs(lower - 0.5) < kHalfMassTol,
            "masses 0.5 + (" + num(lower - 0.5, 2) + ", " + num(upper - 0.5, 2) + ")");

  const double mf = derived_scales(p).m_ferro;
  const auto& f = snapshot_at(run, t_flat);
  const auto sz = suzuki_profile(p, t_flat);
  const double quoted[] = {0.93, 0.84, 0.65};
  const double frac[] = {0.5, 0.6, 0.7};
  std::string sim = "simulated ratios", formula = "closed-form ratios";
  bool sim_ok = true, formula_ok = true;
  for (int i = 0; i < 3; ++i) {
    const double rs = density_at_m(f, frac[i] * mf) / f.density_at(n / 2);
    const double rf = sz.density(frac[i] * mf) / sz.density(0.0);
    sim_ok = sim_ok && std::abs(rs - quoted[i]) <= kFlatSimTol;
    formula_ok = formula_ok && std::abs(rf - quoted[i]) <= kFlatFormulaTol;
    sim += " " + num(rs, 3);
    formula += " " + num(rf, 4);
  }
  o.require(sim_ok, sim);
  o.require(formula_ok, formula);
  report(3, "figure 2 splitting and flat profile", o);
}

void criterion_split(const EvolveResult& symmetric) {
  Outcome o;
  const auto& s = symmetric.final;
  double below = 0.5 * s.weights[s.n_spins / 2];
  for (int k = 0; k < s.n_spins / 2; ++k) below += s.weights[k];
  o.require(std::abs(below - 0.5) < kSplitSymTol, "lambda=0: " + num(below, 12));
  for (double lambda : {0.5, 1.0, 1.89}) {
    auto p = figure_params(0.0);
    const auto d0 = derived_scales(p);
    p.coupling_g = lambda * (p.coupling_j - p.temp_bath) * d0.delta * std::sqrt(2.0 / p.n_spins);
    const auto ds = derived_scales(p);
    double split = 0.0;
    for (const auto& z : drift_zeros(p)) {
      if (z.stability == Stability::unstable) split = z.m;
    }
    const auto r = run_master(p, 10.0 * ds.theta, {});
    double mass = 0.0;
    for (int k = 0; k <= p.n_spins; ++k) {
      if (r.final.m_at(k) < split) mass += r.final.weights[k];
    }
    const double expect = 0.5 * std::erfc(lambda);
    o.require(std::abs(mass - expect) < kSplitTol,
              "lambda=" + num(ds.lambda, 4) + ": " + num(mass, 5) + " vs " + num(expect, 5));
  }
  report(4, "splitting probability", o);
}

void criterion_stationary() {
  Outcome o;
  auto p = figure_params(0.2);
  const double th = derived_scales(p).theta;
  const auto r = run_master(p, 20.0 * th, {});
  const double l1 = lattice_l1(r.final.weights, boltzmann_oracle(p));
  o.require(l1 < kStationaryL1, "L1 to binomial x Boltzmann at 20 theta = " + num(l1, 3));

  double worst = 0.0;
  for (double g : {0.05, 0.0, 0.2}) {
    for (double cutoff : {100.0, kInf}) {
      auto q = figure_params(g);
      q.debye_cutoff = cutoff;
      const auto rates = transition_rates(q);
      const auto eq = stationary_distribution(q);
      for (int k = 1; k <= q.n_spins; ++k) {
        const double a = rates.up[k - 1] * eq.weights[k - 1];
        const double b = rates.down[k] * eq.weights[k];
        if (a == 0.0 && b == 0.0) continue;
        worst = std::max(worst, std::abs(a - b) / std::max(a, b));
      }
    }
  }
  o.require(worst < kDetailedBalance, "detailed balance residual " + num(worst, 3));
  report(6, "stationarity and detailed balance", o);
}

void criterion_cross_solver(const ModelParams& p, const EvolveResult& run, const std::vector<double>& times) {
  Outcome o;
  const double th = derived_scales(p).theta;
  std::vector<double> abs_times;
  for (double t : times) abs_times.push_back(t * th);
  const auto fp = solve_fp(p, gaussian_field(p, 2000), abs_times);
  double worst = 0.0;
  for (std::size_t i = 0; i < abs_times.size(); ++i) {
    const auto& f = fp.snapshots[i];
    worst = std::max(worst, l1_distance(profile_of(snapshot_at(run, abs_times[i])),
                                        Profile{f.time, f.centers, f.values}));
  }
  o.require(worst < kCrossSolverL1, "Fokker-Planck vs master max L1 = " + num(worst, 3));

  auto q = p;
  q.n_spins = 100;
  q.coupling_g = 0.05 * std::sqrt(10.0);
  const double t_end = 2.0 * derived_scales(q).theta;
  const auto mc = sample_trajectories(q, 100000, t_end, 20240917);
  const auto ref = run_master(q, t_end, {});
  const double l1 = lattice_l1(mc.histogram, ref.final.weights);
  o.require(l1 < kCrossSolverL1, "Monte Carlo (N=100, 1e5 runs) vs master L1 = " + num(l1, 3));
  report(7, "cross-solver agreement", o);
}

void criterion_equilibrium_width(const ModelParams& p1, const EvolveResult& r1, const ModelParams& p2,
                                 const EvolveResult& r2) {
  Outcome o;
  for (int i = 0; i < 2; ++i) {
    const auto& p = i == 0 ? p1 : p2;
    const auto& r = i == 0 ? r1 : r2;
    const auto ds = derived_scales(p);
    double split = 0.0;
    for (const auto& z : drift_zeros(p)) {
      if (z.stability == Stability::unstable) split = z.m;
    }
    const double sd = conditional_sd(r.final, split) * std::sqrt(p.n_spins);
    o.require(std::abs(sd / ds.delta_ferro - 1.0) < kWidthRel,
              std::string(i == 0 ? "g=0.05" : "g=0") + ": sd*sqrt(N) = " + num(sd, 4) + " vs " +
                  num(ds.delta_ferro, 4));
  }
  report(8, "equilibrium width", o);
}

void criterion_width_dynamics(const ModelParams& p, const EvolveResult& run, const std::vector<double>& grid) {
  Outcome o;
  const double th = derived_scales(p).theta;
  const auto ts = time_scales(p);
  double best = 0.0, best_t = 0.0;
  for (double t : grid) {
    const double w = fwhm_sigma(snapshot_at(run, t * th)) * std::sqrt(p.n_spins);
    if (w > best) {
      best = w;
      best_t = t;
    }
  }
  const double t_ref = *ts.t_width_max / th;
  o.require(std::abs(best_t / t_ref - 1.0) <= kWidthPeakRel,
            "max at " + num(best_t, 4) + " theta vs " + num(t_ref, 4));
  o.require(std::abs(best / *ts.delta_max - 1.0) <= kWidthPeakRel,
            "max width*sqrt(N) = " + num(best, 4) + " vs " + num(*ts.delta_max, 4));
  report(9, "width dynamics", o);
}

void criterion_time_scales(const ModelParams& p1, std::optional<double> arrive1, const ModelParams& p2,
                           std::optional<double> arrive2) {
  Outcome o;
  const auto d1 = derived_scales(p1);
  const auto d2 = derived_scales(p2);
  const auto t1 = time_scales(p1);
  const auto t2 = time_scales(p2);
  const double mf1 = mean_field_root(p1), mf2 = mean_field_root(p2);
  const double b1 = p1.coupling_g / (p1.coupling_j - p1.temp_bath);
  const double delta = std::sqrt(p2.temp_bath / (p2.coupling_j - p2.temp_bath) + 1.0);
  const double n = p2.n_spins;
  const double reg = std::log(3.0 * mf1 / b1);
  const double flat = std::log(mf2 / delta * std::sqrt(n / 3.0));
  const double relax = std::log(mf2 / delta * std::sqrt(10.0 * n / 3.0));
  const double got_reg = *t1.tau_reg / d1.theta;
  const double got_flat = t2.t_flat / d2.theta;
  const double got_relax = t2.tau_relax / d2.theta;
  o.require(std::abs(got_reg - reg) < kFormulaTol && std::abs(got_reg - 2.936) < kQuotedTol,
            "tau_reg = " + num(got_reg, 10));
  o.require(std::abs(got_flat - flat) < kFormulaTol && std::abs(got_flat - 2.243) < kQuotedTol,
            "t_flat = " + num(got_flat, 10));
  o.require(std::abs(got_relax - relax) < kFormulaTol && std::abs(got_relax - 3.394) < kQuotedTol,
            "tau_relax = " + num(got_relax, 10));
  const double a1 = arrive1 ? *arrive1 / d1.theta : kInf;
  const double a2 = arrive2 ? *arrive2 / d2.theta : kInf;
  o.require(std::abs(a1 / got_reg - 1.0) <= kArrivalRel, "g=0.05 median reaches 0.95 m_F at " + num(a1, 4));
  o.require(std::abs(a2 / got_relax - 1.0) <= kArrivalRel, "g=0 maxima reach 0.95 m_F at " + num(a2, 4));
  report(10, "time scales", o);
}

void criterion_erfc() {
  Outcome o;
  using boost::math::quadrature::gauss;
  double worst = 0.0;
  for (int i = 0; i <= 600; ++i) {
    const double x = 0.01 * i;
    // 2/sqrt(pi) int_x^{x+14} e^{-s^2} ds; the remainder is below e^{-196}
    double q = 0.0;
    for (int j = 0; j < 56; ++j) {
      const double a = x + 0.25 * j;
      q += gauss<double, 30>::integrate([](double s) { return std::exp(-s * s); }, a, a + 0.25);
    }
    q *= 2.0 / std::sqrt(std::numbers::pi);
    worst = std::max(worst, std::abs(buridan::erfc(x) / q - 1.0));
  }
  o.require(worst < kErfcRel, "max relative error on [0, 6] = " + num(worst, 3));
  report(11, "erfc accuracy", o);
}

void criterion_offdiagonal() {
  Outcome o;
  ModelParams p;
  p.n_spins = 1000;
  p.coupling_g = 0.05;
  p.gamma = 1e-3;
  p.debye_cutoff = 100.0;
  const auto s = offdiagonal_scales(p, 0.1);
  const double tau_red = 1.0 / (std::sqrt(2.0 * 1000.0) * 0.05);
  const double t_rec = std::numbers::pi / (2.0 * 0.05);
  const double bath = 1e-3 * 1000.0 * 100.0 * 100.0 / (0.05 * 0.05);
  const double spread = 0.1 * std::sqrt(1000.0);
  o.require(std::abs(s.tau_red - tau_red) < kScaleTol * tau_red, "tau_red = " + num(s.tau_red, 8));
  o.require(std::abs(s.t_recurrence - t_rec) < kScaleTol * t_rec, "t_recurrence = " + num(s.t_recurrence, 8));
  o.require(std::abs(s.bath_ratio - bath) < kScaleTol * bath, "bath ratio = " + num(s.bath_ratio, 8));
  o.require(std::abs(s.spread_ratio - spread) < kScaleTol * spread, "spread ratio = " + num(s.spread_ratio, 8));
  bool ordered = true;
  for (int n : {2, 3, 10, 100, 1000, 100000}) {
    for (double g : {1e-6, 1e-3, 0.05, 1.0, 30.0}) {
      ModelParams q = p;
      q.n_spins = n;
      q.coupling_g = g;
      const auto r = offdiagonal_scales(q, 0.1);
      ordered = ordered && r.tau_red < r.t_recurrence;
    }
  }
  o.require(ordered, "tau_red < t_recurrence on the grid");
  report(12, "off-diagonal scales", o);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  try {
    criterion_fixed_points();

    // figure 1 run: trajectory, width dynamics, arrival, equilibrium width
    const auto p1 = figure_params(0.05);
    const double th1 = derived_scales(p1).theta;
    const std::vector<double> fig1_times{0.5, 1.0, 2.25, 3.0, 4.0, 5.0};
    std::vector<double> width_grid;
    for (int i = 0; i <= 150; ++i) width_grid.push_back(1.0 + 0.01 * i);
    std::vector<double> snaps1{0.0};
    for (double t : fig1_times) snaps1.push_back(t * th1);
    for (double t : width_grid) snaps1.push_back(t * th1);
    std::sort(snaps1.begin(), snaps1.end());
    snaps1.erase(std::unique(snaps1.begin(), snaps1.end()), snaps1.end());
    Arrival arr1{0.95 * derived_scales(p1).m_ferro};
    const auto run1 = run_master(p1, 20.0 * th1, snaps1,
                                 [&](const DiscreteDistribution& d) { arr1.feed(d.time, continuum_median(d)); });
    criterion_figure1(p1, run1, fig1_times);

    // figure 2 run
    const auto p2 = figure_params(0.0);
    const double th2 = derived_scales(p2).theta;
    const double t_flat = time_scales(p2).t_flat;
    Arrival arr2{0.95 * derived_scales(p2).m_ferro};
    const auto run2 = run_master(p2, 20.0 * th2, {t_flat, 10.0 * th2}, [&](const DiscreteDistribution& d) {
      const auto [m, rho] = upper_half(d);
      arr2.feed(d.time, mode_of(m, rho));
    });
    criterion_figure2(p2, run2, t_flat);
    criterion_split(run2);
    criterion_stationary();
    criterion_cross_solver(p1, run1, {0.0, 0.5, 1.0, 2.25, 3.0, 4.0, 5.0});

    Outcome h;
    h.require(worst_h_theorem >= -kFreeEnergySlack,
              "most negative relative step change of S - U/T over all runs = " + num(worst_h_theorem, 3));
    report(5, "free energy monotone", h);

    criterion_equilibrium_width(p1, run1, p2, run2);
    criterion_width_dynamics(p1, run1, width_grid);
    criterion_time_scales(p1, arr1.when, p2, arr2.when);
    criterion_erfc();
    criterion_offdiagonal();
  } catch (const std::exception& e) {
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d criterion(s) failed, %.0f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
