#include "buridan/measurement.hpp"

#include "buridan/fokker_planck.hpp"
#include "buridan/master.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>

namespace buridan {

namespace {

double unstable_zero(const ModelParams& p) {
  for (const auto& z : drift_zeros(p)) {
    if (z.stability == Stability::unstable) return z.m;
  }
  return -p.g_eff() / (p.coupling_j - p.temp_bath);
}

void fill_moments(SectorOutcome& s, double dm) {
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < s.m.size(); ++i) {
    mean += s.m[i] * s.density[i] * dm;
    m2 += s.m[i] * s.m[i] * s.density[i] * dm;
  }
  s.mean = mean;
  s.stddev = std::sqrt(std::max(0.0, m2 - mean * mean));
  s.peak_m = mode_of(s.m, s.density);
}

SectorOutcome run_sector(Sector sector, double weight, const ModelParams& base, Engine engine,
                         double t_end, const MeasurementOptions& opts) {
  SectorOutcome s;
  s.sector = sector;
  s.weight = weight;
  if (weight <= 0.0) return s;
  s.ran = true;
  const ModelParams p = with_sector(base, sector);
  s.split = unstable_zero(p);
  const bool up = sector == Sector::up;
  double correct = 0.0, total = 0.0;
  if (engine == Engine::master) {
    auto start = initial_distribution(p, InitKind::exact_paramagnet);
    for (double& w : start.weights) w *= weight;
    EvolveOptions eo;
    eo.tol = opts.tol;
    const auto res = evolve(start, p, t_end, eo);
    const auto& d = res.final;
    const int n = p.n_spins;
    for (int k = 0; k <= n; ++k) {
      const double m = d.m_at(k);
      total += d.weights[k];
      if (up ? m > s.split : m < s.split) correct += d.weights[k];
      s.m.push_back(m);
      s.density.push_back(d.density_at(k) / weight);
    }
    fill_moments(s, 2.0 / n);
  } else {
    auto init = gaussian_field(p, opts.cells);
    for (double& v : init.values) v *= weight;
    FpConfig cfg;
    cfg.cells = opts.cells;
    cfg.tol = opts.tol;
    const auto res = solve_fp(p, init, {t_end}, cfg);
    const auto& f = res.snapshots.back();
    const double dx = f.cell_width();
    for (int i = 0; i < f.cells(); ++i) {
      const double mass = f.values[i] * dx;
      total += mass;
      const double hi = f.centers[i] + 0.5 * dx;
      // fraction of the cell on the correct side of the split
      double frac = std::clamp((hi - s.split) / dx, 0.0, 1.0);
      if (!up) frac = 1.0 - frac;
      correct += frac * mass;
      s.m.push_back(f.centers[i]);
      s.density.push_back(f.values[i] / weight);
    }
    fill_moments(s, dx);
  }
  s.mass_drift = std::abs(total - weight);
  s.p_correct = correct / total;
  s.p_wrong = 1.0 - s.p_correct;
  return s;
}

}  // namespace

void SpinState::validate() const {
  if (!(r_up >= 0.0 && r_down >= 0.0)) throw std::invalid_argument("spin: weights must be >= 0");
  if (std::abs(r_up + r_down - 1.0) > 1e-12) {
    throw std::invalid_argument("spin: r_up + r_down must equal 1");
  }
  if (!(offdiag_mag >= 0.0) || offdiag_mag > std::sqrt(r_up * r_down) + 1e-15) {
    throw std::invalid_argument("spin: |r_updown| exceeds sqrt(r_up r_down)");
  }
}

double mode_of(const std::vector<double>& m, const std::vector<double>& density) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < density.size(); ++i) {
    if (density[i] > density[best]) best = i;
  }
  if (best == 0 || best + 1 >= density.size()) return m[best];
  const double a = density[best - 1], b = density[best], c = density[best + 1];
  const double den = a - 2.0 * b + c;
  if (den >= 0.0) return m[best];
  const double shift = 0.5 * (a - c) / den;
  return m[best] + shift * (m[best + 1] - m[best]);
}

OffDiagonalScales offdiagonal_scales(const ModelParams& p, double g_spread) {
  if (!(p.coupling_g > 0.0)) throw std::invalid_argument("offdiagonal_scales: g must be > 0");
  const double g = p.coupling_g;
  const double n = p.n_spins;
  OffDiagonalScales o{};
  o.tau_red = p.hbar / (std::sqrt(2.0 * n) * g);
  o.t_recurrence = std::numbers::pi * p.hbar / (2.0 * g);
  o.bath_ratio = p.gamma * n * p.hbar * p.hbar * p.debye_cutoff * p.debye_cutoff / (g * g);
  o.spread_ratio = g_spread * std::sqrt(n);
  o.ordering_ok = false;
  if (p.temp_bath < p.coupling_j) {
    const ModelParams up = with_sector(p, Sector::up);
    const auto ds = derived_scales(up);
    const auto ts = time_scales(up);
    o.ordering_ok = o.tau_red < ds.theta && ts.tau_reg && ds.theta < *ts.tau_reg;
  }
  return o;
}

MeasurementReport run_measurement(const SpinState& spin, const ModelParams& p, Engine engine,
                                  double t_end, const MeasurementOptions& opts) {
  spin.validate();
  p.validate_ferromagnetic();
  MeasurementReport r;
  r.spin = spin;
  r.t_end = t_end;
  auto up = std::async(std::launch::async, run_sector, Sector::up, spin.r_up, p, engine, t_end,
                       std::cref(opts));
  auto down = std::async(std::launch::async, run_sector, Sector::down, spin.r_down, p, engine,
                         t_end, std::cref(opts));
  r.sectors = {up.get(), down.get()};
  for (const auto& s : r.sectors) r.born_check = std::max(r.born_check, s.mass_drift);

  const ModelParams pu = with_sector(p, Sector::up);
  r.regime = classify_regime(pu, opts.lambda_threshold, opts.purity_limit, opts.coupling_limit);
  if (p.coupling_g > 0.0) r.offdiag = offdiagonal_scales(p, opts.g_spread);
  r.inconclusive = !r.regime.times.tau_reg || t_end < *r.regime.times.tau_reg;
  bool wrong_ok = true;
  for (const auto& s : r.sectors) {
    if (s.ran && !(s.p_wrong < opts.p_wrong_bound)) wrong_ok = false;
  }
  r.faithful = !r.inconclusive && wrong_ok && r.regime.purity_ok && r.regime.coupling_ok;
  return r;
}

}  // namespace buridan
