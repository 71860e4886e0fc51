#include "buridan/master.hpp"

#include "buridan/bath.hpp"
#include "buridan/integrator.hpp"
#include "buridan/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace buridan {

namespace {

std::vector<double> normalized_exp(std::vector<double> logw) {
  const double mx = *std::max_element(logw.begin(), logw.end());
  double sum = 0.0;
  for (double& x : logw) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : logw) x /= sum;
  return logw;
}

double reference_time(const ModelParams& p) {
  const double gap = std::abs(p.coupling_j - p.temp_bath);
  return p.hbar / (p.gamma * (gap > 0.0 ? gap : p.coupling_j));
}

RateTable rates_from(const ModelParams& p, const std::function<double(double)>& spectrum) {
  const int n = p.n_spins;
  RateTable r;
  r.up.assign(n + 1, 0.0);
  r.down.assign(n + 1, 0.0);
  const double pref = p.gamma * n / (p.hbar * p.hbar);
  for (int k = 0; k <= n; ++k) {
    const double m = static_cast<double>(2 * k - n) / n;
    const auto w = omega_pm(p, m);
    if (k < n) r.up[k] = pref * spectrum(w.plus) * (1.0 - m);
    if (k > 0) r.down[k] = pref * spectrum(w.minus) * (1.0 + m);
  }
  return r;
}

std::vector<double> flip_frequencies(const ModelParams& p) {
  const int n = p.n_spins;
  std::vector<double> out;
  out.reserve(2 * (n + 1));
  for (int k = 0; k <= n; ++k) {
    const auto w = omega_pm(p, static_cast<double>(2 * k - n) / n);
    out.push_back(w.plus);
    out.push_back(w.minus);
  }
  return out;
}

RateTable rates_from_window(const ModelParams& p, const WindowedSpectrum& ws) {
  const int n = p.n_spins;
  const auto& vals = ws.values();
  RateTable r;
  r.up.assign(n + 1, 0.0);
  r.down.assign(n + 1, 0.0);
  const double pref = p.gamma * n / (p.hbar * p.hbar);
  for (int k = 0; k <= n; ++k) {
    const double m = static_cast<double>(2 * k - n) / n;
    if (k < n) r.up[k] = pref * vals[2 * k] * (1.0 - m);
    if (k > 0) r.down[k] = pref * vals[2 * k + 1] * (1.0 + m);
  }
  return r;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

double DiscreteDistribution::total() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::vector<double> log_binomials(int n) {
  std::vector<double> out(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) {
    out[k] = out[k - 1] + std::log(static_cast<double>(n - k + 1)) - std::log(static_cast<double>(k));
  }
  // the recurrence drifts slightly; symmetrize so C(N,k) = C(N,N-k) exactly
  for (int k = 0; k <= n / 2; ++k) out[n - k] = out[k];
  return out;
}

DiscreteDistribution initial_distribution(const ModelParams& p, InitKind kind) {
  p.validate();
  const int n = p.n_spins;
  DiscreteDistribution d;
  d.n_spins = n;
  std::vector<double> logw(n + 1);
  if (kind == InitKind::exact_paramagnet) {
    const auto lc = log_binomials(n);
    const double tilt = std::log1p(p.m_offset) - std::log1p(-p.m_offset);
    for (int k = 0; k <= n; ++k) {
      const double m = d.m_at(k);
      double lw = lc[k] + k * tilt;
      if (std::isfinite(p.temp_init)) {
        lw += n * (p.pre_field * m + 0.5 * p.coupling_j * m * m) / p.temp_init;
      }
      logw[k] = lw;
    }
  } else {
    const double w = p.initial_width();
    for (int k = 0; k <= n; ++k) {
      const double x = d.m_at(k) - p.m_offset;
      logw[k] = -0.5 * n * x * x / (w * w);
    }
  }
  d.weights = normalized_exp(std::move(logw));
  return d;
}

RateRow RateTable::row(int k) const {
  const int n = static_cast<int>(up.size()) - 1;
  return {k < n ? down[k + 1] : 0.0, up[k], k > 0 ? up[k - 1] : 0.0, down[k]};
}

double RateTable::max_outflow() const {
  double mx = 0.0;
  for (std::size_t k = 0; k < up.size(); ++k) mx = std::max(mx, up[k] + down[k]);
  return mx;
}

void RateTable::apply(std::span<const double> p, std::span<double> dp) const {
  const std::size_t n = up.size();
  for (std::size_t k = 0; k < n; ++k) {
    double v = -(up[k] + down[k]) * p[k];
    if (k > 0) v += up[k - 1] * p[k - 1];
    if (k + 1 < n) v += down[k + 1] * p[k + 1];
    dp[k] = v;
  }
}

RateTable transition_rates(const ModelParams& p, MemoryMode mode, double t) {
  p.validate();
  const BathSpec b = bath_of(p);
  if (mode == MemoryMode::short_memory) {
    return rates_from(p, [&](double w) { return spectral_density(b, w); });
  }
  WindowedSpectrum ws(b, flip_frequencies(p));
  ws.advance_to(t);
  return rates_from_window(p, ws);
}

DiscreteDistribution stationary_distribution(const ModelParams& p) {
  p.validate();
  const int n = p.n_spins;
  const auto lc = log_binomials(n);
  DiscreteDistribution d;
  d.n_spins = n;
  std::vector<double> logw(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double m = d.m_at(k);
    logw[k] = lc[k] + n * (p.g_eff() * m + 0.5 * p.coupling_j * m * m) / p.temp_bath;
  }
  d.weights = normalized_exp(std::move(logw));
  return d;
}

FreeEnergy free_energy(const DiscreteDistribution& d, const ModelParams& p) {
  const auto lc = log_binomials(d.n_spins);
  double s = 0.0;
  double u = 0.0;
  for (int k = 0; k <= d.n_spins; ++k) {
    const double w = d.weights[k];
    if (w <= 0.0) continue;
    const double m = d.m_at(k);
    s -= w * (std::log(w) - lc[k]);
    u -= d.n_spins * w * (p.g_eff() * m + 0.5 * p.coupling_j * m * m);
  }
  return {s, u, s - u / p.temp_bath};
}

EvolveResult evolve(const DiscreteDistribution& start, const ModelParams& p, double t_end,
                    const EvolveOptions& opts) {
  p.validate();
  if (start.n_spins != p.n_spins || static_cast<int>(start.weights.size()) != p.n_spins + 1) {
    throw std::invalid_argument("evolve: distribution size does not match N");
  }
  if (t_end < start.time) throw std::invalid_argument("evolve: t_end before start time");
  const bool full = opts.mode == MemoryMode::full_memory;
  const double mass0 = start.total();
  const auto lc = log_binomials(p.n_spins);

  EvolveResult res;
  std::vector<double> y = start.weights;
  double t = start.time;

  auto free_value = [&](const std::vector<double>& w) {
    double s = 0.0, u = 0.0;
    for (int k = 0; k <= p.n_spins; ++k) {
      if (w[k] <= 0.0) continue;
      const double m = static_cast<double>(2 * k - p.n_spins) / p.n_spins;
      s -= w[k] * (std::log(w[k]) - lc[k]);
      u -= p.n_spins * w[k] * (p.g_eff() * m + 0.5 * p.coupling_j * m * m);
    }
    return s - u / p.temp_bath;
  };
  const bool monitor = opts.monitor_free_energy && !full;
  double f_prev = monitor ? free_value(y) : 0.0;

  DiscreteDistribution view;
  view.n_spins = p.n_spins;
  AcceptHook hook = [&](double tn, std::vector<double>& w) {
    bool clipped = false;
    for (double& x : w) {
      if (x < 0.0) {
        if (x < -1e-14 * mass0) {
          throw NumericalError("negative probability " + std::to_string(x) + " at t = " +
                               std::to_string(tn));
        }
        x = 0.0;
        clipped = true;
      } else if (x < 1e-250) {
        x = 0.0;
      }
    }
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (clipped) {
      for (double& x : w) x *= mass0 / sum;
      sum = mass0;
    }
    const double drift = std::abs(sum - mass0);
    res.max_mass_drift = std::max(res.max_mass_drift, drift);
    if (drift > 1e-10 * std::max(mass0, 1e-300)) {
      throw NumericalError("probability mass drifted by " + std::to_string(drift));
    }
    if (monitor) {
      const double f = free_value(w);
      const double rel = (f - f_prev) / std::max(std::abs(f_prev), 1.0);
      res.min_free_energy_increment = std::min(res.min_free_energy_increment, rel);
      f_prev = f;
    }
    if (opts.on_step) {
      view.time = tn;
      view.weights = w;
      opts.on_step(view);
    }
  };

  std::vector<double> stops;
  for (double ts : opts.snapshot_times) {
    if (ts < start.time) throw std::invalid_argument("evolve: snapshot time before start");
    if (ts <= t_end) stops.push_back(ts);
  }
  std::sort(stops.begin(), stops.end());

  auto snapshot = [&](double ts) {
    DiscreteDistribution d;
    d.n_spins = p.n_spins;
    d.time = ts;
    d.weights = y;
    res.snapshots.push_back(std::move(d));
  };

  const double dt_min = 1e-15 * reference_time(p);
  if (!full) {
    RateTable rates = transition_rates(p, MemoryMode::short_memory);
    StepControl ctl;
    ctl.tol = opts.tol * std::max(mass0, 1e-300);
    ctl.dt_max = 0.1 / std::max(rates.max_outflow(), 1e-300);
    ctl.dt_min = dt_min;
    StepDoublingRk4 rk([&rates](double, std::span<const double> in, std::span<double> out) {
      rates.apply(in, out);
    }, ctl);
    for (double ts : stops) {
      rk.advance(t, y, ts, hook);
      snapshot(ts);
    }
    rk.advance(t, y, t_end, hook);
    res.accepted_steps = rk.stats().accepted;
    res.rejected_steps = rk.stats().rejected;
  } else {
    WindowedSpectrum ws(bath_of(p), flip_frequencies(p));
    const double t_micro = 0.1 * p.hbar / p.temp_bath;
    stops.push_back(t_end);
    double dt_prev = 0.0;
    std::size_t next_stop = 0;
    while (next_stop < stops.size()) {
      const double target = stops[next_stop];
      if (t >= target) {
        if (next_stop + 1 < stops.size()) snapshot(target);
        ++next_stop;
        continue;
      }
      ws.advance_to(t);
      const RateTable rates = rates_from_window(p, ws);
      const double macro_end = std::min(target, t + std::max(t_micro, 0.05 * t));
      StepControl ctl;
      ctl.tol = opts.tol * std::max(mass0, 1e-300);
      ctl.dt_max = 0.1 / std::max(rates.max_outflow(), 1e-300);
      ctl.dt_initial = dt_prev > 0.0 ? dt_prev : 0.0;
      ctl.dt_min = dt_min;
      StepDoublingRk4 rk([&rates](double, std::span<const double> in, std::span<double> out) {
        rates.apply(in, out);
      }, ctl);
      rk.advance(t, y, macro_end, hook);
      dt_prev = rk.last_dt();
      res.accepted_steps += rk.stats().accepted;
      res.rejected_steps += rk.stats().rejected;
    }
  }
  res.final.n_spins = p.n_spins;
  res.final.time = t_end;
  res.final.weights = std::move(y);
  return res;
}

SampleResult sample_trajectories(const RateTable& rates, const DiscreteDistribution& start,
                                 std::size_t n_traj, double t_end, std::uint64_t seed,
                                 double m_split, unsigned workers) {
  const int n = start.n_spins;
  if (static_cast<int>(rates.up.size()) != n + 1) {
    throw std::invalid_argument("sample_trajectories: rate table size does not match N");
  }
  std::vector<double> cdf(n + 1);
  std::partial_sum(start.weights.begin(), start.weights.end(), cdf.begin());
  const double mass = cdf.back();

  SampleResult res;
  res.n_spins = n;
  res.time = t_end;
  res.final_k.assign(n_traj, 0);

  auto run = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
      std::mt19937_64 rng(seq);
      const double u0 = uniform01(rng) * mass;
      int k = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u0) - cdf.begin());
      k = std::min(k, n);
      double t = start.time;
      while (true) {
        const double out = rates.up[k] + rates.down[k];
        if (!(out > 0.0)) break;
        t += -std::log1p(-uniform01(rng)) / out;
        if (t > t_end) break;
        if (uniform01(rng) * out < rates.up[k]) ++k; else --k;
      }
      res.final_k[i] = k;
    }
  };

  unsigned nw = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
  nw = static_cast<unsigned>(std::min<std::size_t>(nw, std::max<std::size_t>(n_traj, 1)));
  if (nw <= 1) {
    run(0, n_traj);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_traj + nw - 1) / nw;
    for (unsigned w = 0; w < nw; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(n_traj, lo + chunk);
      if (lo < hi) pool.emplace_back(run, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  res.histogram.assign(n + 1, 0.0);
  std::size_t above = 0, below = 0;
  for (int k : res.final_k) {
    res.histogram[k] += 1.0;
    const double m = static_cast<double>(2 * k - n) / n;
    if (m > m_split) ++above;
    if (m < m_split) ++below;
  }
  if (n_traj > 0) {
    for (double& h : res.histogram) h /= static_cast<double>(n_traj);
    res.fraction_above = static_cast<double>(above) / n_traj;
    res.fraction_below = static_cast<double>(below) / n_traj;
  }
  return res;
}

SampleResult sample_trajectories(const ModelParams& p, std::size_t n_traj, double t_end,
                                 std::uint64_t seed, unsigned workers) {
  const auto rates = transition_rates(p, MemoryMode::short_memory);
  const auto start = initial_distribution(p, InitKind::exact_paramagnet);
  double split = 0.0;
  for (const auto& z : drift_zeros(p)) {
    if (z.stability == Stability::unstable) split = z.m;
  }
  return sample_trajectories(rates, start, n_traj, t_end, seed, split, workers);
}

}  // namespace buridan
