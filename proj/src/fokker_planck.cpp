#include "buridan/fokker_planck.hpp"

#include "buridan/integrator.hpp"
#include "buridan/master.hpp"
#include "buridan/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace buridan {

namespace {

// x / (e^x - 1)
double bernoulli_fn(double x) {
  if (std::abs(x) < 1e-10) return 1.0 - 0.5 * x;
  if (x > 700.0) return x * std::exp(-x);
  return x / std::expm1(x);
}

// Potential jumps dphi_i = -N int_{c_i}^{c_{i+1}} v/w between neighbouring centers.
std::vector<double> potential_steps(const ModelParams& p, const std::vector<double>& c) {
  const auto& rule = gauss_legendre(8);
  std::vector<double> out(c.size() - 1);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const double mid = 0.5 * (c[i] + c[i + 1]);
    const double half = 0.5 * (c[i + 1] - c[i]);
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double m = mid + half * rule.nodes[q];
      acc += rule.weights[q] * drift_v(p, m) / diffusion_w(p, m);
    }
    out[i] = -p.n_spins * half * acc;
  }
  return out;
}

// Cell-to-cell rates acting on cell masses.
RateTable fp_rates(const ModelParams& p, const std::vector<double>& c) {
  const std::size_t m = c.size();
  const double dx = 2.0 / m;
  const auto dphi = potential_steps(p, c);
  RateTable r;
  r.up.assign(m, 0.0);
  r.down.assign(m, 0.0);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double face = 0.5 * (c[i] + c[i + 1]);
    const double d = diffusion_w(p, face) / p.n_spins / (dx * dx);
    r.up[i] = d * bernoulli_fn(dphi[i]);
    r.down[i + 1] = d * bernoulli_fn(-dphi[i]);
  }
  return r;
}

ContinuumField normalized_field(std::vector<double> centers, std::vector<double> logp) {
  const double mx = *std::max_element(logp.begin(), logp.end());
  const double dx = 2.0 / centers.size();
  double sum = 0.0;
  for (double& x : logp) {
    x = std::exp(x - mx);
    sum += x * dx;
  }
  for (double& x : logp) x /= sum;
  ContinuumField f;
  f.centers = std::move(centers);
  f.values = std::move(logp);
  return f;
}

}  // namespace

double ContinuumField::mass() const {
  return std::accumulate(values.begin(), values.end(), 0.0) * cell_width();
}

std::vector<double> cell_centers(int cells) {
  if (cells < 100) throw std::invalid_argument("cells: must be >= 100");
  std::vector<double> c(cells);
  for (int i = 0; i < cells; ++i) c[i] = -1.0 + (2.0 * i + 1.0) / cells;
  return c;
}

ContinuumField gaussian_field(const ModelParams& p, int cells) {
  p.validate();
  auto c = cell_centers(cells);
  const double w = p.initial_width();
  std::vector<double> logp(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double x = c[i] - p.m_offset;
    logp[i] = -0.5 * p.n_spins * x * x / (w * w);
  }
  return normalized_field(std::move(c), std::move(logp));
}

ContinuumField equilibrium_profile(const ModelParams& p, Branch branch, int cells) {
  p.validate();
  auto c = cell_centers(cells);
  std::vector<double> logp(c.size(), 0.0);
  if (branch == Branch::global) {
    const auto dphi = potential_steps(p, c);
    for (std::size_t i = 1; i < c.size(); ++i) logp[i] = logp[i - 1] - dphi[i - 1];
    return normalized_field(std::move(c), std::move(logp));
  }
  if (!(p.temp_bath < p.coupling_j)) {
    throw std::domain_error("equilibrium_profile: ferromagnetic branches need T < J");
  }
  std::vector<double> stable;
  for (const auto& fp : fixed_points(p)) {
    if (fp.stability == Stability::stable) stable.push_back(fp.m);
  }
  const double center = branch == Branch::plus ? stable.back() : stable.front();
  if ((branch == Branch::plus && center <= 0.0) || (branch == Branch::minus && center >= 0.0)) {
    throw std::domain_error("equilibrium_profile: no stable root on the requested side");
  }
  const double inv = 1.0 / (1.0 - center * center) - p.coupling_j / p.temp_bath;
  if (!(inv > 0.0)) throw std::domain_error("equilibrium_profile: non-positive curvature");
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double x = c[i] - center;
    logp[i] = -0.5 * p.n_spins * x * x * inv;
  }
  return normalized_field(std::move(c), std::move(logp));
}

std::vector<double> fp_rhs(const ModelParams& p, const ContinuumField& field) {
  const auto rates = fp_rates(p, field.centers);
  std::vector<double> out(field.values.size());
  rates.apply(field.values, out);
  return out;
}

FpResult solve_fp(const ModelParams& p, const ContinuumField& init,
                  const std::vector<double>& times, const FpConfig& cfg) {
  p.validate();
  if (init.cells() < 100) throw std::invalid_argument("cells: must be >= 100");
  if (!std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("solve_fp: times must be ascending");
  }
  for (double v : init.values) {
    if (!(v >= 0.0)) throw std::invalid_argument("solve_fp: initial density must be >= 0");
  }
  const double dx = init.cell_width();
  const RateTable rates = fp_rates(p, init.centers);
  std::vector<double> y(init.values.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = init.values[i] * dx;
  const double mass0 = std::accumulate(y.begin(), y.end(), 0.0);

  FpResult res;
  AcceptHook hook = [&](double tn, std::vector<double>& w) {
    bool clipped = false;
    for (double& x : w) {
      if (x < 0.0) {
        if (x < -1e-14 * mass0) {
          throw NumericalError("negative density at t = " + std::to_string(tn));
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
    if (drift > 1e-8 * mass0) {
      throw NumericalError("mass drifted by " + std::to_string(drift));
    }
  };

  StepControl ctl;
  ctl.tol = cfg.tol * mass0;
  ctl.dt_max = 0.1 / std::max(rates.max_outflow(), 1e-300);
  ctl.dt_initial = cfg.dt_init;
  const double gap = std::abs(p.coupling_j - p.temp_bath);
  ctl.dt_min = 1e-15 * p.hbar / (p.gamma * (gap > 0.0 ? gap : p.coupling_j));
  StepDoublingRk4 rk([&rates](double, std::span<const double> in, std::span<double> out) {
    rates.apply(in, out);
  }, ctl);

  double t = init.time;
  for (double ts : times) {
    if (ts < t) throw std::invalid_argument("solve_fp: output time before start");
    rk.advance(t, y, ts, hook);
    ContinuumField f;
    f.time = ts;
    f.centers = init.centers;
    f.values.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) f.values[i] = y[i] / dx;
    res.snapshots.push_back(std::move(f));
  }
  res.accepted_steps = rk.stats().accepted;
  res.rejected_steps = rk.stats().rejected;
  return res;
}

}  // namespace buridan
