#include "buridan/model.hpp"

#include "buridan/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace buridan {

namespace {

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw std::invalid_argument(std::string(field) + ": " + why);
}

// d/dm of f by a central difference scaled to the root's neighbourhood
double slope(const ModelParams& p, double (*f)(const ModelParams&, double), double m) {
  const double eps = 1e-6;
  return (f(p, m + eps) - f(p, m - eps)) / (2.0 * eps);
}

Stability classify(double dv) {
  if (dv < 0.0) return Stability::stable;
  if (dv > 0.0) return Stability::unstable;
  return Stability::marginal;
}

// Roots of m = gain tanh(h/T); gain = 1 + 1/N gives the zeros of the finite-N drift.
std::vector<FixedPoint> roots_of(const ModelParams& p, double gain) {
  const double t = p.temp_bath;
  auto f = [&](double m) { return m - gain * std::tanh(field_h(p, m) / t); };
  std::vector<FixedPoint> out;
  for (double m : scan_roots(f, -1.0, 1.0, 10000, 1e-15)) {
    out.push_back({m, classify(slope(p, gain == 1.0 ? drift_v_mean_field : drift_v, m))});
  }
  return out;
}

}  // namespace

double ModelParams::initial_width() const {
  if (delta0) return *delta0;
  if (std::isinf(temp_init)) return 1.0;
  return std::sqrt(temp_init / (temp_init - coupling_j));
}

void ModelParams::validate() const {
  require(n_spins >= 2, "N", "must be an integer >= 2");
  require(std::isfinite(coupling_j) && coupling_j > 0.0, "J", "must be finite and > 0");
  require(std::isfinite(temp_bath) && temp_bath > 0.0, "T", "must be finite and > 0");
  require(temp_init > coupling_j, "T0", "must exceed J (paramagnetic initial state)");
  require(std::isfinite(coupling_g) && coupling_g >= 0.0, "g", "must be finite and >= 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma", "must be finite and > 0");
  require(debye_cutoff > 0.0, "Gamma", "must be > 0 (inf allowed)");
  require(std::isfinite(hbar) && hbar > 0.0, "hbar", "must be finite and > 0");
  require(std::isfinite(m_offset) && std::abs(m_offset) < 1.0, "m0", "must lie in (-1, 1)");
  require(!delta0 || (std::isfinite(*delta0) && *delta0 > 0.0), "delta0", "must be > 0");
  require(std::isfinite(pre_field), "g0", "must be finite");
}

void ModelParams::validate_ferromagnetic() const {
  validate();
  require(temp_bath < coupling_j, "T", "must be below J for the ferromagnetic regime");
}

ModelParams with_sector(ModelParams p, Sector s) {
  p.sector = s;
  return p;
}

double field_h(const ModelParams& p, double m) { return p.g_eff() + p.coupling_j * m; }

double drift_v(const ModelParams& p, double m) {
  const double h = field_h(p, m);
  return p.gamma / p.hbar * (h * (1.0 + 1.0 / p.n_spins) - m * h_coth(h, p.temp_bath));
}

double drift_v_mean_field(const ModelParams& p, double m) {
  const double h = field_h(p, m);
  return p.gamma / p.hbar * (h - m * h_coth(h, p.temp_bath));
}

double diffusion_w(const ModelParams& p, double m) {
  const double h = field_h(p, m);
  return p.gamma / p.hbar * (h_coth(h, p.temp_bath) - m * h);
}

BohrFrequencies omega_pm(const ModelParams& p, double m) {
  const double h = field_h(p, m);
  const double shift = 2.0 * p.coupling_j / p.n_spins;
  return {(-2.0 * h - shift) / p.hbar, (2.0 * h - shift) / p.hbar};
}

std::vector<FixedPoint> fixed_points(const ModelParams& p) {
  p.validate();
  return roots_of(p, 1.0);
}

std::vector<FixedPoint> drift_zeros(const ModelParams& p) {
  p.validate();
  return roots_of(p, 1.0 + 1.0 / p.n_spins);
}

DerivedScales derived_scales(const ModelParams& p) {
  p.validate();
  if (!(p.temp_bath < p.coupling_j)) {
    throw std::domain_error("derived_scales: requires T < J");
  }
  const double jt = p.coupling_j - p.temp_bath;
  const double sign = p.g_eff() < 0.0 ? -1.0 : 1.0;
  double m_ferro = 0.0;
  for (const auto& fp : fixed_points(p)) {
    if (fp.stability == Stability::stable && sign * fp.m > m_ferro) m_ferro = sign * fp.m;
  }
  DerivedScales s{};
  s.m_ferro = m_ferro;
  s.m_repel = -p.g_eff() / jt;
  s.theta = p.hbar / (p.gamma * jt);
  const double inv = 1.0 / (1.0 - m_ferro * m_ferro) - p.coupling_j / p.temp_bath;
  s.delta_ferro = 1.0 / std::sqrt(inv);
  const double d0 = p.initial_width();
  s.delta = std::sqrt(p.temp_bath / jt + d0 * d0);
  s.bias = p.g_eff() / jt + p.m_offset;
  s.lambda = s.bias * std::sqrt(p.n_spins / 2.0) / s.delta;
  return s;
}

}  // namespace buridan
