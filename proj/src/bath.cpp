#include "buridan/bath.hpp"

#include "buridan/model.hpp"
#include "buridan/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace buridan {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// x / (e^x - 1), equal to 1 at x = 0
double bose_factor(double x) {
  if (x == 0.0) return 1.0;
  if (x > 700.0) return x * std::exp(-x);
  return x / std::expm1(x);
}

// sin(x t)/(pi x), the finite-window smoothing kernel
double window_kernel(double x, double t) {
  const double xt = x * t;
  if (std::abs(xt) < 1e-4) return t / std::numbers::pi * (1.0 - xt * xt / 6.0);
  return std::sin(xt) / (std::numbers::pi * x);
}

// Upper bound of int_a^inf K(u) du, a > 0
double upper_tail_mass(const BathSpec& b, double a) {
  if (a <= 0.0) return inf;
  const double beta = b.hbar / b.temp_bath;
  const double kappa = beta + 1.0 / b.debye_cutoff;
  const double pref = 0.25 * b.hbar * b.hbar / -std::expm1(-beta * a);
  return pref * std::exp(-kappa * a) * (a / kappa + 1.0 / (kappa * kappa));
}

// Upper bound of int_{-inf}^{-a} K(u) du, a > 0
double lower_tail_mass(const BathSpec& b, double a) {
  if (a <= 0.0 || std::isinf(b.debye_cutoff)) return inf;
  const double beta = b.hbar / b.temp_bath;
  const double gc = b.debye_cutoff;
  const double pref = 0.25 * b.hbar * b.hbar / -std::expm1(-beta * a);
  return pref * gc * std::exp(-a / gc) * (a + gc);
}

}  // namespace

BathSpec bath_of(const ModelParams& p) { return {p.temp_bath, p.debye_cutoff, p.hbar}; }

double spectral_density(const BathSpec& b, double omega) {
  const double cutoff = std::isinf(b.debye_cutoff) ? 1.0 : std::exp(-std::abs(omega) / b.debye_cutoff);
  return 0.25 * b.hbar * b.temp_bath * bose_factor(b.hbar * omega / b.temp_bath) * cutoff;
}

std::complex<double> bath_correlation(const BathSpec& b, double s) {
  const double a = b.temp_bath / b.hbar;
  const double c = std::isinf(b.debye_cutoff) ? 0.0 : a / b.debye_cutoff;
  const std::complex<double> z1(1.0 + c, -a * s);
  const std::complex<double> z2(c, a * s);
  return b.temp_bath * b.temp_bath / (8.0 * std::numbers::pi) * (trigamma(z1) + trigamma(z2));
}

double windowed_spectral(const BathSpec& b, double omega, double t, double tol,
                         long max_panels) {
  if (t < 0.0) throw std::invalid_argument("windowed_spectral: t must be >= 0");
  if (t == 0.0) return 0.0;
  if (std::isinf(b.debye_cutoff)) {
    throw NumericalError("windowed_spectral: diverges without a finite Debye cutoff");
  }
  auto f = [&](double x) { return spectral_density(b, omega + x) * window_kernel(x, t); };
  auto panel = [&](double lo, double hi) {
    // the spectrum has a kink at omega' = 0, i.e. x = -omega
    const double kink = -omega;
    if (kink > lo && kink < hi) {
      return integrate(f, lo, kink, 1e-12, 0.0, 20) + integrate(f, kink, hi, 1e-12, 0.0, 20);
    }
    return integrate(f, lo, hi, 1e-12, 0.0, 20);
  };
  const double width = std::numbers::pi / t;
  double total = 0.0;
  bool up_done = false;
  bool down_done = false;
  long panels = 0;
  for (long j = 0; !(up_done && down_done); ++j) {
    if (panels > max_panels) {
      throw NumericalError("windowed_spectral: panel budget exhausted (Gamma t too large)");
    }
    const double x0 = j * width;
    const double x1 = (j + 1) * width;
    if (!up_done) {
      total += panel(x0, x1);
      ++panels;
    }
    if (!down_done) {
      total += panel(-x1, -x0);
      ++panels;
    }
    if (j % 16 == 15) {
      const double floor = 0.25 * tol * std::abs(total) + 1e-300;
      if (!up_done) up_done = upper_tail_mass(b, omega + x1) / (std::numbers::pi * x1) < floor;
      if (!down_done) down_done = lower_tail_mass(b, x1 - omega) / (std::numbers::pi * x1) < floor;
    }
  }
  return total;
}

WindowedSpectrum::WindowedSpectrum(const BathSpec& b, std::vector<double> omegas)
    : bath_(b), omegas_(std::move(omegas)), values_(omegas_.size(), 0.0) {
  if (std::isinf(b.debye_cutoff)) {
    throw NumericalError("finite-memory spectrum requires a finite Debye cutoff");
  }
}

void WindowedSpectrum::advance_to(double t) {
  if (t < t_) throw std::invalid_argument("WindowedSpectrum: time must not decrease");
  double w_max = 0.0;
  for (double w : omegas_) w_max = std::max(w_max, std::abs(w));
  const double scale_t = bath_.hbar / bath_.temp_bath;
  const double scale_w = w_max > 0.0 ? 3.0 / w_max : inf;
  const double scale_c = bath_.hbar / bath_.debye_cutoff;
  const auto& rule = gauss_legendre(16);
  std::vector<double> re(rule.nodes.size()), im(rule.nodes.size()), s(rule.nodes.size());
  double a = t_;
  while (a < t) {
    const double h = std::min({std::max(0.5 * a, 0.5 * scale_c), scale_t, scale_w, t - a});
    const double half = 0.5 * h;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      s[q] = a + half * (1.0 + rule.nodes[q]);
      const auto k = bath_correlation(bath_, s[q]);
      re[q] = 2.0 * half * rule.weights[q] * k.real();
      im[q] = 2.0 * half * rule.weights[q] * k.imag();
    }
    for (std::size_t i = 0; i < omegas_.size(); ++i) {
      const double w = omegas_[i];
      double acc = 0.0;
      for (std::size_t q = 0; q < s.size(); ++q) {
        acc += re[q] * std::cos(w * s[q]) + im[q] * std::sin(w * s[q]);
      }
      values_[i] += acc;
    }
    a += h;
  }
  t_ = t;
}

}  // namespace buridan
