#pragma once

#include <complex>
#include <vector>

namespace buridan {

struct ModelParams;

/// Ohmic phonon bath with exponential Debye cutoff.
struct BathSpec {
  double temp_bath;
  double debye_cutoff;  ///< +inf disables the cutoff
  double hbar = 1.0;
};

BathSpec bath_of(const ModelParams& p);

/// Emission/absorption spectrum K(omega) = (hbar^2 omega/4) e^{-|omega|/Gamma} / (e^{hbar omega/T} - 1),
/// with K(0) = hbar T / 4.
double spectral_density(const BathSpec& b, double omega);

/// Time-domain bath correlation K(s) = (1/2pi) int K(omega) e^{i omega s} d omega
/// (finite cutoff only), in closed form through the complex trigamma function.
std::complex<double> bath_correlation(const BathSpec& b, double s);

/// Finite-memory spectrum K_t(omega) = int_{-t}^{t} K(s) e^{-i omega s} ds,
/// computed in the frequency domain as K convolved with sin(x t)/(pi x).
/// Needs a finite cutoff; throws NumericalError when the panel budget is exhausted.
double windowed_spectral(const BathSpec& b, double omega, double t, double tol = 1e-8,
                         long max_panels = 4000000);

/// K_t(omega) for a fixed set of frequencies, advanced in t by integrating
/// 2 Re[K(s) e^{-i omega s}] over each new window. Monotone in t only.
class WindowedSpectrum {
 public:
  WindowedSpectrum(const BathSpec& b, std::vector<double> omegas);
  void advance_to(double t);
  double time() const { return t_; }
  const std::vector<double>& omegas() const { return omegas_; }
  const std::vector<double>& values() const { return values_; }

 private:
  BathSpec bath_;
  std::vector<double> omegas_;
  std::vector<double> values_;
  double t_ = 0.0;
};

}  // namespace buridan
