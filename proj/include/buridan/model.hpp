#pragma once

#include <limits>
#include <optional>
#include <vector>

namespace buridan {

/// Which apparatus sector is evolved: the tested spin's s_z = +1 (up) or -1 (down).
enum class Sector { up, down };

/// Curie-Weiss magnet coupled to a spin and a phonon bath. Units hbar = J = k_B = 1
/// by convention, but every formula carries hbar and J explicitly.
struct ModelParams {
  int n_spins = 1000;
  double coupling_j = 1.0;
  double temp_bath = 0.65;
  double temp_init = std::numeric_limits<double>::infinity();
  double coupling_g = 0.05;
  double gamma = 1e-3;
  double debye_cutoff = 100.0;  ///< may be +inf
  double hbar = 1.0;
  Sector sector = Sector::up;
  double m_offset = 0.0;           ///< m0, initial mean magnetization
  std::optional<double> delta0;    ///< initial width; derived from temp_init if unset
  double pre_field = 0.0;          ///< g0, field present before the coupling

  /// Signed coupling seen by this sector: +g (up) or -g (down).
  double g_eff() const { return sector == Sector::up ? coupling_g : -coupling_g; }
  /// Initial width: the override, else sqrt(T0/(T0-J)), with 1 for T0 = inf.
  double initial_width() const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Same, and additionally requires T < J.
  void validate_ferromagnetic() const;
};

ModelParams with_sector(ModelParams p, Sector s);

/// Local field h(m) = g_eff + J m.
double field_h(const ModelParams& p, double m);

/// Drift v(m) = (gamma/hbar) h (1 - m coth(h/T) + 1/N).
double drift_v(const ModelParams& p, double m);

/// Drift without the 1/N term.
double drift_v_mean_field(const ModelParams& p, double m);

/// Diffusion w(m) = (gamma/hbar) h (coth(h/T) - m); the FP diffusion coefficient is w/N.
double diffusion_w(const ModelParams& p, double m);

/// Bohr frequencies of single flips from magnetization m: up (plus) and down (minus).
struct BohrFrequencies {
  double plus;
  double minus;
};
BohrFrequencies omega_pm(const ModelParams& p, double m);

enum class Stability { stable, unstable, marginal };

struct FixedPoint {
  double m;
  Stability stability;
};

/// Roots of m = tanh((g_eff + J m)/T), ascending. This is the N -> inf
/// equilibrium condition; stability from the sign of the drift slope.
std::vector<FixedPoint> fixed_points(const ModelParams& p);

/// Zeros of the finite-N drift v(m), ascending.
std::vector<FixedPoint> drift_zeros(const ModelParams& p);

struct DerivedScales {
  double m_ferro;     ///< |stable mean-field root| on the side favoured by g_eff
  double m_repel;     ///< -g_eff/(J-T), linearized unstable point
  double theta;       ///< hbar/(gamma (J-T))
  double delta_ferro; ///< equilibrium width at m_ferro
  double delta;       ///< sqrt(T/(J-T) + delta0^2)
  double bias;        ///< b = g_eff/(J-T) + m0
  double lambda;      ///< b sqrt(N/2)/delta
};
/// Requires T < J (throws std::domain_error otherwise).
DerivedScales derived_scales(const ModelParams& p);

}  // namespace buridan
