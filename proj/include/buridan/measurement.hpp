#pragma once

#include "buridan/analytic.hpp"
#include "buridan/model.hpp"

#include <array>
#include <optional>
#include <vector>

namespace buridan {

/// Diagonal weights and coherence magnitude of the tested spin.
struct SpinState {
  double r_up = 1.0;
  double r_down = 0.0;
  double offdiag_mag = 0.0;  ///< carried through only; it decays on the scale tau_red

  void validate() const;
};

enum class Engine { master, fokker_planck };

struct SectorOutcome {
  Sector sector = Sector::up;
  double weight = 0.0;  ///< Born weight r
  bool ran = false;     ///< sectors of zero weight are skipped
  std::vector<double> m;
  std::vector<double> density;  ///< conditional continuum density (integrates to 1)
  double split = 0.0;           ///< unstable drift zero of this sector
  double p_correct = 0.0;
  double p_wrong = 0.0;
  double peak_m = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  double mass_drift = 0.0;  ///< |final mass - weight|
};

struct OffDiagonalScales {
  double tau_red;       ///< hbar / (sqrt(2N) g)
  double t_recurrence;  ///< pi hbar / (2 g)
  double bath_ratio;    ///< gamma N hbar^2 Gamma^2 / g^2, suppression wants >> 1
  double spread_ratio;  ///< (dg/g) sqrt(N), suppression wants >> 1
  bool ordering_ok;     ///< tau_red < theta < tau_reg
};
/// Rejects g <= 0.
OffDiagonalScales offdiagonal_scales(const ModelParams& p, double g_spread);

struct MeasurementOptions {
  double p_wrong_bound = 1e-3;
  double lambda_threshold = 3.0;
  double purity_limit = 1.0;
  double coupling_limit = 1.0;
  double g_spread = 0.1;
  int cells = 2000;
  double tol = 1e-9;
};

struct MeasurementReport {
  SpinState spin;
  std::array<SectorOutcome, 2> sectors;  ///< up, down
  double born_check = 0.0;               ///< largest sector mass drift
  OffDiagonalScales offdiag{};
  RegimeReport regime{};
  double t_end = 0.0;
  bool inconclusive = false;  ///< t_end < tau_reg (or tau_reg undefined)
  bool faithful = false;
};

/// Evolves both sectors (concurrently) and assembles the verdict.
MeasurementReport run_measurement(const SpinState& spin, const ModelParams& p, Engine engine,
                                  double t_end, const MeasurementOptions& opts = {});

/// Mode of a sampled density, refined by a parabola through the top three points.
double mode_of(const std::vector<double>& m, const std::vector<double>& density);

}  // namespace buridan
