#pragma once

#include "buridan/model.hpp"

#include <vector>

namespace buridan {

/// Density P(m) at the centers of M uniform cells on [-1, 1].
struct ContinuumField {
  double time = 0.0;
  std::vector<double> centers;
  std::vector<double> values;

  int cells() const { return static_cast<int>(values.size()); }
  double cell_width() const { return 2.0 / values.size(); }
  /// Midpoint-rule integral of P.
  double mass() const;
};

struct FpConfig {
  int cells = 2000;
  double dt_init = 0.0;  ///< 0: automatic
  double tol = 1e-9;
};

/// Uniform cell centers on [-1, 1].
std::vector<double> cell_centers(int cells);

/// Gaussian of mean m0 and width delta0/sqrt(N), normalized on the mesh.
ContinuumField gaussian_field(const ModelParams& p, int cells);

enum class Branch { plus, minus, global };

/// Gaussian around a stable root (plus: largest, minus: smallest) with sd
/// delta_F/sqrt(N), or the mesh-exact stationary profile exp(N int v/w) (global).
ContinuumField equilibrium_profile(const ModelParams& p, Branch branch, int cells = 2000);

struct FpResult {
  std::vector<ContinuumField> snapshots;  ///< one per requested time
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double max_mass_drift = 0.0;
};

/// Advances dP/dt = d/dm[-v P + (w/N) dP/dm] with exponentially fitted
/// (Scharfetter-Gummel) face fluxes and zero-flux walls. The mesh of `init` is used.
FpResult solve_fp(const ModelParams& p, const ContinuumField& init,
                  const std::vector<double>& times, const FpConfig& cfg = {});

/// dP/dt of the discrete operator, for equilibrium checks.
std::vector<double> fp_rhs(const ModelParams& p, const ContinuumField& field);

}  // namespace buridan
