#pragma once

#include "buridan/model.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace buridan {

/// Probability weights P_k on the lattice m_k = (2k - N)/N, k = 0..N.
struct DiscreteDistribution {
  int n_spins = 0;
  double time = 0.0;
  std::vector<double> weights;

  double m_at(int k) const { return static_cast<double>(2 * k - n_spins) / n_spins; }
  double total() const;
  /// Continuum density at m_k: (N/2) P_k.
  double density_at(int k) const { return 0.5 * n_spins * weights[k]; }
};

enum class InitKind { exact_paramagnet, gaussian };

/// Binomial start (each spin +-1 with probability 1/2, shifted to mean m0
/// when m0 != 0), or the discretized Gaussian of mean m0 and width delta0/sqrt(N).
DiscreteDistribution initial_distribution(const ModelParams& p, InitKind kind);

enum class MemoryMode { short_memory, full_memory };

/// Single-flip coefficients for lattice point k.
struct RateRow {
  double gain_from_above;  ///< d_{k+1}, flow k+1 -> k
  double loss_up;          ///< u_k,     flow k -> k+1
  double gain_from_below;  ///< u_{k-1}, flow k-1 -> k
  double loss_down;        ///< d_k,     flow k -> k-1
};

/// Birth-death generator: up[k] = rate k -> k+1, down[k] = rate k -> k-1.
struct RateTable {
  std::vector<double> up;
  std::vector<double> down;

  RateRow row(int k) const;
  double max_outflow() const;
  /// dP = L P.
  void apply(std::span<const double> p, std::span<double> dp) const;
};

/// Short-memory rates from the full spectrum; full-memory rates from K_t at time t.
RateTable transition_rates(const ModelParams& p, MemoryMode mode = MemoryMode::short_memory,
                           double t = 0.0);

/// Stationary law prop. to C(N,k) exp[N(g_eff m + J m^2/2)/T], normalized.
DiscreteDistribution stationary_distribution(const ModelParams& p);

struct FreeEnergy {
  double entropy;  ///< -sum P ln(P / C(N,k))
  double energy;   ///< -N sum P (g_eff m + J m^2/2)
  double value;    ///< entropy - energy/T, non-decreasing under short memory
};
FreeEnergy free_energy(const DiscreteDistribution& d, const ModelParams& p);

/// ln C(N,k) for k = 0..N, by exact recurrence.
std::vector<double> log_binomials(int n);

struct EvolveOptions {
  MemoryMode mode = MemoryMode::short_memory;
  double tol = 1e-9;
  std::vector<double> snapshot_times;  ///< absolute times, ascending
  /// Checks F never decreases by more than 1e-12 relative (short memory only).
  bool monitor_free_energy = false;
  /// Called after every accepted step.
  std::function<void(const DiscreteDistribution&)> on_step;
};

struct EvolveResult {
  DiscreteDistribution final;
  std::vector<DiscreteDistribution> snapshots;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double max_mass_drift = 0.0;
  double min_free_energy_increment = 0.0;  ///< most negative relative dF seen
};

/// Integrates dP/dt = L P from `start` to t_end. Throws NumericalError on
/// step underflow, a negative undershoot below -1e-14, or mass drift > 1e-10.
EvolveResult evolve(const DiscreteDistribution& start, const ModelParams& p, double t_end,
                    const EvolveOptions& opts = {});

struct SampleResult {
  int n_spins = 0;
  double time = 0.0;
  std::vector<int> final_k;           ///< per trajectory, in index order
  std::vector<double> histogram;      ///< fraction of trajectories at each k
  double fraction_above = 0.0;        ///< m > m_split
  double fraction_below = 0.0;        ///< m < m_split
};

/// Gillespie trajectories of the birth-death chain. Trajectory i draws from its
/// own std::mt19937_64 seeded with seed_seq{seed, i}; results do not depend on `workers`.
SampleResult sample_trajectories(const RateTable& rates, const DiscreteDistribution& start,
                                 std::size_t n_traj, double t_end, std::uint64_t seed,
                                 double m_split = 0.0, unsigned workers = 0);

/// Convenience overload: short-memory rates and the exact paramagnetic start;
/// the split point is the unstable drift zero.
SampleResult sample_trajectories(const ModelParams& p, std::size_t n_traj, double t_end,
                                 std::uint64_t seed, unsigned workers = 0);

}  // namespace buridan
