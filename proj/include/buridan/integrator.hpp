#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace buridan {

/// Explicit RK4 with step doubling. The local error is the L1 distance
/// between one full step and two half steps, divided by 15.
struct StepControl {
  double tol = 1e-9;
  double dt_initial = 0.0;  ///< 0: use dt_max / 10
  double dt_max = 0.0;      ///< hard stability cap, required
  double dt_min = 0.0;      ///< step underflow threshold
};

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;
/// Called after every accepted step; may modify y (clipping, renormalization).
using AcceptHook = std::function<void(double t, std::vector<double>& y)>;

class StepDoublingRk4 {
 public:
  StepDoublingRk4(Rhs rhs, StepControl ctl);

  /// Advance y from t to t_end exactly, landing on t_end.
  void advance(double& t, std::vector<double>& y, double t_end, const AcceptHook& hook = {});

  const StepStats& stats() const { return stats_; }
  double last_dt() const { return dt_; }

 private:
  void rk4(double t, std::span<const double> y, double h, std::span<const double> k1,
           std::vector<double>& out);

  Rhs rhs_;
  StepControl ctl_;
  StepStats stats_;
  double dt_ = 0.0;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_, full_, half_, half2_, k1h_;
};

}  // namespace buridan
