#include "buridan/integrator.hpp"

#include "buridan/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace buridan {

StepDoublingRk4::StepDoublingRk4(Rhs rhs, StepControl ctl) : rhs_(std::move(rhs)), ctl_(ctl) {
  if (!(ctl_.dt_max > 0.0)) throw std::invalid_argument("StepDoublingRk4: dt_max must be > 0");
  dt_ = ctl_.dt_initial > 0.0 ? std::min(ctl_.dt_initial, ctl_.dt_max) : 0.1 * ctl_.dt_max;
}

void StepDoublingRk4::rk4(double t, std::span<const double> y, double h,
                          std::span<const double> k1, std::vector<double>& out) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k1[i];
  rhs_(t + 0.5 * h, tmp_, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
  rhs_(t + 0.5 * h, tmp_, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * k3_[i];
  rhs_(t + h, tmp_, k4_);
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
  }
}

void StepDoublingRk4::advance(double& t, std::vector<double>& y, double t_end,
                              const AcceptHook& hook) {
  const std::size_t n = y.size();
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_, &full_, &half_, &half2_, &k1h_}) v->resize(n);
  while (t < t_end) {
    const double remaining = t_end - t;
    double h = std::min({dt_, ctl_.dt_max, remaining});
    const bool final_step = h == remaining;
    rhs_(t, y, k1_);
    rk4(t, y, h, k1_, full_);
    for (std::size_t i = 0; i < n; ++i) k1h_[i] = k1_[i];
    rk4(t, y, 0.5 * h, k1h_, half_);
    rhs_(t + 0.5 * h, half_, k1h_);
    rk4(t + 0.5 * h, half_, 0.5 * h, k1h_, half2_);
    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = half2_[i] - full_[i];
      err += std::abs(d);
      finite = finite && std::isfinite(half2_[i]);
    }
    err /= 15.0;
    if (!finite) err = std::numeric_limits<double>::infinity();
    const double factor =
        err == 0.0 ? 4.0 : std::clamp(0.9 * std::pow(ctl_.tol / err, 0.2), 0.1, 4.0);
    if (err <= ctl_.tol) {
      t = final_step ? t_end : t + h;
      y.swap(half2_);
      ++stats_.accepted;
      if (hook) hook(t, y);
      // a step shortened to hit t_end says nothing about the next one
      if (!final_step || factor < 1.0) dt_ = std::min(h * factor, ctl_.dt_max);
    } else {
      ++stats_.rejected;
      dt_ = h * factor;
      if (dt_ < ctl_.dt_min) {
        throw NumericalError("step size underflow at t = " + std::to_string(t) +
                             " (dt = " + std::to_string(dt_) + ")");
      }
    }
  }
}

}  // namespace buridan
