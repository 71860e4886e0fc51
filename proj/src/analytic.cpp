#include "buridan/analytic.hpp"

#include "buridan/numerics.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace buridan {

namespace {

constexpr double patch_radius = 1e-4;

double gaussian(double x, double mean, double var_over_n) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var_over_n) / std::sqrt(2.0 * std::numbers::pi * var_over_n);
}

// int dd / (a d + c d^2) between d0 and d1 (same sign, away from -a/c)
double log_patch(double a, double c, double d0, double d1) {
  auto prim = [&](double d) { return (std::log(std::abs(d)) - std::log(std::abs(a + c * d))) / a; };
  return prim(d1) - prim(d0);
}

}  // namespace

CharMap::CharMap(const ModelParams& p, CharModel model) : p_(p), model_(model) {
  p_.validate_ferromagnetic();
  const auto ds = derived_scales(p_);
  theta_ = ds.theta;
  m_ferro_ = ds.m_ferro;
  m_repel_ = ds.m_repel;
  if (model_ == CharModel::exact_quadrature) {
    const double h = 1e-3;
    for (const auto& z : drift_zeros(p_)) {
      const double m = z.m;
      auto v = [&](double x) { return drift_v(p_, x); };
      const double d1 = (v(m - 2 * h) - 8 * v(m - h) + 8 * v(m + h) - v(m + 2 * h)) / (12 * h);
      const double d2 = (-v(m - 2 * h) + 16 * v(m - h) - 30 * v(m) + 16 * v(m + h) - v(m + 2 * h)) /
                        (12 * h * h);
      zeros_.push_back(m);
      slopes_.push_back(d1);
      curv_.push_back(0.5 * d2);
    }
  } else if (model_ == CharModel::linearized) {
    zeros_ = {m_repel_};
  } else {
    if (!(std::abs(m_repel_) < m_ferro_)) {
      throw std::domain_error("cubic flow needs |m_P| < m_F");
    }
    zeros_ = {-m_ferro_, m_repel_, m_ferro_};
  }
}

double CharMap::velocity(double m) const {
  switch (model_) {
    case CharModel::exact_quadrature: return drift_v(p_, m);
    case CharModel::linearized: return (m - m_repel_) / theta_;
    case CharModel::cubic_v:
      return (m - m_repel_) * (m_ferro_ * m_ferro_ - m * m) / (theta_ * m_ferro_ * m_ferro_);
  }
  return 0.0;
}

std::pair<double, double> CharMap::cell_of(double x) const {
  const double lo_edge = model_ == CharModel::exact_quadrature ? -1.0 : -std::numeric_limits<double>::infinity();
  const double hi_edge = -lo_edge;
  double lo = lo_edge;
  for (double z : zeros_) {
    if (z < x) lo = z;
    else return {lo, z};
  }
  return {lo, hi_edge};
}

// int_a^b dm / v(m) for the exact drift, a and b inside one cell.
double CharMap::quad_time(double a, double b) const {
  if (a == b) return 0.0;
  const double sgn = b > a ? 1.0 : -1.0;
  double lo = std::min(a, b);
  double hi = std::max(a, b);
  double total = 0.0;
  for (std::size_t i = 0; i < zeros_.size(); ++i) {
    const double z = zeros_[i];
    // patch [z - r, z] or [z, z + r] intersected with [lo, hi]
    if (z >= lo - patch_radius && z <= lo && hi > z) {
      const double cut = std::min(hi, z + patch_radius);
      total += log_patch(slopes_[i], curv_[i], lo - z, cut - z);
      lo = cut;
    }
    if (z <= hi + patch_radius && z >= hi && lo < z) {
      const double cut = std::max(lo, z - patch_radius);
      total += log_patch(slopes_[i], curv_[i], cut - z, hi - z);
      hi = cut;
    }
  }
  if (hi > lo) {
    total += integrate([this](double m) { return 1.0 / drift_v(p_, m); }, lo, hi, 1e-13, 0.0, 30);
  }
  return sgn * total;
}

double CharMap::travel_time(double mu, double m) const {
  if (mu == m) return 0.0;
  switch (model_) {
    case CharModel::linearized: {
      const double r = (m - m_repel_) / (mu - m_repel_);
      if (!(r >= 1.0)) throw std::domain_error("travel_time: m not downstream of mu");
      return theta_ * std::log(r);
    }
    case CharModel::cubic_v: {
      if (!(std::abs(mu) < m_ferro_) || !(std::abs(m) < m_ferro_)) {
        throw std::domain_error("travel_time: cubic flow defined on (-m_F, m_F)");
      }
      const double dmu = mu - m_repel_;
      const double dm = m - m_repel_;
      const double mf2 = m_ferro_ * m_ferro_;
      const double e2 = (dm * dm * mf2 - dmu * dmu * m * m) / (dmu * dmu * (mf2 - m * m));
      if (!(dmu * dm > 0.0) || !(e2 >= 1.0)) {
        throw std::domain_error("travel_time: m not downstream of mu");
      }
      return 0.5 * theta_ * std::log(e2);
    }
    case CharModel::exact_quadrature: {
      const auto cell = cell_of(mu);
      const bool on_zero = std::find(zeros_.begin(), zeros_.end(), mu) != zeros_.end();
      const double v0 = velocity(mu);
      if (on_zero || !(m > cell.first && m < cell.second) || v0 * (m - mu) <= 0.0) {
        throw std::domain_error("travel_time: m not reachable from mu");
      }
      return quad_time(mu, m);
    }
  }
  return 0.0;
}

double CharMap::forward(double mu, double t) const {
  if (t < 0.0) throw std::invalid_argument("forward: t must be >= 0");
  if (t == 0.0) return mu;
  const double e = std::exp(t / theta_);
  switch (model_) {
    case CharModel::linearized: return m_repel_ + (mu - m_repel_) * e;
    case CharModel::cubic_v: {
      if (!(std::abs(mu) < m_ferro_)) throw std::domain_error("forward: cubic flow defined on (-m_F, m_F)");
      const double mf = m_ferro_;
      const double mp = m_repel_;
      const double a = (mu - mp) * e / mf;
      const double s = -std::expm1(-2.0 * t / theta_);
      const double den = 1.0 + a * a * s;
      const double root = std::sqrt(mf * mf * den - s * mp * mp);
      return (mp + a * root) / den;
    }
    case CharModel::exact_quadrature: {
      const double v0 = velocity(mu);
      if (v0 == 0.0) return mu;
      const auto cell = cell_of(mu);
      const double target = v0 > 0.0 ? cell.second : cell.first;
      // m = target - (target - mu) e^{-s}, s in (0, inf)
      auto at = [&](double s) { return target - (target - mu) * std::exp(-s); };
      auto f = [&](double s) { return quad_time(mu, at(s)) - t; };
      double hi = 1.0;
      while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 700.0) return target;
      }
      return at(bracket_root(f, 0.0, hi, 1e-14));
    }
  }
  return mu;
}

double CharMap::inverse(double m, double t) const {
  if (t < 0.0) throw std::invalid_argument("inverse: t must be >= 0");
  if (t == 0.0) return m;
  const double e = std::exp(-t / theta_);
  switch (model_) {
    case CharModel::linearized: return m * e + m_repel_ * (1.0 - e);
    case CharModel::cubic_v: {
      if (!(std::abs(m) < m_ferro_)) throw std::domain_error("inverse: cubic flow defined on (-m_F, m_F)");
      const double s = -std::expm1(-2.0 * t / theta_);
      return m_repel_ + (m - m_repel_) * e * m_ferro_ / std::sqrt(m_ferro_ * m_ferro_ - m * m * s);
    }
    case CharModel::exact_quadrature: {
      const double v1 = velocity(m);
      if (v1 == 0.0) return m;
      const auto cell = cell_of(m);
      // upstream end: the lower edge if the flow goes up
      const double source = v1 > 0.0 ? cell.first : cell.second;
      const bool source_is_zero = std::abs(source) < 1.0;
      auto at = [&](double s) { return source + (m - source) * std::exp(-s); };
      auto f = [&](double s) { return quad_time(at(s), m) - t; };
      double hi = 1.0;
      while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 700.0) {
          if (source_is_zero) return source;
          throw std::domain_error("inverse: no starting point inside [-1, 1]");
        }
      }
      return at(bracket_root(f, 0.0, hi, 1e-14));
    }
  }
  return m;
}

double CharMap::inverse_slope(double m, double t) const {
  switch (model_) {
    case CharModel::linearized: return std::exp(-t / theta_);
    case CharModel::cubic_v: {
      const double s = -std::expm1(-2.0 * t / theta_);
      const double mf2 = m_ferro_ * m_ferro_;
      const double q = mf2 - m * m * s;
      return m_ferro_ * std::exp(-t / theta_) * (mf2 - s * m * m_repel_) / (q * std::sqrt(q));
    }
    case CharModel::exact_quadrature: {
      for (std::size_t i = 0; i < zeros_.size(); ++i) {
        if (std::abs(m - zeros_[i]) < 1e-12) return std::exp(-slopes_[i] * t);
      }
      return velocity(inverse(m, t)) / velocity(m);
    }
  }
  return 1.0;
}

double blur_variance(const ModelParams& p, double t) {
  const auto ds = derived_scales(p);
  return -std::expm1(-2.0 * t / ds.theta) * p.temp_bath / (p.coupling_j - p.temp_bath);
}

std::vector<double> closed_form_profile(const ModelParams& p, const std::vector<double>& ms,
                                        double t, DensityModel model) {
  p.validate_ferromagnetic();
  if (t < 0.0) throw std::invalid_argument("closed_form_P: t must be >= 0");
  const double n = p.n_spins;
  const double d0 = p.initial_width();
  std::vector<double> out;
  out.reserve(ms.size());
  if (t == 0.0 && model != DensityModel::gaussian_cubic) {
    for (double m : ms) out.push_back(gaussian(m, p.m_offset, d0 * d0 / n));
    return out;
  }
  switch (model) {
    case DensityModel::drift_only: {
      const CharMap map(p, CharModel::exact_quadrature);
      for (double m : ms) {
        double mu;
        try {
          mu = map.inverse(m, t);
        } catch (const std::domain_error&) {
          out.push_back(0.0);
          continue;
        }
        out.push_back(gaussian(mu, p.m_offset, d0 * d0 / n) * map.inverse_slope(m, t));
      }
      break;
    }
    case DensityModel::gaussian_linear: {
      const CharMap map(p, CharModel::linearized);
      const double var = (blur_variance(p, t) + d0 * d0) / n;
      for (double m : ms) {
        out.push_back(gaussian(map.inverse(m, t), p.m_offset, var) * map.inverse_slope(m, t));
      }
      break;
    }
    case DensityModel::gaussian_cubic: {
      const CharMap map(p, CharModel::cubic_v);
      const double var = (blur_variance(p, t) + d0 * d0) / n;
      for (double m : ms) {
        if (!(std::abs(m) < map.m_ferro())) {
          throw std::domain_error("closed_form_P: cubic model defined on (-m_F, m_F)");
        }
        out.push_back(gaussian(map.inverse(m, t), p.m_offset, var) * map.inverse_slope(m, t));
      }
      break;
    }
  }
  return out;
}

double closed_form_P(const ModelParams& p, double m, double t, DensityModel model) {
  return closed_form_profile(p, {m}, t, model).front();
}

double peak_width(const ModelParams& p, double t) {
  const CharMap map(p, CharModel::cubic_v);
  const double d0 = p.initial_width();
  const double m = map.forward(p.m_offset, t);
  return std::sqrt(blur_variance(p, t) + d0 * d0) * map.velocity(m) / map.velocity(p.m_offset);
}

double SuzukiProfile::density(double m) const {
  const double q = m_ferro * m_ferro - m * m;
  if (!(q > 0.0)) return 0.0;
  const double arg = alpha * m / std::sqrt(q) - lambda;
  return alpha * m_ferro * m_ferro / (std::sqrt(std::numbers::pi) * q * std::sqrt(q)) *
         std::exp(-arg * arg);
}

std::vector<double> SuzukiProfile::maxima() const {
  const int n = 20000;
  const double h = 2.0 * m_ferro / n;
  std::vector<double> out;
  auto neg_log = [this](double m) {
    const double d = density(m);
    return d > 0.0 ? -std::log(d) : std::numeric_limits<double>::infinity();
  };
  for (int i = 1; i < n - 1; ++i) {
    const double m0 = -m_ferro + i * h;
    const double a = density(m0 - h), b = density(m0), c = density(m0 + h);
    if (b > a && b >= c && b > 0.0) {
      const auto r = boost::math::tools::brent_find_minima(neg_log, m0 - h, m0 + h, 50);
      out.push_back(r.first);
    }
  }
  return out;
}

std::vector<double> SuzukiProfile::symmetric_maxima() const {
  const double s = 1.0 - 2.0 * alpha * alpha / 3.0;
  if (s <= 0.0) return {0.0};
  const double m = m_ferro * std::sqrt(s);
  return {-m, m};
}

SuzukiProfile suzuki_profile_at(double alpha, double lambda, double m_ferro) {
  return {alpha, lambda, m_ferro};
}

SuzukiProfile suzuki_profile(const ModelParams& p, double t) {
  const auto ds = derived_scales(p);
  const double alpha =
      std::sqrt(p.n_spins / 2.0) * std::exp(-t / ds.theta) * ds.m_ferro / ds.delta;
  return {alpha, ds.lambda, ds.m_ferro};
}

double suzuki_tail_density(double x) {
  if (!(x > 0.0)) return 0.0;
  return std::exp(-1.0 / x) / (2.0 * std::sqrt(std::numbers::pi) * x * std::sqrt(x));
}

SecondMaximum second_maximum_onset(double lambda, double m_ferro) {
  const double l = std::abs(lambda);
  const double mf = m_ferro;
  auto f = [&](double m) {
    return m * m * m + l * mf * mf * std::sqrt(std::max(0.0, mf * mf - 2.0 * m * m)) / std::sqrt(6.0);
  };
  double m2 = 0.0;
  if (l > 0.0) m2 = bracket_root(f, -mf / std::sqrt(2.0), 0.0, 1e-15);
  if (lambda < 0.0) m2 = -m2;
  const double mf4 = mf * mf * mf * mf;
  return {m2, 1.5 * (mf * mf - m2 * m2) * (mf * mf - 2.0 * m2 * m2) / mf4};
}

SplitProbabilities split_probabilities_for(double lambda) {
  const double pm = 0.5 * erfc(lambda);
  return {1.0 - pm, pm};
}

SplitProbabilities split_probabilities(const ModelParams& p) {
  return split_probabilities_for(derived_scales(p).lambda);
}

TimeScales time_scales(const ModelParams& p) {
  const auto ds = derived_scales(p);
  TimeScales ts{};
  const double b = ds.bias;
  if (b > 0.0) {
    ts.tau_reg = ds.theta * std::log(3.0 * ds.m_ferro / b);
    ts.t_width_max = ds.theta * std::log(ds.m_ferro / (std::sqrt(2.0) * b));
    ts.delta_max = 2.0 * ds.m_ferro * ds.delta / (3.0 * std::sqrt(3.0) * b);
  }
  const double base = ds.m_ferro / ds.delta;
  ts.t_flat = ds.theta * std::log(base * std::sqrt(p.n_spins / 3.0));
  ts.tau_relax = ds.theta * std::log(base * std::sqrt(10.0 * p.n_spins / 3.0));
  return ts;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::deterministic: return "deterministic";
    case Regime::active_bifurcation: return "active-bifurcation";
    case Regime::marginal: return "marginal";
  }
  return "?";
}

RegimeReport classify_regime(const ModelParams& p, double lambda_threshold,
                             double purity_limit, double coupling_limit) {
  if (!(lambda_threshold > 0.0)) throw std::invalid_argument("lambda_threshold must be > 0");
  const auto ds = derived_scales(p);
  RegimeReport r{};
  r.lambda = ds.lambda;
  const double al = std::abs(ds.lambda);
  r.regime = al >= lambda_threshold ? Regime::deterministic
             : al <= 1.0            ? Regime::active_bifurcation
                                    : Regime::marginal;
  const auto sp = split_probabilities_for(ds.lambda);
  r.p_plus = sp.p_plus;
  r.p_minus = sp.p_minus;
  r.times = time_scales(p);
  const double jt = p.coupling_j - p.temp_bath;
  const double d2 = ds.delta * ds.delta;
  const double pre = p.pre_field / jt + p.m_offset;
  const double cpl = p.coupling_g / jt;
  r.purity_ratio = pre * pre * p.n_spins / d2;
  r.coupling_ratio = cpl * cpl * p.n_spins / d2;
  r.purity_ok = r.purity_ratio < purity_limit;
  r.coupling_ok = r.coupling_ratio > coupling_limit;
  return r;
}

}  // namespace buridan
