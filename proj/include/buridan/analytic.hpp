#pragma once

#include "buridan/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace buridan {

/// Deterministic flow dm/dt = v(m) with three choices of v.
enum class CharModel {
  exact_quadrature,  ///< finite-N drift, t = int dm/v by quadrature
  linearized,        ///< v = (m - m_P)/theta
  cubic_v            ///< v = (m - m_P)(m_F^2 - m^2)/(theta m_F^2)
};

class CharMap {
 public:
  CharMap(const ModelParams& p, CharModel model);

  /// m reached at time t from mu.
  double forward(double mu, double t) const;
  /// mu from which m is reached at time t.
  double inverse(double m, double t) const;
  /// Time to travel from mu to m; throws std::domain_error if not reachable.
  double travel_time(double mu, double m) const;
  /// d mu / d m of inverse(., t) at fixed t.
  double inverse_slope(double m, double t) const;
  /// The drift used by this model.
  double velocity(double m) const;

  CharModel model() const { return model_; }
  double m_ferro() const { return m_ferro_; }
  double m_repel() const { return m_repel_; }
  double theta() const { return theta_; }

 private:
  // interval between consecutive fixed points of the model holding x
  std::pair<double, double> cell_of(double x) const;
  double quad_time(double a, double b) const;

  ModelParams p_;
  CharModel model_;
  double theta_ = 0.0;
  double m_ferro_ = 0.0;
  double m_repel_ = 0.0;
  std::vector<double> zeros_;   // fixed points of the exact drift, ascending
  std::vector<double> slopes_;  // v' at each zero
  std::vector<double> curv_;    // v''/2 at each zero
};

enum class DensityModel {
  drift_only,       ///< initial Gaussian transported by the exact flow
  gaussian_linear,  ///< blurred Gaussian under the linearized flow
  gaussian_cubic    ///< blurred Gaussian under the cubic flow
};

/// Closed-form density P(m, t); the initial state is the Gaussian of mean m0, width delta0.
double closed_form_P(const ModelParams& p, double m, double t, DensityModel model);

/// closed_form_P on a grid, sharing one characteristic map.
std::vector<double> closed_form_profile(const ModelParams& p, const std::vector<double>& m, double t,
                                        DensityModel model);

/// Diffusive blurring of the initial point: C = (1 - e^{-2t/theta}) T/(J-T).
double blur_variance(const ModelParams& p, double t);

/// Peak width delta(t) in units of 1/sqrt(N) under the cubic flow:
/// sqrt(C + delta0^2) v(m)/v(m0) with m = m(m0, t).
double peak_width(const ModelParams& p, double t);

/// Scaling-regime profile for times with e^{t/theta} ~ sqrt(N).
struct SuzukiProfile {
  double alpha;   ///< sqrt(N/2) e^{-t/theta} m_F / delta
  double lambda;
  double m_ferro;

  double density(double m) const;
  /// Local maxima of density(), found numerically.
  std::vector<double> maxima() const;
  /// +-m_F sqrt(1 - 2 alpha^2/3) for alpha^2 < 3/2, else {0}; exact for lambda = 0.
  std::vector<double> symmetric_maxima() const;
};
SuzukiProfile suzuki_profile(const ModelParams& p, double t);
SuzukiProfile suzuki_profile_at(double alpha, double lambda, double m_ferro);

/// Small-alpha shape of a peak near m_F, as a density in x = (2/alpha^2)(m_F - m)/m_F.
double suzuki_tail_density(double x);

/// Birth point of the second maximum on the disfavoured side (lambda > 0).
struct SecondMaximum {
  double m2;
  double alpha_squared;
};
SecondMaximum second_maximum_onset(double lambda, double m_ferro);

struct SplitProbabilities {
  double p_plus;
  double p_minus;
};
/// p_minus = erfc(lambda)/2, p_plus = 1 - p_minus.
SplitProbabilities split_probabilities(const ModelParams& p);
SplitProbabilities split_probabilities_for(double lambda);

struct TimeScales {
  std::optional<double> tau_reg;      ///< theta ln(3 m_F / b)
  std::optional<double> t_width_max;  ///< theta ln(m_F / (sqrt2 b))
  std::optional<double> delta_max;    ///< 2 m_F delta / (3 sqrt3 b)
  double t_flat;                      ///< theta ln((m_F/delta) sqrt(N/3))
  double tau_relax;                   ///< theta ln((m_F/delta) sqrt(10N/3))
};
TimeScales time_scales(const ModelParams& p);

enum class Regime { deterministic, active_bifurcation, marginal };
std::string to_string(Regime r);

struct RegimeReport {
  double lambda;
  Regime regime;
  double p_plus;
  double p_minus;
  TimeScales times;
  double purity_ratio;    ///< (g0/(J-T) + m0)^2 N / delta^2, wants < 1
  double coupling_ratio;  ///< (g/(J-T))^2 N / delta^2, wants > 1
  bool purity_ok;
  bool coupling_ok;
};
RegimeReport classify_regime(const ModelParams& p, double lambda_threshold = 3.0,
                             double purity_limit = 1.0, double coupling_limit = 1.0);

}  // namespace buridan
