#include "buridan/analytic.hpp"
#include "buridan/master.hpp"
#include "buridan/model.hpp"
#include "buridan/numerics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

using namespace buridan;

namespace {

ModelParams fig1(int n = 1000) {
  ModelParams p;
  p.n_spins = n;
  p.temp_bath = 0.65;
  p.coupling_g = 0.05;
  p.debye_cutoff = std::numeric_limits<double>::infinity();
  return p;
}

double theta(const ModelParams& p) { return derived_scales(p).theta; }

double l1(const DiscreteDistribution& a, const DiscreteDistribution& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.weights.size(); ++k) s += std::abs(a.weights[k] - b.weights[k]);
  return s;
}

std::vector<int> local_maxima(const DiscreteDistribution& d, double rel = 0.01) {
  const double top = *std::max_element(d.weights.begin(), d.weights.end());
  std::vector<int> out;
  const int n = d.n_spins;
  for (int k = 0; k <= n; ++k) {
    const double l = k > 0 ? d.weights[k - 1] : -1.0;
    const double r = k < n ? d.weights[k + 1] : -1.0;
    if (d.weights[k] > l && d.weights[k] >= r && d.weights[k] >= rel * top) out.push_back(k);
  }
  return out;
}

}  // namespace

TEST_CASE("initial distributions") {
  auto p = fig1(2);
  const auto b = initial_distribution(p, InitKind::exact_paramagnet);
  REQUIRE(b.weights.size() == 3);
  CHECK(b.weights[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(b.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b.weights[2] == doctest::Approx(0.25).epsilon(1e-15));

  const auto d = initial_distribution(fig1(), InitKind::exact_paramagnet);
  double mean = 0.0, var = 0.0;
  for (int k = 0; k <= 1000; ++k) mean += d.weights[k] * d.m_at(k);
  for (int k = 0; k <= 1000; ++k) var += d.weights[k] * (d.m_at(k) - mean) * (d.m_at(k) - mean);
  CHECK(std::abs(mean) < 1e-15);
  CHECK(var == doctest::Approx(1.0 / 1000).epsilon(1e-12));
  CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-15));

  auto q = fig1();
  q.m_offset = 0.1;
  q.delta0 = 0.5;
  const auto g = initial_distribution(q, InitKind::gaussian);
  double gm = 0.0;
  for (int k = 0; k <= 1000; ++k) gm += g.weights[k] * g.m_at(k);
  CHECK(std::abs(gm - 0.1) < 1e-3);
  CHECK(g.total() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("log binomials") {
  const auto lb = log_binomials(1000);
  CHECK(lb[0] == 0.0);
  CHECK(lb[1000] == 0.0);
  CHECK(lb[1] == doctest::Approx(std::log(1000.0)).epsilon(1e-15));
  CHECK(lb[3] == doctest::Approx(std::log(1000.0 * 999 * 998 / 6)).epsilon(1e-14));
  for (int k = 0; k <= 1000; k += 37) {
    CHECK(lb[k] == lb[1000 - k]);
    CHECK(std::abs(lb[k] - (std::lgamma(1001.0) - std::lgamma(k + 1.0) - std::lgamma(1001.0 - k))) <
          1e-9);
  }
}

TEST_CASE("transition rates") {
  const auto p = fig1();
  const auto r = transition_rates(p);
  CHECK(r.up[1000] == 0.0);
  CHECK(r.down[0] == 0.0);
  // generator columns sum to zero
  std::vector<double> e(1001, 0.0), de(1001);
  for (int k : {0, 1, 250, 500, 999, 1000}) {
    std::fill(e.begin(), e.end(), 0.0);
    e[k] = 1.0;
    r.apply(e, de);
    double s = 0.0, scale = 0.0;
    for (double x : de) {
      s += x;
      scale += std::abs(x);
    }
    CHECK(std::abs(s) <= 1e-12 * scale);
  }
  const auto row = r.row(500);
  CHECK(row.loss_up == r.up[500]);
  CHECK(row.gain_from_below == r.up[499]);
  CHECK(row.gain_from_above == r.down[501]);
}

TEST_CASE("detailed balance against the stationary law at every interior point") {
  for (double g : {0.05, 0.0, 0.2}) {
    auto p = fig1();
    p.coupling_g = g;
    p.debye_cutoff = 100.0;
    const auto r = transition_rates(p);
    const auto eq = stationary_distribution(p);
    double worst = 0.0;
    for (int k = 1; k <= 1000; ++k) {
      const double a = r.up[k - 1] * eq.weights[k - 1];
      const double b = r.down[k] * eq.weights[k];
      if (a == 0.0 && b == 0.0) continue;
      worst = std::max(worst, std::abs(a - b) / std::max(a, b));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("stationary distribution") {
  auto p = fig1(2);
  p.coupling_g = 0.0;
  const auto s = stationary_distribution(p);
  const double e = std::exp(1.0 / 0.65);
  const double z = 2 * e + 2;
  CHECK(s.weights[0] == doctest::Approx(e / z).epsilon(1e-14));
  CHECK(s.weights[1] == doctest::Approx(2 / z).epsilon(1e-14));
  CHECK(s.weights[2] == doctest::Approx(e / z).epsilon(1e-14));

  auto q = fig1();
  q.coupling_g = 0.0;
  const auto b = stationary_distribution(q);
  for (int k = 0; k <= 1000; ++k) CHECK(b.weights[k] == doctest::Approx(b.weights[1000 - k]).epsilon(1e-13));
  const auto mx = local_maxima(b);
  REQUIRE(mx.size() == 2);
  CHECK(std::abs(b.m_at(mx[1]) - 0.87206) <= 2.0 / 1000);
  CHECK(std::abs(b.m_at(mx[0]) + 0.87206) <= 2.0 / 1000);
}

TEST_CASE("free energy") {
  const auto p = fig1();
  const auto d = initial_distribution(p, InitKind::exact_paramagnet);
  CHECK(free_energy(d, p).entropy == doctest::Approx(1000 * std::log(2.0)).epsilon(1e-12));
  const auto eq = stationary_distribution(p);
  CHECK(free_energy(eq, p).value > free_energy(d, p).value);
}

TEST_CASE("evolve over zero time is the identity") {
  const auto p = fig1();
  const auto d = initial_distribution(p, InitKind::exact_paramagnet);
  const auto r = evolve(d, p, 0.0);
  CHECK(r.final.weights == d.weights);
}

TEST_CASE("biased run conserves mass, obeys the H-theorem, ends near m_F") {
  const auto p = fig1();
  const double th = theta(p);
  EvolveOptions o;
  o.monitor_free_energy = true;
  o.snapshot_times = {0.5 * th, 2.25 * th, 5 * th};
  double last_f = -std::numeric_limits<double>::infinity();
  bool monotone = true;
  o.on_step = [&](const DiscreteDistribution& d) {
    const double f = free_energy(d, p).value;
    if (f < last_f - 1e-12 * std::abs(last_f)) monotone = false;
    last_f = f;
  };
  const auto r = evolve(initial_distribution(p, InitKind::exact_paramagnet), p, 5 * th, o);
  CHECK(monotone);
  CHECK(r.min_free_energy_increment >= -1e-12);
  CHECK(r.max_mass_drift < 1e-10);
  REQUIRE(r.snapshots.size() == 3);
  for (const auto& s : r.snapshots) {
    CHECK(std::all_of(s.weights.begin(), s.weights.end(), [](double w) { return w >= 0.0; }));
    CHECK(std::abs(s.total() - 1.0) < 1e-10);
  }
  const auto mx = local_maxima(r.final);
  REQUIRE(mx.size() == 1);
  CHECK(std::abs(r.final.m_at(mx[0]) - 0.89707) < 0.01);
  // the stationary law has the largest free energy along the run
  CHECK(free_energy(stationary_distribution(p), p).value >= last_f);
}

TEST_CASE("stationary distribution is a fixed point of the evolution") {
  for (double g : {0.05, 0.0}) {
    auto p = fig1(400);
    p.coupling_g = g;
    const auto eq = stationary_distribution(p);
    const auto r = evolve(eq, p, 10 * theta(p));
    CHECK(l1(r.final, eq) < 1e-8);
  }
}

TEST_CASE("unbiased evolution stays mirror symmetric") {
  auto p = fig1(400);
  p.coupling_g = 0.0;
  const double th = theta(p);
  EvolveOptions o;
  o.snapshot_times = {0.5 * th, 2 * th, 4 * th, 8 * th};
  const auto r = evolve(initial_distribution(p, InitKind::exact_paramagnet), p, 8 * th, o);
  double worst = 0.0;
  for (const auto& s : r.snapshots) {
    for (int k = 0; k <= 400; ++k) worst = std::max(worst, std::abs(s.weights[k] - s.weights[400 - k]));
  }
  CHECK(worst < 1e-10);
  double below = 0.0;
  for (int k = 0; k < 200; ++k) below += r.final.weights[k];
  CHECK(std::abs(below - 0.5 * (1.0 - r.final.weights[200])) < 1e-10);
}

TEST_CASE("full-memory evolution") {
  auto p = fig1(200);
  p.debye_cutoff = 100.0;
  SUBCASE("rates relax to the short-memory rates") {
    const auto s = transition_rates(p);
    const auto f = transition_rates(p, MemoryMode::full_memory, 50.0 / 0.65);
    for (int k = 20; k < 200; k += 30) {
      CHECK(std::abs(f.up[k] / s.up[k] - 1.0) < 0.02);
      CHECK(std::abs(f.down[k] / s.down[k] - 1.0) < 0.02);
    }
  }
  SUBCASE("runs conserve mass and approach the short-memory result") {
    EvolveOptions o;
    o.mode = MemoryMode::full_memory;
    const double t = 0.5 * theta(p);
    const auto start = initial_distribution(p, InitKind::exact_paramagnet);
    const auto full = evolve(start, p, t, o);
    const auto brief = evolve(start, p, t);
    CHECK(full.max_mass_drift < 1e-10);
    CHECK(l1(full.final, brief.final) < 0.02);
  }
  SUBCASE("needs a finite cutoff") {
    p.debye_cutoff = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(transition_rates(p, MemoryMode::full_memory, 1.0), NumericalError);
  }
}

TEST_CASE("trajectory sampling") {
  SUBCASE("a frozen chain never moves") {
    RateTable zero{std::vector<double>(11, 0.0), std::vector<double>(11, 0.0)};
    DiscreteDistribution start{10, 0.0, std::vector<double>(11, 0.0)};
    start.weights[7] = 1.0;
    const auto r = sample_trajectories(zero, start, 1, 5.0, 42);
    REQUIRE(r.final_k.size() == 1);
    CHECK(r.final_k[0] == 7);
  }
  SUBCASE("results depend on the seed only, not on the worker count") {
    const auto p = fig1(100);
    const double t = 2 * theta(p);
    const auto a = sample_trajectories(p, 3000, t, 7, 1);
    const auto b = sample_trajectories(p, 3000, t, 7, 4);
    const auto c = sample_trajectories(p, 3000, t, 8, 1);
    CHECK(a.final_k == b.final_k);
    CHECK(a.histogram == b.histogram);
    CHECK(a.final_k != c.final_k);
  }
  SUBCASE("unbiased runs split evenly") {
    auto p = fig1(100);
    p.coupling_g = 0.0;
    const std::size_t n = 4000;
    const auto r = sample_trajectories(p, n, 4 * theta(p), 11);
    const double decided = r.fraction_above + r.fraction_below;
    const double up = r.fraction_above / decided;
    CHECK(std::abs(up - 0.5) < 3.0 * std::sqrt(0.25 / (decided * n)));
  }
}
