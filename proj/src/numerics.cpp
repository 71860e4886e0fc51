#include "buridan/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace buridan {

namespace {

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (2n+1)!!  (all terms positive)
double erf_series(double x) {
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 500; ++n) {
    term *= 2.0 * x2 / (2.0 * n + 1.0);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x2) * sum;
}

// erfc(x) = exp(-x^2)/sqrt(pi) / (x + 1/2/(x + 1/(x + 3/2/(x + ...)))), modified Lentz.
double erfc_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = f;
  double d = 0.0;
  for (int j = 1; j < 5000; ++j) {
    const double a = 0.5 * j;
    d = x + a * d;
    if (d == 0.0) d = tiny;
    c = x + a / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x * x) / (std::sqrt(std::numbers::pi) * f);
}

template <int N>
GaussRule make_rule() {
  using Q = boost::math::quadrature::gauss<double, N>;
  const auto& x = Q::abscissa();
  const auto& w = Q::weights();
  GaussRule rule;
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    rule.nodes.push_back(-x[i]);
    rule.weights.push_back(w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.nodes.push_back(x[i]);
    rule.weights.push_back(w[i]);
  }
  return rule;
}

}  // namespace

double erfc(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) return 2.0 - erfc(-x);
  if (x < 2.0) return 1.0 - erf_series(x);
  if (x > 27.3) return 0.0;
  return erfc_fraction(x);
}

double coth(double x) {
  if (x == 0.0) return std::copysign(std::numeric_limits<double>::infinity(), x);
  const double ax = std::abs(x);
  if (ax < 1e-4) return 1.0 / x + x / 3.0 - x * x * x / 45.0;
  const double r = (1.0 + std::exp(-2.0 * ax)) / -std::expm1(-2.0 * ax);
  return std::copysign(r, x);
}

double h_coth(double h, double temp) {
  const double x = h / temp;
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return temp * (1.0 + x2 / 3.0 - x2 * x2 / 45.0);
  }
  return h * coth(x);
}

std::complex<double> trigamma(std::complex<double> z) {
  std::complex<double> acc = 0.0;
  while (std::real(z) < 15.0) {
    acc += 1.0 / (z * z);
    z += 1.0;
  }
  const std::complex<double> r = 1.0 / z;
  const std::complex<double> r2 = r * r;
  // Bernoulli tail: 1/z + 1/2z^2 + sum B_2k / z^(2k+1)
  const std::complex<double> tail =
      r * (1.0 + r * 0.5 +
           r2 * (1.0 / 6.0 +
                 r2 * (-1.0 / 30.0 +
                       r2 * (1.0 / 42.0 +
                             r2 * (-1.0 / 30.0 +
                                   r2 * (5.0 / 66.0 +
                                         r2 * (-691.0 / 2730.0 + r2 * (7.0 / 6.0))))))));
  return acc + tail;
}

namespace {

struct Panel {
  double value;
  double error;
  double l1;
};

// 20- and 30-point Gauss on one panel; the difference is the error estimate.
Panel gauss_pair(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss;
  const double lo = gauss<double, 20>::integrate(f, a, b);
  const double hi = gauss<double, 30>::integrate(f, a, b);
  const double l1 = gauss<double, 30>::integrate([&](double x) { return std::abs(f(x)); }, a, b);
  return {hi, std::abs(hi - lo), l1};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol, unsigned max_depth) {
  if (a == b) return 0.0;
  struct Node {
    double a, b;
    Panel p;
    unsigned depth;
    bool operator<(const Node& o) const { return p.error < o.p.error; }
  };
  // global adaptive: always split the panel with the largest error
  std::priority_queue<Node> heap;
  heap.push({a, b, gauss_pair(f, a, b), 0});
  double value = heap.top().p.value;
  double error = heap.top().p.error;
  double l1 = heap.top().p.l1;
  std::vector<Node> done;
  const std::size_t budget = 4000;
  auto target = [&] {
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
    return std::max({abs_tol, rel_tol * std::abs(value), floor});
  };
  while (!heap.empty() && error > target() && heap.size() + done.size() < budget) {
    const Node n = heap.top();
    heap.pop();
    if (n.depth >= max_depth) {
      done.push_back(n);
      continue;
    }
    const double mid = 0.5 * (n.a + n.b);
    const Node l{n.a, mid, gauss_pair(f, n.a, mid), n.depth + 1};
    const Node r{mid, n.b, gauss_pair(f, mid, n.b), n.depth + 1};
    value += l.p.value + r.p.value - n.p.value;
    error += l.p.error + r.p.error - n.p.error;
    l1 += l.p.l1 + r.p.l1 - n.p.l1;
    heap.push(l);
    heap.push(r);
  }
  // resum to shed the drift of the running totals
  value = error = l1 = 0.0;
  for (; !heap.empty(); heap.pop()) done.push_back(heap.top());
  for (const auto& n : done) {
    value += n.p.value;
    error += n.p.error;
    l1 += n.p.l1;
  }
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
  if (!std::isfinite(value) || error > std::max({abs_tol, 10.0 * rel_tol * std::abs(value), floor})) {
    throw NumericalError("quadrature did not converge on [" + fmt_g(a) + ", " + fmt_g(b) +
                         "], estimate " + fmt_g(value) + " +- " + fmt_g(error));
  }
  return value;
}

double bracket_root(const std::function<double(double)>& f, double lo, double hi,
                    double tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw NumericalError("root not bracketed");
  std::uintmax_t iters = 200;
  auto stop = [tol](double x, double y) { return std::abs(y - x) <= tol; };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
  return 0.5 * (r.first + r.second);
}

std::vector<double> scan_roots(const std::function<double(double)>& f, double a,
                               double b, int scan, double tol) {
  std::vector<double> roots;
  double x0 = a;
  double f0 = f(x0);
  if (f0 == 0.0) roots.push_back(x0);
  for (int i = 1; i <= scan; ++i) {
    const double x1 = a + (b - a) * i / scan;
    const double f1 = f(x1);
    if (f1 == 0.0) {
      roots.push_back(x1);
    } else if (f0 != 0.0 && (f0 > 0.0) != (f1 > 0.0)) {
      roots.push_back(bracket_root(f, x0, x1, tol));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

const GaussRule& gauss_legendre(int n) {
  static const GaussRule g8 = make_rule<8>();
  static const GaussRule g16 = make_rule<16>();
  static const GaussRule g20 = make_rule<20>();
  static const GaussRule g30 = make_rule<30>();
  switch (n) {
    case 8: return g8;
    case 16: return g16;
    case 20: return g20;
    case 30: return g30;
    default: throw std::invalid_argument("gauss_legendre: supported orders are 8, 16, 20, 30");
  }
}

}  // namespace buridan
