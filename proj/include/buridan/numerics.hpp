#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace buridan {

/// Thrown when an algorithm cannot reach its accuracy target
/// (step underflow, quadrature budget, mass drift...).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Complementary error function, accurate to ~1e-15 relative on [0, 27].
double erfc(double x);

/// coth(x), with the pole at 0 returned as +-inf.
double coth(double x);

/// h * coth(h / T), continuous through h = 0 where it equals T.
double h_coth(double h, double temp);

/// Trigamma function psi'(z) for complex z off the non-positive real axis.
std::complex<double> trigamma(std::complex<double> z);

/// Adaptive bisection on [a, b], each panel scored by 20- vs 30-point Gauss.
/// Throws NumericalError if the error stays above max(abs_tol, 10 rel_tol |I|).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, double abs_tol = 0.0,
                 unsigned max_depth = 30);

/// All sign changes of f on [a, b] found on a uniform scan of `scan` cells,
/// each refined by bisection to |bracket| < tol. Exact zeros on grid nodes
/// are reported once.
std::vector<double> scan_roots(const std::function<double(double)>& f, double a,
                               double b, int scan = 20000, double tol = 1e-14);

/// Root of f in [lo, hi] where f(lo), f(hi) have opposite signs.
double bracket_root(const std::function<double(double)>& f, double lo, double hi,
                    double tol = 1e-15);

/// Gauss-Legendre rule on [-1, 1]; n is one of 8, 16, 20, 30.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

}  // namespace buridan
