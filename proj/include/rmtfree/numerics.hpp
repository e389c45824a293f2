#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rmtfree {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Double-exponential (tanh-sinh) quadrature on a finite interval.
///
/// The integrand is never evaluated at the endpoints, and nodes close to an
/// endpoint are computed from the complement of tanh, so algebraic endpoint
/// singularities such as sqrt(x - a) or |x|^p are integrated to near machine
/// precision.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13);

/// Integral over [a, +inf) through the map x = a + v / (1 - v).
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol = 1e-13);

/// Value at x0 of the interpolating polynomial through (xs[i], ys[i]).
template <typename T>
T neville(std::span<const double> xs, std::span<const T> ys, double x0) {
  std::vector<T> p(ys.begin(), ys.end());
  const std::size_t n = p.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      p[i] = ((x0 - xs[i + m]) * p[i] + (xs[i] - x0) * p[i + 1]) /
             (xs[i] - xs[i + m]);
    }
  }
  return p.front();
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t dof = 0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Two-sided 95% Student t critical value for the given degrees of freedom.
double student_t_975(std::size_t dof);

}  // namespace rmtfree
