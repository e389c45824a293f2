#include "rmtfree/numerics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rmtfree {

namespace {

// One tanh-sinh sum at step h on [a, b]; odd_only skips nodes already summed
// at step 2h.
double tanh_sinh_sum(const std::function<double(double)>& f, double a,
                     double b, double h, bool odd_only) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  if (!odd_only) sum += f(mid) * kPi / 2.0;
  for (int k = 1;; ++k) {
    if (odd_only && k % 2 == 0) continue;
    const double t = k * h;
    const double u = kPi / 2.0 * std::sinh(t);
    const double cu = std::cosh(u);
    const double w = kPi / 2.0 * std::cosh(t) / (cu * cu);
    // 1 - tanh(u), accurate for large u.
    const double comp = 1.0 / (std::exp(u) * cu);
    const double dx = half * comp;
    if (!(w > 1e-300) || !(dx > 0.0)) break;
    const double left = a + dx;
    const double right = b - dx;
    // Each side stops contributing once its node rounds onto the endpoint.
    const bool use_left = left > a;
    const bool use_right = right < b;
    if (!use_left && !use_right) break;
    if (use_left) sum += w * f(left);
    if (use_right) sum += w * f(right);
    if (t > 6.5) break;
  }
  return sum;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, rel_tol);
  const double half = 0.5 * (b - a);
  double h = 1.0;
  double sum = tanh_sinh_sum(f, a, b, h, false);
  double estimate = half * h * sum;
  for (int level = 1; level <= 12; ++level) {
    h *= 0.5;
    sum += tanh_sinh_sum(f, a, b, h, true);
    const double next = half * h * sum;
    const double delta = std::abs(next - estimate);
    estimate = next;
    if (level >= 3 && delta <= rel_tol * std::max(std::abs(estimate), 1e-300))
      break;
  }
  return estimate;
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol) {
  auto g = [&](double v) {
    const double one_minus = 1.0 - v;
    const double x = a + v / one_minus;
    if (!std::isfinite(x)) return 0.0;
    return f(x) / (one_minus * one_minus);
  };
  return integrate(g, 0.0, 1.0, rel_tol);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need at least two paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.dof = x.size() - 2;
  if (fit.dof > 0) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / static_cast<double>(fit.dof) / sxx);
  }
  return fit;
}

double student_t_975(std::size_t dof) {
  static constexpr double table[] = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (dof == 0) return std::numeric_limits<double>::infinity();
  if (dof <= 30) return table[dof - 1];
  return 1.96;
}

}  // namespace rmtfree
