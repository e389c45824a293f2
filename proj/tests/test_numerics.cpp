#include <doctest.h>

#include <cmath>
#include <vector>

#include "rmtfree/numerics.hpp"

using namespace rmtfree;

TEST_CASE("tanh-sinh handles endpoint singularities") {
  // int_0^1 x^{-1/2} dx = 2
  CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-10));
  // int_{-2}^{2} sqrt(4 - x^2) dx = 2 pi
  CHECK(integrate([](double x) { return std::sqrt(4.0 - x * x); }, -2.0, 2.0) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::exp(x); }, 0.0, 1.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
}

TEST_CASE("integral to infinity") {
  CHECK(integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // Gamma(3.5) = 15 sqrt(pi) / 8
  CHECK(integrate_to_infinity([](double x) { return std::pow(x, 2.5) * std::exp(-x); }, 0.0) ==
        doctest::Approx(15.0 * std::sqrt(kPi) / 8.0).epsilon(1e-11));
}

TEST_CASE("neville reproduces polynomials") {
  const std::vector<double> xs = {0.0, 1.0, 2.0, 3.0};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(1.0 + 2.0 * x - x * x * x);
  CHECK(neville<double>(xs, ys, 1.5) == doctest::Approx(1.0 + 3.0 - 3.375));
  CHECK(neville<double>(xs, ys, -1.0) == doctest::Approx(0.0));
}

TEST_CASE("least squares line with exact data") {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {3, 5, 7, 9};
  const LinearFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_stderr == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.dof == 2);
}

TEST_CASE("student t critical values") {
  CHECK(student_t_975(1) == doctest::Approx(12.706).epsilon(1e-3));
  CHECK(student_t_975(2) == doctest::Approx(4.303).epsilon(1e-3));
  CHECK(student_t_975(1000) == doctest::Approx(1.96).epsilon(1e-2));
}
