#include "rmtfree/freeconv.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rmtfree/parallel.hpp"
#include "rmtfree/rng.hpp"

namespace rmtfree {

namespace {

constexpr double kSingularImag = 1e-14;
constexpr double kContinuationDamping = 0.5;
constexpr double kContinuationRatio = 0.8;
constexpr int kNewtonIterations = 60;
constexpr int kMaxBisections = 30;

std::string describe(Complex z) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i)";
  return os.str();
}

struct Iteration {
  PointSolution solution;
  double ratio = 0.0;
};

// Fixed-point iteration that stops once |phi(h) - h| <= tol; the stopping
// residual is the one reported.
template <typename Map>
Iteration iterate(Map&& phi, Complex h0, double tol, int max_iterations,
                  double damping) {
  Iteration out;
  Complex h = h0;
  double previous = -1.0;
  for (int k = 0; k <= max_iterations; ++k) {
    const Complex image = phi(h);
    const double residual = std::abs(image - h);
    out.solution.value = h;
    out.solution.residual = residual;
    out.solution.iterations = k;
    if (!std::isfinite(residual)) break;
    if (residual <= tol) {
      out.solution.converged = true;
      break;
    }
    if (previous > 1e-10) out.ratio = residual / previous;
    previous = residual;
    h += damping * (image - h);
  }
  return out;
}

template <typename Map, typename Derivative>
PointSolution newton(Map&& phi, Derivative&& dphi, Complex h0, double tol) {
  PointSolution sol;
  Complex h = h0;
  for (int k = 0; k < kNewtonIterations; ++k) {
    const Complex f = h - phi(h);
    sol.value = h;
    sol.residual = std::abs(f);
    sol.iterations = k;
    if (!std::isfinite(sol.residual)) return sol;
    if (sol.residual <= tol * std::max(1.0, std::abs(h))) {
      sol.converged = true;
      return sol;
    }
    const Complex df = 1.0 - dphi(h);
    if (std::abs(df) == 0.0) return sol;
    h -= f / df;
  }
  return sol;
}

bool herglotz(Complex z, Complex g) { return g.imag() * z.imag() < 0.0; }

ConvolutionResult assemble(const SolverConfig& config,
                           const std::function<Iteration(Complex)>& solve) {
  const auto& points = config.domain.points();
  const std::size_t n = points.size();
  ConvolutionResult result;
  result.points = points;
  result.values.assign(n, Complex{});
  result.iterations.assign(n, 0);
  result.residuals.assign(n, 0.0);
  std::vector<double> ratios(n, 0.0);
  std::vector<char> ok(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const Iteration it = solve(points[i]);
    result.values[i] = it.solution.value;
    result.iterations[i] = it.solution.iterations;
    result.residuals[i] = it.solution.residual;
    ok[i] = it.solution.converged ? 1 : 0;
    ratios[i] = it.ratio;
  });
  result.converged.assign(ok.begin(), ok.end());
  result.contraction_estimate = *std::max_element(ratios.begin(), ratios.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (!result.converged[i]) {
      std::ostringstream os;
      os.precision(6);
      os << "no convergence at z=" << describe(points[i]) << " after "
         << result.iterations[i] << " iterations, residual "
         << result.residuals[i];
      result.warnings.push_back(os.str());
    }
  }
  if (result.contraction_estimate >= 1.0)
    result.warnings.push_back(
        "empirical contraction estimate >= 1; use a larger s or a smaller t");
  return result;
}

template <typename Map, typename Derivative>
PointSolution continue_down(Map&& phi_at, Derivative&& dphi_at, Complex z,
                            const SolverConfig& config,
                            std::function<PointSolution(Complex)> solve_top) {
  const EvaluationDomain& domain = config.domain;
  const double x = z.real();
  const double y_target = z.imag();
  const double y_top =
      std::max(1.01 * domain.s(), 1.01 * std::abs(x) / domain.t());
  PointSolution current = solve_top(Complex(x, y_top));
  if (!current.converged)
    throw NumericalError("continuation: no convergence at the starting point " +
                         describe(Complex(x, y_top)));
  double y = y_top;
  int total_iterations = current.iterations;
  while (y > y_target) {
    double y_next = std::max(y * kContinuationRatio, y_target);
    bool advanced = false;
    for (int attempt = 0; attempt < kMaxBisections && !advanced; ++attempt) {
      const Complex zn(x, y_next);
      auto phi = [&](Complex h) { return phi_at(zn, h); };
      auto dphi = [&](Complex h) { return dphi_at(zn, h); };
      PointSolution step = newton(phi, dphi, current.value, config.tolerance);
      if (!step.converged || !herglotz(zn, step.value)) {
        const Iteration damped =
            iterate(phi, current.value, config.tolerance,
                    20 * config.max_iterations, kContinuationDamping);
        step = damped.solution;
        if (step.converged && herglotz(zn, step.value)) {
          // Polish to the same standard as the Newton path.
          const PointSolution polished =
              newton(phi, dphi, step.value, config.tolerance);
          if (polished.converged && herglotz(zn, polished.value)) step = polished;
        }
      }
      if (step.converged && herglotz(zn, step.value)) {
        total_iterations += step.iterations;
        current = step;
        y = y_next;
        advanced = true;
      } else {
        y_next = std::sqrt(y * y_next);
      }
    }
    if (!advanced)
      throw NumericalError("continuation stalled above z=" + describe(z) +
                           " at Im z=" + std::to_string(y));
  }
  current.iterations = total_iterations;
  return current;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tolerance > 0.0) || !(tolerance < 1e-6))
    throw std::invalid_argument("solver tolerance must lie in (0, 1e-6)");
  if (max_iterations < 50)
    throw std::invalid_argument("solver max_iterations must be >= 50");
  if (!(damping > 0.0) || damping > 1.0)
    throw std::invalid_argument("solver damping must lie in (0, 1]");
}

bool ConvolutionResult::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool b) { return b; });
}

double ConvolutionResult::max_residual() const {
  return residuals.empty() ? 0.0
                           : *std::max_element(residuals.begin(), residuals.end());
}

Complex subordination_map(const Measure& mu, Complex z, Complex h, double gamma) {
  const Complex w = 1.0 - gamma * h;
  const Complex eta = z * w * w - (1.0 - gamma) * w;
  if (std::abs(eta.imag()) < kSingularImag) {
    std::ostringstream os;
    os.precision(17);
    os << "subordination map: singular evaluation, Im eta = " << eta.imag()
       << " at z=" << describe(z) << ", h=" << describe(h) << ", gamma=" << gamma;
    throw NumericalError(os.str());
  }
  return w * stieltjes(mu, eta);
}

Complex subordination_map_derivative(const Measure& mu, Complex z, Complex h,
                                     double gamma) {
  const Complex w = 1.0 - gamma * h;
  const Complex eta = z * w * w - (1.0 - gamma) * w;
  if (std::abs(eta.imag()) < kSingularImag)
    throw NumericalError("subordination map derivative: singular evaluation");
  const Complex deta = -2.0 * gamma * z * w + gamma * (1.0 - gamma);
  return -gamma * stieltjes(mu, eta) + w * stieltjes_derivative(mu, eta) * deta;
}

PointSolution solve_rectangular_point(const Measure& mu, double c, Complex z,
                                      Complex h0, const SolverConfig& config) {
  auto phi = [&](Complex h) { return subordination_map(mu, z, h, c); };
  return iterate(phi, h0, config.tolerance, config.max_iterations, config.damping)
      .solution;
}

PointSolution solve_additive_sc_point(const Measure& mu, Complex z, Complex h0,
                                      const SolverConfig& config) {
  auto phi = [&](Complex h) { return stieltjes(mu, z - h); };
  return iterate(phi, h0, config.tolerance, config.max_iterations, config.damping)
      .solution;
}

ConvolutionResult solve_rectangular(const Measure& mu, double c,
                                    const SolverConfig& config) {
  config.validate();
  if (!(c > 0.0)) throw std::invalid_argument("solve_rectangular: c must be positive");
  if (mu.support_hull().first < -kZeroAtomTolerance)
    throw std::invalid_argument("solve_rectangular: mu must live on [0, inf)");
  return assemble(config, [&](Complex z) {
    auto phi = [&](Complex h) { return subordination_map(mu, z, h, c); };
    return iterate(phi, 1.0 / z, config.tolerance, config.max_iterations,
                   config.damping);
  });
}

ConvolutionResult solve_additive_sc(const Measure& mu, const SolverConfig& config) {
  config.validate();
  return assemble(config, [&](Complex z) {
    auto phi = [&](Complex h) { return stieltjes(mu, z - h); };
    return iterate(phi, 1.0 / z, config.tolerance, config.max_iterations,
                   config.damping);
  });
}

PointSolution rectangular_transform_at(const Measure& mu, double c, Complex z,
                                       const SolverConfig& config) {
  if (z.imag() == 0.0) throw std::invalid_argument("transform requires non-real z");
  if (z.imag() < 0.0) {
    PointSolution up = rectangular_transform_at(mu, c, std::conj(z), config);
    up.value = std::conj(up.value);
    return up;
  }
  if (config.domain.contains(z)) return solve_rectangular_point(mu, c, z, 1.0 / z, config);
  auto phi_at = [&](Complex zz, Complex h) { return subordination_map(mu, zz, h, c); };
  auto dphi_at = [&](Complex zz, Complex h) {
    return subordination_map_derivative(mu, zz, h, c);
  };
  return continue_down(phi_at, dphi_at, z, config, [&](Complex top) {
    return solve_rectangular_point(mu, c, top, 1.0 / top, config);
  });
}

PointSolution additive_sc_transform_at(const Measure& mu, Complex z,
                                       const SolverConfig& config) {
  if (z.imag() == 0.0) throw std::invalid_argument("transform requires non-real z");
  if (z.imag() < 0.0) {
    PointSolution up = additive_sc_transform_at(mu, std::conj(z), config);
    up.value = std::conj(up.value);
    return up;
  }
  if (config.domain.contains(z)) return solve_additive_sc_point(mu, z, 1.0 / z, config);
  auto phi_at = [&](Complex zz, Complex h) { return stieltjes(mu, zz - h); };
  auto dphi_at = [&](Complex zz, Complex h) {
    return -stieltjes_derivative(mu, zz - h);
  };
  return continue_down(phi_at, dphi_at, z, config, [&](Complex top) {
    return solve_additive_sc_point(mu, top, 1.0 / top, config);
  });
}

Complex deterministic_equivalent(const Measure& mu_signal, double c_n,
                                 Complex g_bar, Complex z) {
  if (!(z.imag() > 0.0))
    throw std::invalid_argument("deterministic_equivalent: Im z must be positive");
  if (!(c_n > 0.0))
    throw std::invalid_argument("deterministic_equivalent: c_n must be positive");
  return subordination_map(mu_signal, z, g_bar, c_n);
}

double contraction_probe(const Measure& mu, double c,
                         const EvaluationDomain& domain, std::size_t samples,
                         std::uint64_t seed) {
  if (samples < 100) throw std::invalid_argument("contraction_probe: samples >= 100");
  Engine rng = make_engine(seed, "contraction_probe", 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = 1.0 / domain.s();
  auto in_ball = [&] {
    const double r = radius * std::sqrt(unit(rng));
    const double a = 2.0 * kPi * unit(rng);
    return std::polar(r, a);
  };
  double best = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double y = domain.s() * std::pow(domain.im_max() / domain.s(), unit(rng));
    const double ratio = domain.t() * (2.0 * unit(rng) - 1.0);
    const Complex z(ratio * y, y);
    if (!domain.contains(z)) continue;
    const Complex h1 = in_ball();
    Complex h2;
    if (i % 2 == 0) {
      h2 = in_ball();
    } else {
      // Nearby pair: probes the local derivative.
      h2 = h1 + std::polar(1e-6 * radius, 2.0 * kPi * unit(rng));
      if (std::abs(h2) > radius) continue;
    }
    if (h1 == h2) continue;
    const double lip = std::abs(subordination_map(mu, z, h1, c) -
                                subordination_map(mu, z, h2, c)) /
                       std::abs(h1 - h2);
    best = std::max(best, lip);
  }
  return best;
}

}  // namespace rmtfree
