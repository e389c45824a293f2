#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rmtfree/domain.hpp"
#include "rmtfree/measure.hpp"

namespace rmtfree {

struct SolverConfig {
  double tolerance = 1e-12;
  int max_iterations = 500;
  /// Relaxation weight: h <- (1 - damping) h + damping phi(h).
  double damping = 1.0;
  EvaluationDomain domain = EvaluationDomain::standard();

  void validate() const;
};

struct PointSolution {
  Complex value;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

struct ConvolutionResult {
  std::vector<Complex> points;
  std::vector<Complex> values;
  std::vector<int> iterations;
  std::vector<double> residuals;
  std::vector<bool> converged;
  /// Largest late-iteration ratio |h_{k+1} - h_k| / |h_k - h_{k-1}|.
  double contraction_estimate = 0.0;
  std::vector<std::string> warnings;

  bool all_converged() const;
  double max_residual() const;
};

/// phi_{z,mu}(h, gamma) = (1 - gamma h) G_mu(eta) with
/// eta = z (1 - gamma h)^2 - (1 - gamma)(1 - gamma h).
Complex subordination_map(const Measure& mu, Complex z, Complex h, double gamma);

/// d phi_{z,mu}(h, gamma) / dh.
Complex subordination_map_derivative(const Measure& mu, Complex z, Complex h,
                                     double gamma);

/// Stieltjes transform of (sqrt(mu) [+]_c sqrt(MP_c))^2 on the config grid by
/// plain (or damped) fixed-point iteration started at h0 = 1/z.
ConvolutionResult solve_rectangular(const Measure& mu, double c,
                                    const SolverConfig& config = {});

/// Stieltjes transform of mu [+] semicircle on the config grid through
/// h <- G_mu(z - h) started at h0 = 1/z.
ConvolutionResult solve_additive_sc(const Measure& mu,
                                    const SolverConfig& config = {});

/// Single-point rectangular solve from a caller-chosen start.
PointSolution solve_rectangular_point(const Measure& mu, double c, Complex z,
                                      Complex h0, const SolverConfig& config);
PointSolution solve_additive_sc_point(const Measure& mu, Complex z, Complex h0,
                                      const SolverConfig& config);

/// G_nu(z) for any z in the upper half-plane. Points inside the domain are
/// solved directly; points below it are reached by continuation along a
/// vertical path from the domain, with damped iteration and Newton polishing
/// at each step. Throws NumericalError if the Herglotz sign is lost or the
/// iteration stalls.
PointSolution rectangular_transform_at(const Measure& mu, double c, Complex z,
                                       const SolverConfig& config = {});
PointSolution additive_sc_transform_at(const Measure& mu, Complex z,
                                       const SolverConfig& config = {});

/// Deterministic equivalent (1/n) Tr R = phi_{z,mu}(g_bar, c_n).
Complex deterministic_equivalent(const Measure& mu_signal, double c_n,
                                 Complex g_bar, Complex z);

/// Empirical lower bound for the Lipschitz constant of h -> phi_{z,mu}(h, c)
/// over the ball |h| <= 1/s, maximised over sampled z in the domain.
double contraction_probe(const Measure& mu, double c,
                         const EvaluationDomain& domain, std::size_t samples,
                         std::uint64_t seed = 0x5eed);

}  // namespace rmtfree
