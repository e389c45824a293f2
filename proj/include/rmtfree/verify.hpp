#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmtfree/domain.hpp"
#include "rmtfree/ensemble.hpp"
#include "rmtfree/freeconv.hpp"
#include "rmtfree/numerics.hpp"

namespace rmtfree {

enum class ScalingMode { Gaussian, GeneralTail };
enum class DeformationFamily { Zero, RankOneBounded, RankOneFrobenius };

std::string to_string(ScalingMode mode);
std::string to_string(DeformationFamily family);
ScalingMode scaling_mode_from_string(const std::string& name);
DeformationFamily deformation_family_from_string(const std::string& name);

/// n x p deformation of the family: zero, e1 e1^t, or sqrt(n) log(n) e1 e1^t.
Eigen::MatrixXd make_deformation(DeformationFamily family, std::size_t n, std::size_t p);

/// 1/n + Tr(MM^t)^{1/2} / n^{5/4}.
double gaussian_rate_envelope(std::size_t n, double frobenius);

struct ScalingConfig {
  ScalingMode mode = ScalingMode::Gaussian;
  TailLaw tail{1.5, 1.0, 0.5, true};
  DeformationFamily family = DeformationFamily::Zero;
  double c = 1.0;
  std::vector<std::size_t> ladder = {100, 200, 400, 800};
  EvaluationDomain domain = EvaluationDomain::standard();
  std::size_t trials = 64;
  std::uint64_t seed = 20240601;
  /// Defaults to -0.7 (gaussian) or -0.4 (general_tail).
  std::optional<double> target_slope;
  SolverConfig solver;

  double target() const;
  void validate() const;
};

struct ScalingPoint {
  std::size_t n = 0;
  std::size_t p = 0;
  double distance = 0.0;
  /// Monte Carlo standard error of the mean transform at the argmax point.
  double std_error = 0.0;
  Complex argmax_z;
  std::size_t trials_used = 0;
  std::size_t failures = 0;
  double frobenius = 0.0;
  double envelope = 0.0;
};

struct ScalingReport {
  ScalingMode mode = ScalingMode::Gaussian;
  DeformationFamily family = DeformationFamily::Zero;
  double c = 1.0;
  std::size_t trials = 0;
  std::vector<ScalingPoint> points;
  LinearFit fit;
  double slope_ci_low = 0.0;
  double slope_ci_high = 0.0;
  double target_slope = 0.0;
  bool pass = false;
  /// max_n D(n) / envelope(n).
  double envelope_constant = 0.0;
  /// D(n) / envelope(n) nonincreasing within two standard errors.
  bool envelope_nonincreasing = false;
};

/// D(n) = d_{s,t}(mean ESD over trials, solve_rectangular(mu_{MM^t}, c)) on
/// the ladder (p = n / c), with a least-squares fit of log D against log n.
ScalingReport bound_scaling_experiment(const ScalingConfig& config);

struct ScalingComparison {
  std::size_t n = 0;
  double gaussian = 0.0;
  double tail = 0.0;
  double pooled_std_error = 0.0;
  /// (tail - gaussian) / pooled_std_error.
  double z_score = 0.0;
};

struct ScalingComparisonReport {
  std::vector<ScalingComparison> points;
  /// Gaussian D(n) never exceeds tail D(n) by more than two pooled errors.
  bool ordering_holds = false;
  /// Tail D(n) exceeds Gaussian D(n) by more than two pooled errors at every n.
  bool distinguishable = false;
};

ScalingComparisonReport compare_scaling(const ScalingReport& gaussian,
                                        const ScalingReport& tail);

/// u(z) = |z| / |Im z|^4 + 1 / |Im z|^3.
double u_of_z(Complex z);
/// v(z) = max(1/|Im z|^2, |z|/|Im z|^3 + 1/|Im z|^2, (|z|/|Im z|^2 + 1/|Im z|)^2).
double v_of_z(Complex z);

/// Right-hand side for Var((1/n) Tr(S U)).
double concentration1_bound(const Eigen::MatrixXd& U, Complex z, std::size_t n,
                            std::size_t p, double sigma_sq = 1.0);
/// Max-form right-hand side for Var((1/n) Tr(X^t S V)).
double concentration2bis_bound(const Eigen::MatrixXd& V, Complex z, std::size_t n,
                               std::size_t p, double sigma_sq = 1.0);
/// Weaker form 9 sigma^2 c_n v(z) Tr(VV^t) / n^{9/4}.
double concentration2_bound(const Eigen::MatrixXd& V, Complex z, std::size_t n,
                            std::size_t p, double sigma_sq = 1.0);

struct ConcentrationConfig {
  std::size_t n = 50;
  std::size_t p = 50;
  /// n x n; empty skips the first audit.
  Eigen::MatrixXd U;
  /// n x p; empty skips the second audit.
  Eigen::MatrixXd V;
  /// n x p; empty means M = 0.
  Eigen::MatrixXd deformation;
  std::vector<Complex> z_set = {Complex(0.0, 3.0)};
  std::size_t trials = 2000;
  std::size_t bootstrap = 1000;
  std::uint64_t seed = 20240602;
  double sigma_sq = 1.0;

  void validate() const;
};

struct ConcentrationCheck {
  /// "concentration1", "concentration2bis" or "concentration2".
  std::string target;
  Complex z;
  double variance = 0.0;
  /// Bootstrap standard deviation of the variance estimate.
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bound = 0.0;
  /// ci_high <= bound.
  bool pass = false;
  /// variance > bound + 5 std_error.
  bool hard_violation = false;
};

struct ConcentrationReport {
  std::vector<ConcentrationCheck> checks;
  std::size_t trials_used = 0;
  std::size_t failures = 0;

  bool all_pass() const;
  const ConcentrationCheck* find(const std::string& target, Complex z) const;
};

/// Monte Carlo variances of (1/n) Tr(S U) and (1/n) Tr(X^t S V) for Gaussian
/// X = Y / sqrt(p) + M, with percentile-bootstrap 95% intervals, against the
/// closed-form bounds.
ConcentrationReport concentration_audit(const ConcentrationConfig& config);

struct TailFrequencyRow {
  std::size_t n = 0;
  std::vector<double> frequencies;  // one per delta
  double mean_distance = 0.0;
};

struct TailFrequencyReport {
  std::vector<double> deltas;
  std::vector<TailFrequencyRow> rows;
  /// Frequencies are nonincreasing in delta for every n.
  bool monotone_in_delta = false;
};

/// Frequency of d_{s,t}(mu_{XX^t}, mean ESD) >= delta for bounded (+-1)
/// entries and M = 0. Only the qualitative shape is checked.
TailFrequencyReport concentration3_audit(const std::vector<std::size_t>& ns, double c,
                                         const std::vector<double>& deltas,
                                         std::size_t trials, std::uint64_t seed,
                                         const EvaluationDomain& domain);

}  // namespace rmtfree
