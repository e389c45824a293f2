#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rmtfree/domain.hpp"
#include "rmtfree/measure.hpp"
#include "rmtfree/rng.hpp"

namespace rmtfree {

/// Stretched-exponential entry law: a sign drawn from {-1, +1} times an
/// independent Weibull modulus with P(|Z| >= t) = exp(-a t^alpha), optionally
/// rescaled to unit variance (no centering).
struct TailLaw {
  double alpha = 1.0;
  double a = 1.0;
  /// Probability of the sign +1.
  double prob_plus = 0.5;
  bool normalize_variance = true;

  void validate() const;
  /// E |Z|^k of the raw (unscaled) modulus.
  double raw_modulus_moment(double k) const;
  double raw_mean() const;
  double raw_variance() const;
  /// Factor applied to raw draws (1 / sd when normalizing, otherwise 1).
  double scale() const;
  double raw_modulus(Engine& rng) const;
  double sample(Engine& rng) const;
};

struct StandardGaussian {};
/// Symmetric +-1 entries; bounded by 1, variance 1.
struct Rademacher {};
/// Identically zero noise, for pure-signal runs.
struct ZeroEntries {};

using EntryLaw = std::variant<StandardGaussian, TailLaw, Rademacher, ZeroEntries>;

std::string entry_law_name(const EntryLaw& law);

/// Recipe for X = Y / sqrt(p) + M with i.i.d. entries Y.
struct EnsembleSpec {
  std::size_t n = 1;
  std::size_t p = 1;
  EntryLaw entry_law = StandardGaussian{};
  /// n x p deformation; an empty matrix means M = 0.
  Eigen::MatrixXd deformation;
  std::uint64_t seed = 0;
  std::size_t trials = 1;

  void validate() const;
  double ratio() const { return static_cast<double>(n) / static_cast<double>(p); }
  bool has_deformation() const { return deformation.size() != 0; }
};

/// Raw n x p noise matrix Y for the given trial; a pure function of
/// (spec.seed, trial_index).
Eigen::MatrixXd sample_matrix(const EnsembleSpec& spec, std::size_t trial_index);

/// X = Y / sqrt(p) + M for the given trial.
Eigen::MatrixXd information_plus_noise(const EnsembleSpec& spec,
                                       std::size_t trial_index);

/// Eigenvalues of X X^t (ascending, n values), computed on the smaller Gram
/// matrix and padded with zeros. Roundoff negatives are clamped to 0.
Eigen::VectorXd gram_eigenvalues(const Eigen::MatrixXd& X);

/// mu_{X X^t}.
Measure gram_spectrum(const Eigen::MatrixXd& X);

/// mu_{X X^t} for the trial's X = Y / sqrt(p) + M.
Measure spectral_sample(const EnsembleSpec& spec, std::size_t trial_index);

/// Empirical singular value distribution with n ^ p equal-weight atoms.
Measure singular_value_dist(const Eigen::MatrixXd& A);

struct Hermitization {
  Eigen::MatrixXd matrix;
  Measure spectrum;
};

/// M' = [[0, M], [M^t, 0]] and its spectral measure.
Hermitization hermitize(const Eigen::MatrixXd& M);

struct StieltjesEstimate {
  std::vector<Complex> points;
  std::vector<Complex> mean;
  /// Monte Carlo standard error per point; empty when fewer than 2 trials.
  std::optional<std::vector<double>> std_error;
  std::size_t trials_used = 0;
  std::size_t failures = 0;
};

/// Mean over trials of g(z) = (1/n) Tr (z - X X^t)^{-1} on the domain grid.
StieltjesEstimate mean_stieltjes_mc(const EnsembleSpec& spec,
                                    const EvaluationDomain& domain);

/// G_mu at every point, for an atomic measure given by its eigenvalues.
std::vector<Complex> stieltjes_on(const Eigen::VectorXd& eigenvalues,
                                  const std::vector<Complex>& points);

}  // namespace rmtfree
