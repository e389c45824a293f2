#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rmtfree/domain.hpp"
#include "rmtfree/ensemble.hpp"
#include "rmtfree/freeconv.hpp"
#include "rmtfree/measure.hpp"

namespace rmtfree {

enum class Band { A = 0, B = 1, C = 2, D = 3 };

/// Band edges on the raw entries: t_a = (log n)^{2/alpha},
/// t_b = eps sqrt(p), t_c = sqrt(p) / eps with eps = 1 / log n.
struct TruncationThresholds {
  double t_a = 0.0;
  double t_b = 0.0;
  double t_c = 0.0;
  double eps = 0.0;
};

TruncationThresholds truncation_thresholds(std::size_t n, std::size_t p, double alpha);

/// Band of a raw entry x. When the edges cross, the lower band wins: |x| < t_a
/// is always A, so B (and possibly C) can be empty.
Band classify_entry(double x, const TruncationThresholds& th);

struct TruncationDecomposition {
  Eigen::MatrixXd A, B, C, D;
  /// Positions (row, col) with |X_jk| >= t_a, in column-major order.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> index_set;
  TruncationThresholds thresholds;
  std::array<std::size_t, 4> counts{};
  /// True when t_a > t_b, so band B cannot hold any entry.
  bool band_b_empty_by_thresholds = false;
};

/// Splits X / sqrt(p) into the four bands of |X_jk|. Requires n >= 3.
TruncationDecomposition truncation_decompose(const Eigen::MatrixXd& X, double alpha);

struct ConditionedMoments {
  /// (log n)^{2/alpha}.
  double threshold = 0.0;
  /// P(|Z| >= threshold).
  double tail_probability = 0.0;
  double mean = 0.0;
  double second = 0.0;
  double fourth = 0.0;
  double sigma_sq = 0.0;
  /// Var(Z) - sigma_sq, computed from the tail integrals so that it keeps
  /// full relative precision when it is far below machine epsilon.
  double variance_deficit = 0.0;
};

/// Moments of Z conditioned on |Z| < (log n)^{2/alpha}.
ConditionedMoments conditioned_moments(const TailLaw& law, double n);
/// Same, with an explicit truncation level.
ConditionedMoments conditioned_moments_at(const TailLaw& law, double threshold);

enum class RateKind { PhiPrime, PsiPrime, JPrimeForward };

std::string to_string(RateKind kind);
RateKind rate_kind_from_string(const std::string& name);

struct RateQuery {
  Measure measure;
  double c = 1.0;
  double alpha = 1.0;
  double a = 1.0;

  void validate() const;
};

inline constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();

/// (a/2) (c+1)/c^{1+alpha/2} m_alpha(mu) if mu is symmetric with
/// mu({0}) >= |1-c|/(1+c), else +inf.
double phi_prime(const RateQuery& q);
/// a/c^{alpha/2} m_{alpha/2}(nu) if nu({0}) >= max(0, 1 - 1/c), else +inf.
/// nu must live on [0, inf).
double psi_prime(const RateQuery& q);

struct ForwardRate {
  Measure mu;
  double value = 0.0;
};

struct ForwardOptions {
  std::size_t points = 1024;
  std::vector<double> eps_ladder = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
  SolverConfig solver;
};

/// mu = (sqrt(nu) [+]_c sqrt(MP_c))^2 as a density grid together with
/// J'(mu) = Psi'(nu). A Dirac mass at 0 maps to MP(c) exactly.
ForwardRate j_prime_forward(const RateQuery& q, const ForwardOptions& options = {});

/// Scalar rate value; for JPrimeForward this is Psi'(nu).
double rate_eval(const RateQuery& q, RateKind kind);

/// Push-forward of mu by x -> lambda x.
Measure scale_measure(const Measure& mu, double lambda);

struct ExpEquivPoint {
  std::size_t n = 0;
  std::size_t p = 0;
  double mean_distance = 0.0;
  double std_error = 0.0;
  std::size_t trials_used = 0;
  std::size_t failures = 0;
  /// Trials whose C part was not identically zero.
  std::size_t nonempty_c = 0;
  std::vector<std::string> failure_messages;
};

struct ExpEquivReport {
  std::vector<ExpEquivPoint> points;
  double c = 1.0;
  double alpha = 1.0;

  /// Each mean is at most the previous one plus two pooled standard errors.
  bool nonincreasing_within(double k = 2.0) const;
};

/// For each ladder n (p = round(n / c)), samples X with the spec's tail law,
/// and reports the trial mean of d_{s,t}(mu_{XX^t/p}, (sqrt(mu_{CC^t}) [+]_c
/// sqrt(MP_c))^2).
ExpEquivReport exp_equiv_diagnostic(const EnsembleSpec& spec, double c,
                                    const std::vector<std::size_t>& ladder,
                                    const EvaluationDomain& domain,
                                    const SolverConfig& solver = {});

}  // namespace rmtfree
