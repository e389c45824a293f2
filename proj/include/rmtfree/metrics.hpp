#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmtfree/domain.hpp"
#include "rmtfree/measure.hpp"

namespace rmtfree {

struct DstResult {
  double value = 0.0;
  Complex argmax_z;
  std::size_t argmax_index = 0;
  /// sup |G_mu - G_nu| over the part of the cone above the grid.
  double tail_bound = 0.0;
};

/// Grid version of d_{s,t}: max over the domain points of |G_mu - G_nu|.
/// Ties go to the lowest grid index.
DstResult dst_distance(const Measure& mu, const Measure& nu,
                       const EvaluationDomain& domain);

/// Same reduction from precomputed transform values on domain.points().
DstResult dst_from_values(std::span<const Complex> g_mu,
                          std::span<const Complex> g_nu,
                          const EvaluationDomain& domain);

/// Transform values on every domain point.
std::vector<Complex> stieltjes_on_domain(const Measure& mu,
                                         const EvaluationDomain& domain);

struct ClassicalDistances {
  double ks = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
};

/// KS, W1 and W2 between two atomic measures. With location_tol > 0 the KS
/// gap is measured between F_mu(x) and F_nu(x + tol) (and symmetrically), which
/// absorbs roundoff in atom locations.
ClassicalDistances classical_distances(const Measure& mu, const Measure& nu,
                                       double location_tol = 0.0);

double ks_distance(const Measure& mu, const Measure& nu, double location_tol = 0.0);
double w1_distance(const Measure& mu, const Measure& nu);
double w2_distance(const Measure& mu, const Measure& nu);
/// Levy distance: the least eps with F(x - eps) - eps <= G(x) <= F(x + eps) + eps.
double levy_distance(const Measure& mu, const Measure& nu);

struct DistanceReport {
  double dst = 0.0;
  Complex argmax_z;
  double tail_bound = 0.0;
  /// Present only when both measures are atomic.
  std::optional<ClassicalDistances> classical;
  double s = 0.0;
  double t = 0.0;
  double im_max = 0.0;
};

DistanceReport distance_report(const Measure& mu, const Measure& nu,
                               const EvaluationDomain& domain);

enum class InequalityKind { RankSym, RankCov, HwSym, HwCov, LevyCov, Schatten };

struct InequalityAudit {
  InequalityKind kind = InequalityKind::RankSym;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  /// rhs - lhs.
  double slack = 0.0;
};

/// Evaluates both sides of a spectral-measure inequality for A and B:
///   rank_sym   d_KS(mu_A, mu_B) <= rank(A - B) / n
///   rank_cov   d_KS(mu_{AA^t}, mu_{BB^t}) <= rank(A - B) / n
///   hw_sym     W2^2(mu_A, mu_B) <= Tr((A - B)^2) / n
///   hw_cov     W2^4(mu_{AA^t}, mu_{BB^t}) <= 2/n^2 Tr(AA^t + BB^t) Tr((A-B)(A-B)^t)
///   levy_cov   the same with the Levy distance L^4 on the left
///
/// hw_cov is evaluated as written and does not hold in general: for 1 x 1
/// matrices 3 and 2 the left side is 625 and the right side 26. levy_cov is
/// the form that does hold.
///   schatten   int |x|^p dmu_A <= 1/n sum_k (sum_j A_kj^2)^{p/2}   (B unused)
InequalityAudit inequality_audit(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                 InequalityKind kind, double p = 1.0);

std::string to_string(InequalityKind kind);
InequalityKind inequality_kind_from_string(const std::string& name);

}  // namespace rmtfree
