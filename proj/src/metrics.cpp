#include "rmtfree/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rmtfree/ensemble.hpp"

namespace rmtfree {

namespace {

struct Cdf {
  std::vector<double> x;
  std::vector<double> cum;

  explicit Cdf(const Measure& mu) {
    double acc = 0.0;
    for (const Atom& a : mu.atoms()) {
      acc += a.weight;
      x.push_back(a.location);
      cum.push_back(acc);
    }
  }

  // Right-continuous distribution function.
  double operator()(double t) const {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    if (it == x.begin()) return 0.0;
    return cum[static_cast<std::size_t>(it - x.begin()) - 1];
  }
};

void require_atomic(const Measure& mu, const Measure& nu, const char* what) {
  if (mu.kind() != MeasureKind::Atomic || nu.kind() != MeasureKind::Atomic)
    throw std::invalid_argument(std::string(what) + ": both measures must be atomic");
}

double one_sided_gap(const Cdf& f, const Cdf& g, double tol) {
  double gap = 0.0;
  for (std::size_t i = 0; i < f.x.size(); ++i)
    gap = std::max(gap, f.cum[i] - g(f.x[i] + tol));
  return gap;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric eigensolver did not converge");
  return solver.eigenvalues();
}

Measure empirical_of(const Eigen::VectorXd& v) {
  return Measure::empirical(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& A) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  const double tol = static_cast<double>(std::max(A.rows(), A.cols())) *
                     std::numeric_limits<double>::epsilon() * sv(0);
  return (sv.array() > tol).count();
}

double spectral_location_tol(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return 1e-9 * scale;
}

void require_symmetric(const Eigen::MatrixXd& A, const char* what) {
  if (A.rows() != A.cols())
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument(std::string(what) + ": matrix must be symmetric");
}

}  // namespace

std::vector<Complex> stieltjes_on_domain(const Measure& mu,
                                         const EvaluationDomain& domain) {
  std::vector<Complex> out;
  out.reserve(domain.size());
  for (Complex z : domain.points()) out.push_back(stieltjes(mu, z));
  return out;
}

DstResult dst_from_values(std::span<const Complex> g_mu, std::span<const Complex> g_nu,
                          const EvaluationDomain& domain) {
  if (g_mu.size() != domain.size() || g_nu.size() != domain.size())
    throw std::invalid_argument("dst_from_values: value count does not match the domain");
  DstResult r;
  r.tail_bound = domain.tail_bound();
  r.argmax_z = domain.points().front();
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const double d = std::abs(g_mu[i] - g_nu[i]);
    if (d > r.value) {
      r.value = d;
      r.argmax_index = i;
      r.argmax_z = domain.points()[i];
    }
  }
  return r;
}

DstResult dst_distance(const Measure& mu, const Measure& nu,
                       const EvaluationDomain& domain) {
  const auto a = stieltjes_on_domain(mu, domain);
  const auto b = stieltjes_on_domain(nu, domain);
  return dst_from_values(a, b, domain);
}

double ks_distance(const Measure& mu, const Measure& nu, double location_tol) {
  require_atomic(mu, nu, "ks_distance");
  const Cdf f(mu), g(nu);
  return std::max(one_sided_gap(f, g, location_tol), one_sided_gap(g, f, location_tol));
}

double w1_distance(const Measure& mu, const Measure& nu) {
  require_atomic(mu, nu, "w1_distance");
  const Cdf f(mu), g(nu);
  std::vector<double> xs = f.x;
  xs.insert(xs.end(), g.x.begin(), g.x.end());
  std::sort(xs.begin(), xs.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double width = xs[i + 1] - xs[i];
    if (width > 0.0) total += std::abs(f(xs[i]) - g(xs[i])) * width;
  }
  return total;
}

double w2_distance(const Measure& mu, const Measure& nu) {
  require_atomic(mu, nu, "w2_distance");
  const auto& a = mu.atoms();
  const auto& b = nu.atoms();
  std::size_t i = 0, j = 0;
  double ra = a.empty() ? 0.0 : a[0].weight;
  double rb = b.empty() ? 0.0 : b[0].weight;
  double total = 0.0;
  while (i < a.size() && j < b.size()) {
    const double m = std::min(ra, rb);
    const double d = a[i].location - b[j].location;
    total += m * d * d;
    ra -= m;
    rb -= m;
    if (ra <= 0.0) {
      if (++i < a.size()) ra = a[i].weight;
    }
    if (rb <= 0.0) {
      if (++j < b.size()) rb = b[j].weight;
    }
  }
  return std::sqrt(total);
}

double levy_distance(const Measure& mu, const Measure& nu) {
  require_atomic(mu, nu, "levy_distance");
  const Cdf f(mu), g(nu);
  // With step CDFs, G(x) - F(x + eps) is largest at the jumps of G.
  auto within = [&](double eps) {
    for (double x : g.x)
      if (g(x) > f(x + eps) + eps) return false;
    for (double x : f.x)
      if (f(x) > g(x + eps) + eps) return false;
    return true;
  };
  double lo = 0.0, hi = 1.0;
  if (within(0.0)) return 0.0;
  for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
    const double mid = 0.5 * (lo + hi);
    (within(mid) ? hi : lo) = mid;
  }
  return hi;
}

ClassicalDistances classical_distances(const Measure& mu, const Measure& nu,
                                       double location_tol) {
  return {ks_distance(mu, nu, location_tol), w1_distance(mu, nu), w2_distance(mu, nu)};
}

DistanceReport distance_report(const Measure& mu, const Measure& nu,
                               const EvaluationDomain& domain) {
  const DstResult d = dst_distance(mu, nu, domain);
  DistanceReport r;
  r.dst = d.value;
  r.argmax_z = d.argmax_z;
  r.tail_bound = d.tail_bound;
  r.s = domain.s();
  r.t = domain.t();
  r.im_max = domain.im_max();
  if (mu.kind() == MeasureKind::Atomic && nu.kind() == MeasureKind::Atomic)
    r.classical = classical_distances(mu, nu);
  return r;
}

InequalityAudit inequality_audit(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                 InequalityKind kind, double p) {
  InequalityAudit r;
  r.kind = kind;
  const auto n = static_cast<double>(A.rows());
  if (A.rows() == 0) throw std::invalid_argument("inequality_audit: empty matrix");

  switch (kind) {
    case InequalityKind::RankSym:
    case InequalityKind::HwSym: {
      require_symmetric(A, "inequality_audit");
      require_symmetric(B, "inequality_audit");
      if (A.rows() != B.rows())
        throw std::invalid_argument("inequality_audit: dimension mismatch");
      const Eigen::VectorXd ea = symmetric_eigenvalues(A);
      const Eigen::VectorXd eb = symmetric_eigenvalues(B);
      if (kind == InequalityKind::RankSym) {
        r.lhs = ks_distance(empirical_of(ea), empirical_of(eb), spectral_location_tol(ea, eb));
        r.rhs = static_cast<double>(numerical_rank(A - B)) / n;
      } else {
        const double w2 = w2_distance(empirical_of(ea), empirical_of(eb));
        r.lhs = w2 * w2;
        r.rhs = (A - B).squaredNorm() / n;
      }
      break;
    }
    case InequalityKind::RankCov:
    case InequalityKind::HwCov:
    case InequalityKind::LevyCov: {
      if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("inequality_audit: dimension mismatch");
      const Eigen::VectorXd ea = gram_eigenvalues(A);
      const Eigen::VectorXd eb = gram_eigenvalues(B);
      if (kind == InequalityKind::RankCov) {
        r.lhs = ks_distance(empirical_of(ea), empirical_of(eb), spectral_location_tol(ea, eb));
        r.rhs = static_cast<double>(numerical_rank(A - B)) / n;
      } else {
        const double d = kind == InequalityKind::HwCov
                             ? w2_distance(empirical_of(ea), empirical_of(eb))
                             : levy_distance(empirical_of(ea), empirical_of(eb));
        r.lhs = d * d * d * d;
        r.rhs = 2.0 / (n * n) * (A.squaredNorm() + B.squaredNorm()) * (A - B).squaredNorm();
      }
      break;
    }
    case InequalityKind::Schatten: {
      if (!(p > 0.0 && p <= 2.0))
        throw std::invalid_argument("inequality_audit: schatten exponent must lie in (0, 2]");
      require_symmetric(A, "inequality_audit");
      const Eigen::VectorXd ea = symmetric_eigenvalues(A);
      r.lhs = ea.cwiseAbs().array().pow(p).mean();
      r.rhs = A.rowwise().squaredNorm().array().pow(p / 2.0).mean();
      break;
    }
  }
  r.slack = r.rhs - r.lhs;
  r.holds = r.lhs <= r.rhs + 1e-10 * std::max(1.0, std::abs(r.rhs));
  return r;
}

std::string to_string(InequalityKind kind) {
  switch (kind) {
    case InequalityKind::RankSym: return "rank_sym";
    case InequalityKind::RankCov: return "rank_cov";
    case InequalityKind::HwSym: return "hw_sym";
    case InequalityKind::HwCov: return "hw_cov";
    case InequalityKind::LevyCov: return "levy_cov";
    case InequalityKind::Schatten: return "schatten";
  }
  return "unknown";
}

InequalityKind inequality_kind_from_string(const std::string& name) {
  for (auto k : {InequalityKind::RankSym, InequalityKind::RankCov, InequalityKind::HwSym,
                 InequalityKind::HwCov, InequalityKind::LevyCov, InequalityKind::Schatten})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown inequality kind: " + name);
}

}  // namespace rmtfree
