#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmtfree {

struct TraceInequality {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

namespace detail {

template <typename M>
double op_norm(const M& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<typename M::PlainObject> svd(A);
  return svd.singularValues()(0);
}

template <typename M>
double entry_norm(const M& A) {
  return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

inline TraceInequality le(std::string name, double lhs, double rhs) {
  const double slack = 1e-12 * std::max(1.0, std::abs(rhs));
  return {std::move(name), lhs, rhs, lhs <= rhs + slack};
}

}  // namespace detail

/// Both sides of the elementary trace and norm inequalities for
/// A, B (n x p), C (p x n) and D (n x n). Norms are the operator norm and the
/// max-entry norm; Tr(AA*) is the squared Frobenius norm. Works for real and
/// complex scalars.
template <typename Scalar>
std::vector<TraceInequality> trace_inequalities(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& B,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& C,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& D) {
  using detail::entry_norm;
  using detail::le;
  using detail::op_norm;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  const auto n = A.rows();
  const auto p = A.cols();
  if (B.rows() != n || B.cols() != p || C.rows() != p || C.cols() != n ||
      D.rows() != n || D.cols() != n)
    throw std::invalid_argument("trace_inequalities: dimension mismatch");

  const double sn = std::sqrt(static_cast<double>(n));
  const double fro_a = A.norm();
  const double fro_c = C.norm();
  const double tr_ac = std::abs((A * C).trace());
  const double norm_a = op_norm(A);
  const double norm_c = op_norm(C);

  std::vector<TraceInequality> out;
  out.push_back(le("i", tr_ac, fro_a * fro_c));
  out.push_back(le("ii", tr_ac, static_cast<double>(n) * norm_a * norm_c));
  out.push_back(le("iii", tr_ac, sn * norm_a * fro_c));
  out.push_back(le("iv_lower", norm_a, fro_a));
  out.push_back(le("iv_upper", fro_a, sn * norm_a));
  out.push_back(le("v", fro_a, std::sqrt(static_cast<double>(n * p)) * entry_norm(A)));

  const Mat diag = D.diagonal().asDiagonal();
  const double diag_op = op_norm(diag);
  const double diag_entry = entry_norm(diag);
  TraceInequality eq{"vi_equality", std::abs(diag_op - diag_entry), 0.0, false};
  eq.holds = eq.lhs <= 1e-12 * std::max(1.0, diag_entry);
  out.push_back(eq);
  out.push_back(le("vi", diag_entry, entry_norm(D)));

  const Mat had = A.cwiseProduct(B);
  out.push_back(le("vii", entry_norm(had), entry_norm(A) * entry_norm(B)));
  out.push_back(le("viii", op_norm(had), norm_a * op_norm(B)));
  const double eb = entry_norm(B);
  out.push_back(le("ix", had.squaredNorm(), A.squaredNorm() * eb * eb));
  return out;
}

}  // namespace rmtfree
