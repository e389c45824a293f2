#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rmtfree/numerics.hpp"

namespace rmtfree {

/// S = (z I - X X^t)^{-1}.
template <typename Derived>
Eigen::MatrixXcd resolvent(const Eigen::MatrixBase<Derived>& X, Complex z) {
  Eigen::MatrixXcd K = -(X * X.adjoint()).template cast<Complex>();
  K.diagonal().array() += z;
  return K.partialPivLu().inverse();
}

template <typename Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& A) {
  if (A.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(A);
  return svd.singularValues()(0);
}

template <typename Derived>
double max_entry_norm(const Eigen::MatrixBase<Derived>& A) {
  return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

/// Blocks of the resolvent calculus for X X^t: S, S X, X^t S, X^t S X.
struct ResolventBlocks {
  Eigen::MatrixXcd S;
  Eigen::MatrixXcd SX;
  Eigen::MatrixXcd XtS;
  Eigen::MatrixXcd XtSX;

  ResolventBlocks(const Eigen::MatrixXd& X, Complex z)
      : S(resolvent(X, z)),
        SX(S * X.cast<Complex>()),
        XtS(X.transpose().cast<Complex>() * S),
        XtSX(XtS * X.cast<Complex>()) {}

  /// d S_{jk} / d X_{ab}.
  Complex d1_S(Eigen::Index a, Eigen::Index b, Eigen::Index j, Eigen::Index k) const {
    return SX(j, b) * S(a, k) + S(j, a) * XtS(b, k);
  }

  /// d (S X)_{jl} / d X_{ab}.
  Complex d1_SX(Eigen::Index a, Eigen::Index b, Eigen::Index j, Eigen::Index l) const {
    return SX(j, b) * SX(a, l) + S(j, a) * XtSX(b, l) + (b == l ? S(j, a) : Complex{});
  }

  /// d (X^t S)_{lk} / d X_{ab}.
  Complex d1_XtS(Eigen::Index a, Eigen::Index b, Eigen::Index l, Eigen::Index k) const {
    return XtSX(l, b) * S(a, k) + XtS(l, a) * XtS(b, k) + (b == l ? S(a, k) : Complex{});
  }

  /// d (X^t S X)_{lm} / d X_{ab}.
  Complex d1_XtSX(Eigen::Index a, Eigen::Index b, Eigen::Index l, Eigen::Index m) const {
    return XtSX(l, b) * SX(a, m) + XtS(l, a) * XtSX(b, m) +
           (b == m ? XtS(l, a) : Complex{}) + (b == l ? SX(a, m) : Complex{});
  }

  /// d^2 S_{jk} / d X_{ab}^2.
  Complex d2_S(Eigen::Index a, Eigen::Index b, Eigen::Index j, Eigen::Index k) const {
    return 2.0 * (S(j, a) * S(a, k) + SX(j, b) * SX(a, b) * S(a, k) +
                  S(j, a) * XtSX(b, b) * S(a, k) + S(j, a) * XtS(b, a) * XtS(b, k) +
                  SX(j, b) * S(a, a) * XtS(b, k));
  }

  /// d^3 S_{jk} / d X_{ab}^3.
  Complex d3_S(Eigen::Index a, Eigen::Index b, Eigen::Index j, Eigen::Index k) const {
    const Complex sjb = SX(j, b), sab = SX(a, b), saa = S(a, a), sja = S(j, a),
                  sak = S(a, k), tba = XtS(b, a), tbk = XtS(b, k), qbb = XtSX(b, b);
    return 6.0 * (sjb * saa * sak + sja * tba * sak + sja * sab * sak +
                  sja * saa * tbk + sjb * sab * sab * sak + sja * tba * tba * tbk +
                  sjb * sab * saa * tbk + sjb * saa * tba * tbk +
                  sja * qbb * sab * sak + sjb * saa * qbb * sak +
                  sja * tba * qbb * sak + sja * qbb * saa * tbk);
  }
};

struct ResolventCheck {
  std::string name;
  double value = 0.0;  // measured error or left-hand side
  double bound = 0.0;  // tolerance or right-hand side
  bool pass = false;
  std::string detail;
};

struct ResolventReport {
  Complex z;
  Eigen::MatrixXcd S;
  std::vector<ResolventCheck> checks;

  bool all_pass() const;
  const ResolventCheck* find(const std::string& name) const;
};

/// Base steps. Second and third derivatives use central differences at h and
/// h/2 combined by one Richardson step.
struct DerivativeSteps {
  double first = 1e-5;
  double second = 1e-3;
  double third = 1e-2;
};

struct DerivativeTolerances {
  double first = 1e-6;
  double second = 1e-4;
  double third = 1e-3;
};

/// Builds S for X and audits the resolvent identities and norm bounds; with
/// check_derivatives, also compares the analytic entry derivatives of S (and
/// of S X, X^t S, X^t S X) with central finite differences on random index
/// tuples.
ResolventReport resolvent_suite(const Eigen::MatrixXd& X, Complex z,
                                bool check_derivatives, std::size_t tuples = 20,
                                std::uint64_t seed = 7,
                                const DerivativeSteps& steps = {},
                                const DerivativeTolerances& tolerances = {});

}  // namespace rmtfree
