#include "rmtfree/resolvent.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rmtfree/rng.hpp"

namespace rmtfree {

namespace {

constexpr double kIdentityTolerance = 1e-10;
constexpr double kNormSlack = 1e-12;

ResolventCheck bound_check(std::string name, double value, double bound) {
  ResolventCheck c;
  c.name = std::move(name);
  c.value = value;
  c.bound = bound;
  c.pass = value <= bound * (1.0 + kNormSlack) + kNormSlack;
  return c;
}

double relative_error(Complex analytic, Complex numeric) {
  return std::abs(analytic - numeric) / std::max(std::abs(analytic), 1e-12);
}

struct WorstCase {
  double error = 0.0;
  std::string where;

  void update(double e, Eigen::Index a, Eigen::Index b, Eigen::Index j,
              Eigen::Index k, Complex analytic, Complex numeric) {
    if (e < error) return;
    error = e;
    std::ostringstream os;
    os.precision(10);
    os << "worst at (a,b,j,k)=(" << a << "," << b << "," << j << "," << k
       << "): analytic " << analytic << ", finite difference " << numeric;
    where = os.str();
  }
};

}  // namespace

bool ResolventReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ResolventCheck& c) { return c.pass; });
}

const ResolventCheck* ResolventReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ResolventReport resolvent_suite(const Eigen::MatrixXd& X, Complex z,
                                bool check_derivatives, std::size_t tuples,
                                std::uint64_t seed, const DerivativeSteps& steps,
                                const DerivativeTolerances& tolerances) {
  if (z.imag() == 0.0) throw std::invalid_argument("resolvent_suite: z must be non-real");
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  const ResolventBlocks blocks(X, z);
  const Eigen::MatrixXcd& S = blocks.S;

  ResolventReport report;
  report.z = z;
  report.S = S;

  const Eigen::MatrixXd gram = X * X.transpose();
  const Eigen::MatrixXcd gram_c = gram.cast<Complex>();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  const double scale = std::max(1.0, max_entry_norm(gram));
  const double identity_tol = kIdentityTolerance * scale;

  const Eigen::MatrixXcd target = z * S - I;
  report.checks.push_back(bound_check("S_XXt_identity",
                                      max_entry_norm(S * gram_c - target), identity_tol));
  report.checks.push_back(bound_check("XXt_S_identity",
                                      max_entry_norm(gram_c * S - target), identity_tol));

  {
    Engine rng = make_engine(seed, "resolvent_perturbation", 0);
    std::normal_distribution<double> normal(0.0, 0.1);
    Eigen::MatrixXd B(n, p);
    for (Eigen::Index k = 0; k < B.size(); ++k) B.data()[k] = normal(rng);
    const Eigen::MatrixXcd S2 = resolvent(X + B, z);
    const Eigen::MatrixXcd mid =
        (X * B.transpose() + B * X.transpose() + B * B.transpose()).cast<Complex>();
    report.checks.push_back(bound_check(
        "perturbation_identity", max_entry_norm((S2 - S) - S2 * mid * S), identity_tol));
  }

  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    Complex g = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) g += 1.0 / (z - solver.eigenvalues()[k]);
    g /= static_cast<double>(n);
    const Complex tr = S.trace() / static_cast<double>(n);
    report.checks.push_back(bound_check("trace_stieltjes", std::abs(tr - g), identity_tol));
  }

  const double im_z = std::abs(z.imag());
  const double norm_S = operator_norm(S);
  report.checks.push_back(bound_check("S_entry_le_norm", max_entry_norm(S), norm_S));
  report.checks.push_back(bound_check("S_norm_bound", norm_S, 1.0 / im_z));

  const Complex y = std::sqrt(z);
  const double norm_SX = operator_norm(blocks.SX);
  report.checks.push_back(bound_check("SX_entry_le_norm", max_entry_norm(blocks.SX), norm_SX));
  report.checks.push_back(
      bound_check("SX_norm_bound", norm_SX, 1.0 / std::abs(y.imag())));

  const double norm_XtSX = operator_norm(blocks.XtSX);
  report.checks.push_back(
      bound_check("XtSX_entry_le_norm", max_entry_norm(blocks.XtSX), norm_XtSX));
  report.checks.push_back(
      bound_check("XtSX_norm_bound", norm_XtSX, 1.0 + std::abs(z / z.imag())));

  {
    const Eigen::MatrixXcd D = S.diagonal().asDiagonal();
    const double diag_norm = operator_norm(D);
    report.checks.push_back(bound_check(
        "diag_norm_equals_entry_norm", std::abs(diag_norm - max_entry_norm(D)), identity_tol));
    report.checks.push_back(bound_check("diag_le_entry_norm", diag_norm, max_entry_norm(S)));
  }

  if (!check_derivatives) return report;

  Engine rng = make_engine(seed, "resolvent_tuples", 0);
  std::uniform_int_distribution<Eigen::Index> row(0, n - 1);
  std::uniform_int_distribution<Eigen::Index> col(0, p - 1);
  WorstCase first, second, third, first_sx, first_xts, first_xtsx;

  auto shifted = [&](Eigen::Index a, Eigen::Index b, double h) {
    Eigen::MatrixXd Xh = X;
    Xh(a, b) += h;
    return Xh;
  };

  for (std::size_t t = 0; t < tuples; ++t) {
    const Eigen::Index a = row(rng), b = col(rng), j = row(rng), k = row(rng);
    const Eigen::Index l = col(rng), m = col(rng);

    const double h1 = steps.first;
    const Eigen::MatrixXd Xp = shifted(a, b, h1), Xm = shifted(a, b, -h1);
    const ResolventBlocks Bp(Xp, z), Bm(Xm, z);
    {
      const Complex fd = (Bp.S(j, k) - Bm.S(j, k)) / (2.0 * h1);
      const Complex an = blocks.d1_S(a, b, j, k);
      first.update(relative_error(an, fd), a, b, j, k, an, fd);
    }
    {
      const Complex fd = (Bp.SX(j, l) - Bm.SX(j, l)) / (2.0 * h1);
      const Complex an = blocks.d1_SX(a, b, j, l);
      first_sx.update(relative_error(an, fd), a, b, j, l, an, fd);
    }
    {
      const Complex fd = (Bp.XtS(l, k) - Bm.XtS(l, k)) / (2.0 * h1);
      const Complex an = blocks.d1_XtS(a, b, l, k);
      first_xts.update(relative_error(an, fd), a, b, l, k, an, fd);
    }
    {
      const Complex fd = (Bp.XtSX(l, m) - Bm.XtSX(l, m)) / (2.0 * h1);
      const Complex an = blocks.d1_XtSX(a, b, l, m);
      first_xtsx.update(relative_error(an, fd), a, b, l, m, an, fd);
    }
    {
      auto central2 = [&](double h) {
        const Complex sp = resolvent(shifted(a, b, h), z)(j, k);
        const Complex sm = resolvent(shifted(a, b, -h), z)(j, k);
        return (sp - 2.0 * S(j, k) + sm) / (h * h);
      };
      const double h = steps.second;
      const Complex fd = (4.0 * central2(0.5 * h) - central2(h)) / 3.0;
      const Complex an = blocks.d2_S(a, b, j, k);
      second.update(relative_error(an, fd), a, b, j, k, an, fd);
    }
    {
      auto central3 = [&](double h) {
        const Complex s1 = resolvent(shifted(a, b, h), z)(j, k);
        const Complex s2 = resolvent(shifted(a, b, 2.0 * h), z)(j, k);
        const Complex m1 = resolvent(shifted(a, b, -h), z)(j, k);
        const Complex m2 = resolvent(shifted(a, b, -2.0 * h), z)(j, k);
        return (s2 - 2.0 * s1 + 2.0 * m1 - m2) / (2.0 * h * h * h);
      };
      const double h = steps.third;
      const Complex fd = (4.0 * central3(0.5 * h) - central3(h)) / 3.0;
      const Complex an = blocks.d3_S(a, b, j, k);
      third.update(relative_error(an, fd), a, b, j, k, an, fd);
    }
  }

  auto push = [&](std::string name, const WorstCase& w, double tol) {
    ResolventCheck c = bound_check(std::move(name), w.error, tol);
    c.detail = w.where;
    report.checks.push_back(std::move(c));
  };
  push("d1_S_finite_difference", first, tolerances.first);
  push("d1_SX_finite_difference", first_sx, tolerances.first);
  push("d1_XtS_finite_difference", first_xts, tolerances.first);
  push("d1_XtSX_finite_difference", first_xtsx, tolerances.first);
  push("d2_S_finite_difference", second, tolerances.second);
  push("d3_S_finite_difference", third, tolerances.third);
  return report;
}

}  // namespace rmtfree
