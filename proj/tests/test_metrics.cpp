#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rmtfree/ensemble.hpp"
#include "rmtfree/freeconv.hpp"
#include "rmtfree/inequalities.hpp"
#include "rmtfree/metrics.hpp"

using namespace rmtfree;

namespace {

Measure random_atomic(std::mt19937_64& rng, int count, bool equal_weights) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> w(0.1, 1.0);
  std::vector<Atom> atoms;
  double total = 0.0;
  for (int i = 0; i < count; ++i) {
    atoms.push_back({normal(rng), equal_weights ? 1.0 : w(rng)});
    total += atoms.back().weight;
  }
  for (Atom& a : atoms) a.weight /= total;
  return Measure::atomic(atoms);
}

Eigen::MatrixXd gaussian(std::mt19937_64& rng, int n, int p) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd A(n, p);
  for (Eigen::Index k = 0; k < A.size(); ++k) A.data()[k] = normal(rng);
  return A;
}

Eigen::MatrixXd symmetric(std::mt19937_64& rng, int n) {
  const Eigen::MatrixXd A = gaussian(rng, n, n);
  return (A + A.transpose()) / 2.0;
}

}  // namespace

TEST_CASE("classical distances on small examples") {
  const ClassicalDistances d = classical_distances(Measure::dirac(0.0), Measure::dirac(1.0));
  CHECK(d.ks == doctest::Approx(1.0));
  CHECK(d.w1 == doctest::Approx(1.0));
  CHECK(d.w2 == doctest::Approx(1.0));
  const Measure a = Measure::atomic({{0.0, 0.5}, {1.0, 0.5}});
  const Measure b = Measure::atomic({{0.0, 0.5}, {2.0, 0.5}});
  CHECK(w2_distance(a, b) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(std::sqrt(oracle::w2_sq_exhaustive({0.0, 1.0}, {0.0, 2.0})) == doctest::Approx(std::sqrt(0.5)));
  const ClassicalDistances same = classical_distances(a, a);
  CHECK(same.ks == 0.0);
  CHECK(same.w1 == 0.0);
  CHECK(same.w2 == 0.0);
  CHECK_THROWS_AS(classical_distances(Measure::semicircle(), a), std::invalid_argument);
}

TEST_CASE("W2 on equal-count empirical measures matches exhaustive matching") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 200; ++rep) {
    const int k = 1 + rep % 6;
    std::vector<double> x(k), y(k);
    for (double& v : x) v = normal(rng);
    for (double& v : y) v = 2.0 * normal(rng);
    const double w2 = w2_distance(Measure::empirical(x), Measure::empirical(y));
    CHECK(w2 * w2 == doctest::Approx(oracle::w2_sq_exhaustive(x, y)).epsilon(1e-10));
  }
}

TEST_CASE("Levy distance") {
  CHECK(levy_distance(Measure::dirac(0.0), Measure::dirac(1.0)) == doctest::Approx(1.0));
  CHECK(levy_distance(Measure::dirac(0.0), Measure::dirac(0.3)) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(levy_distance(Measure::dirac(0.0), Measure::dirac(5.0)) == doctest::Approx(1.0));
  // Half the mass moved far away: the CDF gap of 1/2 dominates.
  const Measure a = Measure::atomic({{0.0, 0.5}, {1.0, 0.5}});
  const Measure b = Measure::atomic({{0.0, 0.5}, {9.0, 0.5}});
  CHECK(levy_distance(a, b) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(levy_distance(a, a) == 0.0);
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const Measure x = random_atomic(rng, 4, false), y = random_atomic(rng, 3, true);
    const double l = levy_distance(x, y);
    CHECK(l == doctest::Approx(levy_distance(y, x)).epsilon(1e-12));
    CHECK(l <= ks_distance(x, y) + 1e-12);
  }
}

TEST_CASE("W2 with unequal counts uses the quantile coupling") {
  // Mass 1/2 at 0 and 1/2 at 1 against three equal atoms at 0, 1/2, 1:
  // quantile pieces [0,1/3) 0-0, [1/3,1/2) 0-1/2, [1/2,2/3) 1-1/2, [2/3,1) 1-1.
  const Measure a = Measure::atomic({{0.0, 0.5}, {1.0, 0.5}});
  const std::vector<double> loc = {0.0, 0.5, 1.0};
  const Measure b = Measure::empirical(loc);
  CHECK(w2_distance(a, b) == doctest::Approx(std::sqrt(2.0 * (1.0 / 6.0) * 0.25)).epsilon(1e-13));
  CHECK(w1_distance(a, b) == doctest::Approx(2.0 * (1.0 / 6.0) * 0.5).epsilon(1e-13));
  CHECK(ks_distance(a, b) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("dst between two point masses") {
  const EvaluationDomain d = EvaluationDomain::standard();
  const DstResult r = dst_distance(Measure::dirac(0.0), Measure::dirac(1.0), d);
  CHECK(r.value > 0.0);
  CHECK(r.value <= 1.0);
  CHECK(r.value <= 1.0 / (d.s() * d.s()));
  CHECK(r.tail_bound == doctest::Approx(2.0 / d.im_max()));
  CHECK(d.contains(r.argmax_z));
  const EvaluationDomain dense(d.s(), d.t(), d.im_max(), 10 * d.levels(), 10 * d.per_level());
  const DstResult fine = dst_distance(Measure::dirac(0.0), Measure::dirac(1.0), dense);
  MESSAGE("dst grid ", r.value, " dense ", fine.value, " gap ", fine.value - r.value);
  CHECK(std::abs(fine.value - r.value) <= 1e-6);
  CHECK(dst_distance(Measure::semicircle(), Measure::semicircle(), d).value == 0.0);
}

TEST_CASE("dst of Marchenko-Pastur against the inverted convolution") {
  const EvaluationDomain d = EvaluationDomain::standard();
  const std::vector<double> ladder = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
  const Measure inv = invert_stieltjes(
      [](Complex z) { return rectangular_transform_at(Measure::dirac(0.0), 1.0, z).value; }, 0.0,
      4.5, ladder);
  const double value = dst_distance(Measure::marchenko_pastur(1.0), inv, d).value;
  MESSAGE("dst(MP(1), inverted) = ", value);
  CHECK(value <= 1e-6);
}

TEST_CASE("dst is a symmetric metric dominated by KS and W1") {
  std::mt19937_64 rng(33);
  const EvaluationDomain d = EvaluationDomain::standard();
  for (int rep = 0; rep < 200; ++rep) {
    const Measure a = random_atomic(rng, 1 + rep % 7, rep % 2 == 0);
    const Measure b = random_atomic(rng, 1 + rep % 5, false);
    const Measure c = random_atomic(rng, 3, true);
    const double ab = dst_distance(a, b, d).value;
    CHECK(ab == dst_distance(b, a, d).value);
    CHECK(ab <= dst_distance(a, c, d).value + dst_distance(c, b, d).value + 1e-15);
    const DistanceReport rep_ab = distance_report(a, b, d);
    REQUIRE(rep_ab.classical.has_value());
    CHECK(ab <= std::min(rep_ab.classical->ks, rep_ab.classical->w1) + 1e-9);
  }
  CHECK_FALSE(distance_report(Measure::semicircle(), Measure::dirac(0.0), d).classical.has_value());
}

TEST_CASE("dst_from_values breaks ties at the lowest index") {
  const EvaluationDomain d = EvaluationDomain::standard();
  std::vector<Complex> a(d.size(), Complex(1.0, 0.0)), b(d.size(), Complex(0.0, 0.0));
  const DstResult r = dst_from_values(a, b, d);
  CHECK(r.argmax_index == 0);
  CHECK(r.value == 1.0);
  b.pop_back();
  CHECK_THROWS_AS(dst_from_values(a, b, d), std::invalid_argument);
}

TEST_CASE("inequality audit examples") {
  Eigen::MatrixXd D(2, 2);
  D << 1, 0, 0, -2;
  const InequalityAudit s = inequality_audit(D, D, InequalityKind::Schatten, 1.0);
  CHECK(s.lhs == doctest::Approx(1.5));
  CHECK(s.rhs == doctest::Approx(1.5));
  CHECK(s.holds);

  std::mt19937_64 rng(1);
  const Eigen::MatrixXd A = gaussian(rng, 10, 15), B = gaussian(rng, 10, 15);
  const InequalityAudit hw = inequality_audit(A, B, InequalityKind::HwCov);
  const double w2 = w2_distance(gram_spectrum(A), gram_spectrum(B));
  CHECK(hw.lhs == doctest::Approx(std::pow(w2, 4)));
  CHECK(hw.rhs == doctest::Approx(2.0 / 100.0 * (A * A.transpose() + B * B.transpose()).trace() *
                                  ((A - B) * (A - B).transpose()).trace()));
  CHECK(hw.holds);

  const Eigen::MatrixXd P = A + gaussian(rng, 10, 1) * gaussian(rng, 1, 15);
  const InequalityAudit rc = inequality_audit(A, P, InequalityKind::RankCov);
  CHECK(rc.rhs == doctest::Approx(0.1));
  CHECK(rc.holds);

  // The W2 form fails on scalars; the Levy form holds there.
  Eigen::MatrixXd three(1, 1), two(1, 1);
  three << 3.0;
  two << 2.0;
  const InequalityAudit scalar = inequality_audit(three, two, InequalityKind::HwCov);
  CHECK(scalar.lhs == doctest::Approx(625.0));
  CHECK(scalar.rhs == doctest::Approx(26.0));
  CHECK_FALSE(scalar.holds);
  CHECK(scalar.slack < 0.0);
  CHECK(inequality_audit(three, two, InequalityKind::LevyCov).holds);

  CHECK_THROWS_AS(inequality_audit(A, B, InequalityKind::RankSym), std::invalid_argument);
  CHECK_THROWS_AS(inequality_audit(A, gaussian(rng, 10, 14), InequalityKind::HwCov),
                  std::invalid_argument);
  CHECK_THROWS_AS(inequality_audit(D, D, InequalityKind::Schatten, 2.5), std::invalid_argument);
  CHECK(inequality_kind_from_string(to_string(InequalityKind::HwSym)) == InequalityKind::HwSym);
}

TEST_CASE("all inequality kinds hold on random instances") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(1, 12);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = dim(rng), p = dim(rng);
    const Eigen::MatrixXd S1 = symmetric(rng, n);
    Eigen::MatrixXd S2 = S1;
    if (rep % 3 == 0) {
      const Eigen::VectorXd v = gaussian(rng, n, 1);
      S2 += v * v.transpose();
    } else {
      S2 = symmetric(rng, n);
    }
    const Eigen::MatrixXd A = gaussian(rng, n, p);
    const Eigen::MatrixXd B = rep % 2 ? gaussian(rng, n, p) : A + gaussian(rng, n, 1) * gaussian(rng, 1, p);
    CHECK(inequality_audit(S1, S2, InequalityKind::RankSym).holds);
    CHECK(inequality_audit(S1, S2, InequalityKind::HwSym).holds);
    CHECK(inequality_audit(A, B, InequalityKind::RankCov).holds);
    CHECK(inequality_audit(A, B, InequalityKind::LevyCov).holds);
    for (double q : {0.5, 1.0, 2.0}) CHECK(inequality_audit(S1, S1, InequalityKind::Schatten, q).holds);
  }
}

TEST_CASE("trace inequalities hold for real and complex matrices") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> dim(1, 8);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = dim(rng), p = dim(rng);
    const auto real = [&](int r, int c) { return gaussian(rng, r, c); };
    for (const TraceInequality& t : trace_inequalities<double>(real(n, p), real(n, p), real(p, n), real(n, n))) {
      INFO(t.name, " lhs=", t.lhs, " rhs=", t.rhs);
      CHECK(t.holds);
    }
    const auto cplx = [&](int r, int c) {
      Eigen::MatrixXcd M(r, c);
      for (Eigen::Index k = 0; k < M.size(); ++k) M.data()[k] = Complex(normal(rng), normal(rng));
      return M;
    };
    const auto out = trace_inequalities<Complex>(cplx(n, p), cplx(n, p), cplx(p, n), cplx(n, n));
    CHECK(out.size() == 11);
    for (const TraceInequality& t : out) {
      INFO(t.name, " lhs=", t.lhs, " rhs=", t.rhs);
      CHECK(t.holds);
    }
  }
}
