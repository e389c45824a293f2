#include <doctest.h>

#include <cmath>
#include <random>

#include "rmtfree/ensemble.hpp"
#include "rmtfree/resolvent.hpp"

using namespace rmtfree;

TEST_CASE("tail law moments follow the Weibull formula") {
  for (double alpha : {0.5, 1.0, 1.5, 1.9}) {
    for (double a : {0.5, 1.0, 3.0}) {
      TailLaw law{alpha, a, 0.5, true};
      for (double k : {1.0, 2.0, 4.0})
        CHECK(law.raw_modulus_moment(k) ==
              doctest::Approx(std::pow(a, -k / alpha) * std::tgamma(1.0 + k / alpha)).epsilon(1e-12));
      CHECK(law.raw_mean() == doctest::Approx(0.0).epsilon(1e-14));
    }
  }
  TailLaw skew{1.0, 1.0, 0.75, false};
  CHECK(skew.raw_mean() == doctest::Approx(0.5));
  CHECK(skew.raw_variance() == doctest::Approx(2.0 - 0.25));
  CHECK_THROWS_AS((TailLaw{0.0, 1.0, 0.5, true}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TailLaw{2.0, 1.0, 0.5, true}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TailLaw{1.0, -1.0, 0.5, true}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((TailLaw{1.0, 1.0, 1.5, true}.validate()), std::invalid_argument);
}

TEST_CASE("normalized tail draws have unit variance and the right tail") {
  TailLaw law{1.5, 1.0, 0.5, true};
  Engine rng = make_engine(1, "test", 0);
  const int N = 200000;
  double s1 = 0.0, s2 = 0.0;
  int over = 0;
  const double t = 1.2;
  for (int i = 0; i < N; ++i) {
    const double x = law.sample(rng);
    s1 += x;
    s2 += x * x;
    if (std::abs(x) / law.scale() >= t) ++over;
  }
  CHECK(std::abs(s1 / N) < 5.0 / std::sqrt(N));
  CHECK(s2 / N == doctest::Approx(1.0).epsilon(0.02));
  const double q = std::exp(-std::pow(t, 1.5));
  CHECK(std::abs(over / double(N) - q) < 5.0 * std::sqrt(q * (1 - q) / N));
}

TEST_CASE("sampling is a pure function of seed and trial index") {
  EnsembleSpec spec;
  spec.n = 6;
  spec.p = 9;
  spec.seed = 42;
  spec.trials = 8;
  spec.entry_law = TailLaw{};
  const Eigen::MatrixXd a = sample_matrix(spec, 3), b = sample_matrix(spec, 3);
  CHECK(a == b);
  CHECK(a != sample_matrix(spec, 4));
  CHECK_THROWS_AS(sample_matrix(spec, 8), std::invalid_argument);
  spec.seed = 43;
  CHECK(a != sample_matrix(spec, 3));
  spec.entry_law = ZeroEntries{};
  CHECK(sample_matrix(spec, 0).isZero());
  spec.entry_law = Rademacher{};
  CHECK((sample_matrix(spec, 0).array().abs() == 1.0).all());
}

TEST_CASE("information plus noise adds the deformation") {
  EnsembleSpec spec;
  spec.n = 4;
  spec.p = 16;
  spec.seed = 5;
  spec.trials = 4;
  spec.deformation = Eigen::MatrixXd::Identity(4, 16);
  const Eigen::MatrixXd X = information_plus_noise(spec, 2);
  CHECK((X - sample_matrix(spec, 2) / 4.0 - spec.deformation).cwiseAbs().maxCoeff() < 1e-15);
  spec.deformation = Eigen::MatrixXd::Identity(3, 16);
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("gram eigenvalues match the direct decomposition") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (auto [n, p] : {std::pair{5, 9}, std::pair{9, 5}, std::pair{6, 6}}) {
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index k = 0; k < X.size(); ++k) X.data()[k] = normal(rng);
    const Eigen::VectorXd ev = gram_eigenvalues(X);
    REQUIRE(ev.size() == n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X * X.transpose());
    for (int i = 0; i < n; ++i) CHECK(ev(i) == doctest::Approx(std::max(0.0, es.eigenvalues()(i))).epsilon(1e-10).scale(1.0));
    const Measure mu = gram_spectrum(X);
    double mass = 0.0;
    for (const Atom& at : mu.atoms()) mass += at.weight;
    CHECK(mass == doctest::Approx(1.0));
    const Complex z(1.0, 2.0);
    CHECK(std::abs(stieltjes(mu, z) - resolvent(X, z).trace() / double(n)) < 1e-12);
  }
}

TEST_CASE("hermitization spectrum is the symmetrized singular values") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal;
  for (auto [n, p] : {std::pair{3, 5}, std::pair{5, 3}}) {
    Eigen::MatrixXd M(n, p);
    for (Eigen::Index k = 0; k < M.size(); ++k) M.data()[k] = normal(rng);
    const Hermitization h = hermitize(M);
    REQUIRE(h.matrix.rows() == n + p);
    CHECK(h.matrix.topRightCorner(n, p) == M);
    CHECK(h.matrix.bottomLeftCorner(p, n) == M.transpose());
    CHECK(h.matrix.topLeftCorner(n, n).isZero());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix);
    const Complex z(0.3, 0.7);
    Complex direct = 0.0;
    for (int i = 0; i < n + p; ++i) direct += 1.0 / (z - es.eigenvalues()(i));
    direct /= double(n + p);
    CHECK(std::abs(stieltjes(h.spectrum, z) - direct) < 1e-12);
    CHECK(std::abs(stieltjes(h.spectrum, z) + stieltjes(h.spectrum, -z)) < 1e-12);
  }
}

TEST_CASE("singular value distribution has min(n, p) atoms") {
  Eigen::MatrixXd A(2, 3);
  A << 3, 0, 0, 0, 4, 0;
  const Measure mu = singular_value_dist(A);
  CHECK(mu.atoms().size() == 2);
  const Complex ref = 0.5 / Complex(-3.0, 1.0) + 0.5 / Complex(-4.0, 1.0);
  CHECK(std::abs(stieltjes(mu, {0.0, 1.0}) - ref) < 1e-15);
}

TEST_CASE("Monte Carlo Stieltjes estimate") {
  EnsembleSpec spec;
  spec.n = 20;
  spec.p = 40;
  spec.seed = 3;
  spec.trials = 16;
  const EvaluationDomain d = EvaluationDomain::standard();
  const StieltjesEstimate est = mean_stieltjes_mc(spec, d);
  REQUIRE(est.points.size() == d.points().size());
  REQUIRE(est.std_error.has_value());
  CHECK(est.trials_used == 16);
  CHECK(est.failures == 0);
  // Recompute the mean by hand at one point.
  const std::size_t i = 17;
  Complex ref = 0.0;
  for (std::size_t t = 0; t < 16; ++t)
    ref += stieltjes(spectral_sample(spec, t), est.points[i]);
  CHECK(std::abs(est.mean[i] - ref / 16.0) < 1e-13);
  spec.trials = 1;
  CHECK_FALSE(mean_stieltjes_mc(spec, d).std_error.has_value());
}
