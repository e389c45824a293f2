#include "rmtfree/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rmtfree/parallel.hpp"

namespace rmtfree {

namespace {

constexpr double kNegativeEigenTolerance = 1e-10;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void TailLaw::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("tail law: alpha must lie in (0, 2)");
  if (!(a > 0.0) || !std::isfinite(a))
    throw std::invalid_argument("tail law: a must be positive and finite");
  if (!(prob_plus >= 0.0 && prob_plus <= 1.0))
    throw std::invalid_argument("tail law: prob_plus must lie in [0, 1]");
}

double TailLaw::raw_modulus_moment(double k) const {
  return std::pow(a, -k / alpha) * std::tgamma(1.0 + k / alpha);
}

double TailLaw::raw_mean() const {
  return (2.0 * prob_plus - 1.0) * raw_modulus_moment(1.0);
}

double TailLaw::raw_variance() const {
  const double m = raw_mean();
  return raw_modulus_moment(2.0) - m * m;
}

double TailLaw::scale() const {
  return normalize_variance ? 1.0 / std::sqrt(raw_variance()) : 1.0;
}

double TailLaw::raw_modulus(Engine& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = 1.0 - unit(rng);  // (0, 1]
  return std::pow(-std::log(u) / a, 1.0 / alpha);
}

double TailLaw::sample(Engine& rng) const {
  std::bernoulli_distribution plus(prob_plus);
  const double r = raw_modulus(rng);
  return (plus(rng) ? r : -r) * scale();
}

std::string entry_law_name(const EntryLaw& law) {
  return std::visit(overloaded{
                        [](const StandardGaussian&) { return std::string("gaussian"); },
                        [](const TailLaw&) { return std::string("tail"); },
                        [](const Rademacher&) { return std::string("rademacher"); },
                        [](const ZeroEntries&) { return std::string("zero"); },
                    },
                    law);
}

void EnsembleSpec::validate() const {
  if (n == 0 || p == 0) throw std::invalid_argument("ensemble: n and p must be positive");
  if (trials == 0) throw std::invalid_argument("ensemble: trials must be positive");
  if (has_deformation() &&
      (static_cast<std::size_t>(deformation.rows()) != n ||
       static_cast<std::size_t>(deformation.cols()) != p))
    throw std::invalid_argument("ensemble: deformation must be n x p");
  if (const auto* tail = std::get_if<TailLaw>(&entry_law)) tail->validate();
}

Eigen::MatrixXd sample_matrix(const EnsembleSpec& spec, std::size_t trial_index) {
  spec.validate();
  if (trial_index >= spec.trials)
    throw std::invalid_argument("sample_matrix: trial index out of range");
  Engine rng = make_engine(spec.seed, "entries", trial_index);
  const auto rows = static_cast<Eigen::Index>(spec.n);
  const auto cols = static_cast<Eigen::Index>(spec.p);
  Eigen::MatrixXd Y(rows, cols);
  std::visit(overloaded{
                 [&](const StandardGaussian&) {
                   std::normal_distribution<double> normal(0.0, 1.0);
                   for (Eigen::Index k = 0; k < Y.size(); ++k) Y.data()[k] = normal(rng);
                 },
                 [&](const TailLaw& law) {
                   for (Eigen::Index k = 0; k < Y.size(); ++k) Y.data()[k] = law.sample(rng);
                 },
                 [&](const Rademacher&) {
                   std::bernoulli_distribution coin(0.5);
                   for (Eigen::Index k = 0; k < Y.size(); ++k)
                     Y.data()[k] = coin(rng) ? 1.0 : -1.0;
                 },
                 [&](const ZeroEntries&) { Y.setZero(); },
             },
             spec.entry_law);
  return Y;
}

Eigen::MatrixXd information_plus_noise(const EnsembleSpec& spec,
                                       std::size_t trial_index) {
  Eigen::MatrixXd X = sample_matrix(spec, trial_index) /
                      std::sqrt(static_cast<double>(spec.p));
  if (spec.has_deformation()) X += spec.deformation;
  return X;
}

Eigen::VectorXd gram_eigenvalues(const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::MatrixXd gram(std::min(n, p), std::min(n, p));
  if (n <= p)
    gram.noalias() = X * X.transpose();
  else
    gram.noalias() = X.transpose() * X;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("gram_eigenvalues: eigensolver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  const double top = ev.size() ? std::max(1.0, ev.maxCoeff()) : 1.0;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  // Zeros first, then the (ascending) Gram eigenvalues.
  const Eigen::Index offset = n - ev.size();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double v = ev[i];
    if (v < 0.0) {
      if (v < -kNegativeEigenTolerance * top)
        throw NumericalError("gram_eigenvalues: negative eigenvalue " +
                             std::to_string(v));
      v = 0.0;
    }
    out[offset + i] = v;
  }
  return out;
}

Measure gram_spectrum(const Eigen::MatrixXd& X) {
  const Eigen::VectorXd ev = gram_eigenvalues(X);
  return Measure::empirical(std::span<const double>(ev.data(), ev.size()));
}

Measure spectral_sample(const EnsembleSpec& spec, std::size_t trial_index) {
  return gram_spectrum(information_plus_noise(spec, trial_index));
}

Measure singular_value_dist(const Eigen::MatrixXd& A) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A);
  const Eigen::VectorXd& sv = svd.singularValues();
  return Measure::empirical(std::span<const double>(sv.data(), sv.size()));
}

Hermitization hermitize(const Eigen::MatrixXd& M) {
  const Eigen::Index n = M.rows();
  const Eigen::Index p = M.cols();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n + p, n + p);
  H.topRightCorner(n, p) = M;
  H.bottomLeftCorner(p, n) = M.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("hermitize: eigensolver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return {std::move(H),
          Measure::empirical(std::span<const double>(ev.data(), ev.size()))};
}

std::vector<Complex> stieltjes_on(const Eigen::VectorXd& eigenvalues,
                                  const std::vector<Complex>& points) {
  std::vector<Complex> out(points.size());
  const double w = 1.0 / static_cast<double>(eigenvalues.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    Complex g = 0.0;
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k)
      g += 1.0 / (points[i] - eigenvalues[k]);
    out[i] = w * g;
  }
  return out;
}

StieltjesEstimate mean_stieltjes_mc(const EnsembleSpec& spec,
                                    const EvaluationDomain& domain) {
  spec.validate();
  const auto& points = domain.points();
  std::vector<std::vector<Complex>> per_trial(spec.trials);
  std::vector<char> ok(spec.trials, 0);
  parallel_for(spec.trials, [&](std::size_t trial) {
    try {
      per_trial[trial] =
          stieltjes_on(gram_eigenvalues(information_plus_noise(spec, trial)), points);
      ok[trial] = 1;
    } catch (const NumericalError&) {
      ok[trial] = 0;
    }
  });
  StieltjesEstimate est;
  est.points = points;
  est.mean.assign(points.size(), Complex{});
  for (std::size_t t = 0; t < spec.trials; ++t) {
    if (!ok[t]) {
      ++est.failures;
      continue;
    }
    ++est.trials_used;
    for (std::size_t i = 0; i < points.size(); ++i) est.mean[i] += per_trial[t][i];
  }
  if (est.trials_used == 0) throw NumericalError("mean_stieltjes_mc: every trial failed");
  const double count = static_cast<double>(est.trials_used);
  for (Complex& m : est.mean) m /= count;
  if (est.trials_used >= 2) {
    std::vector<double> se(points.size(), 0.0);
    for (std::size_t t = 0; t < spec.trials; ++t) {
      if (!ok[t]) continue;
      for (std::size_t i = 0; i < points.size(); ++i)
        se[i] += std::norm(per_trial[t][i] - est.mean[i]);
    }
    for (double& v : se) v = std::sqrt(v / (count - 1.0) / count);
    est.std_error = std::move(se);
  }
  return est;
}

}  // namespace rmtfree
