#include "rmtfree/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "rmtfree/metrics.hpp"
#include "rmtfree/parallel.hpp"
#include "rmtfree/resolvent.hpp"
#include "rmtfree/rng.hpp"

namespace rmtfree {

namespace {

std::size_t columns_for(std::size_t n, double c) {
  const double p = static_cast<double>(n) / c;
  const auto rounded = static_cast<std::size_t>(std::llround(p));
  if (rounded == 0 || std::abs(p - static_cast<double>(rounded)) > 1e-9)
    throw std::invalid_argument("n / c must be a positive integer on the ladder");
  return rounded;
}

double sample_variance(const std::vector<Complex>& x, const std::vector<std::size_t>* idx) {
  const std::size_t m = idx ? idx->size() : x.size();
  Complex mean{};
  for (std::size_t k = 0; k < m; ++k) mean += x[idx ? (*idx)[k] : k];
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (std::size_t k = 0; k < m; ++k) ss += std::norm(x[idx ? (*idx)[k] : k] - mean);
  return ss / static_cast<double>(m - 1);
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::string to_string(ScalingMode mode) {
  return mode == ScalingMode::Gaussian ? "gaussian" : "general_tail";
}

std::string to_string(DeformationFamily family) {
  switch (family) {
    case DeformationFamily::Zero: return "zero";
    case DeformationFamily::RankOneBounded: return "rank1_bounded";
    case DeformationFamily::RankOneFrobenius: return "rank1_frobenius";
  }
  return "unknown";
}

ScalingMode scaling_mode_from_string(const std::string& name) {
  if (name == "gaussian") return ScalingMode::Gaussian;
  if (name == "general_tail") return ScalingMode::GeneralTail;
  throw std::invalid_argument("unknown scaling mode: " + name);
}

DeformationFamily deformation_family_from_string(const std::string& name) {
  for (auto f : {DeformationFamily::Zero, DeformationFamily::RankOneBounded,
                 DeformationFamily::RankOneFrobenius})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown deformation family: " + name);
}

Eigen::MatrixXd make_deformation(DeformationFamily family, std::size_t n, std::size_t p) {
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(p);
  switch (family) {
    case DeformationFamily::Zero: return {};
    case DeformationFamily::RankOneBounded: {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
      M(0, 0) = 1.0;
      return M;
    }
    case DeformationFamily::RankOneFrobenius: {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
      const double dn = static_cast<double>(n);
      M(0, 0) = std::sqrt(dn) * std::log(dn);
      return M;
    }
  }
  return {};
}

double gaussian_rate_envelope(std::size_t n, double frobenius) {
  const double dn = static_cast<double>(n);
  return 1.0 / dn + frobenius / std::pow(dn, 1.25);
}

double ScalingConfig::target() const {
  if (target_slope) return *target_slope;
  return mode == ScalingMode::Gaussian ? -0.7 : -0.4;
}

void ScalingConfig::validate() const {
  if (ladder.size() < 3) throw std::invalid_argument("scaling ladder needs at least 3 points");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i] <= ladder[i - 1])
      throw std::invalid_argument("scaling ladder must be strictly increasing");
  if (!(c > 0.0)) throw std::invalid_argument("scaling: c must be positive");
  if (trials < 2) throw std::invalid_argument("scaling: need at least 2 trials");
  for (std::size_t n : ladder) columns_for(n, c);
  if (mode == ScalingMode::GeneralTail) tail.validate();
  solver.validate();
}

ScalingReport bound_scaling_experiment(const ScalingConfig& config) {
  config.validate();
  ScalingReport report;
  report.mode = config.mode;
  report.family = config.family;
  report.c = config.c;
  report.trials = config.trials;
  report.target_slope = config.target();

  SolverConfig solver = config.solver;
  solver.domain = config.domain;

  for (std::size_t n : config.ladder) {
    EnsembleSpec spec;
    spec.n = n;
    spec.p = columns_for(n, config.c);
    if (config.mode == ScalingMode::Gaussian)
      spec.entry_law = StandardGaussian{};
    else
      spec.entry_law = config.tail;
    spec.deformation = make_deformation(config.family, n, spec.p);
    spec.seed = derive_seed(config.seed, "scaling", n);
    spec.trials = config.trials;

    ScalingPoint point;
    point.n = n;
    point.p = spec.p;
    point.frobenius = spec.has_deformation() ? spec.deformation.norm() : 0.0;
    point.envelope = gaussian_rate_envelope(n, point.frobenius);

    const StieltjesEstimate est = mean_stieltjes_mc(spec, config.domain);
    const Measure signal = spec.has_deformation() ? gram_spectrum(spec.deformation)
                                                  : Measure::dirac(0.0);
    const ConvolutionResult limit = solve_rectangular(signal, config.c, solver);
    if (!limit.all_converged())
      throw NumericalError("scaling: subordination solver did not converge at n = " +
                           std::to_string(n));
    const DstResult d = dst_from_values(est.mean, limit.values, config.domain);
    point.distance = d.value;
    point.argmax_z = d.argmax_z;
    point.std_error = est.std_error ? (*est.std_error)[d.argmax_index] : 0.0;
    point.trials_used = est.trials_used;
    point.failures = est.failures;
    report.points.push_back(point);
  }

  std::vector<double> lx, ly;
  for (const ScalingPoint& p : report.points) {
    if (p.trials_used >= 2 && p.distance > 0.0) {
      lx.push_back(std::log(static_cast<double>(p.n)));
      ly.push_back(std::log(p.distance));
    }
  }
  if (lx.size() < 3) throw NumericalError("scaling: fewer than 3 usable ladder points, no fit");
  report.fit = fit_line(lx, ly);
  const double half = student_t_975(report.fit.dof) * report.fit.slope_stderr;
  report.slope_ci_low = report.fit.slope - half;
  report.slope_ci_high = report.fit.slope + half;
  report.pass = report.fit.slope <= report.target_slope;

  report.envelope_nonincreasing = true;
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const ScalingPoint& p = report.points[i];
    report.envelope_constant = std::max(report.envelope_constant, p.distance / p.envelope);
    if (i > 0) {
      const ScalingPoint& q = report.points[i - 1];
      const double pooled = std::hypot(p.std_error / p.envelope, q.std_error / q.envelope);
      if (p.distance / p.envelope > q.distance / q.envelope + 2.0 * pooled)
        report.envelope_nonincreasing = false;
    }
  }
  return report;
}

ScalingComparisonReport compare_scaling(const ScalingReport& gaussian,
                                        const ScalingReport& tail) {
  if (gaussian.points.size() != tail.points.size())
    throw std::invalid_argument("compare_scaling: ladders differ");
  ScalingComparisonReport r;
  r.ordering_holds = true;
  r.distinguishable = true;
  for (std::size_t i = 0; i < gaussian.points.size(); ++i) {
    const ScalingPoint& g = gaussian.points[i];
    const ScalingPoint& t = tail.points[i];
    if (g.n != t.n) throw std::invalid_argument("compare_scaling: ladders differ");
    ScalingComparison c;
    c.n = g.n;
    c.gaussian = g.distance;
    c.tail = t.distance;
    c.pooled_std_error = std::hypot(g.std_error, t.std_error);
    c.z_score = c.pooled_std_error > 0.0 ? (t.distance - g.distance) / c.pooled_std_error : 0.0;
    if (g.distance > t.distance + 2.0 * c.pooled_std_error) r.ordering_holds = false;
    if (!(t.distance - g.distance > 2.0 * c.pooled_std_error)) r.distinguishable = false;
    r.points.push_back(c);
  }
  return r;
}

double u_of_z(Complex z) {
  const double y = std::abs(z.imag());
  return std::abs(z) / std::pow(y, 4) + 1.0 / std::pow(y, 3);
}

double v_of_z(Complex z) {
  const double y = std::abs(z.imag());
  const double m = std::abs(z);
  const double third = m / (y * y) + 1.0 / y;
  return std::max({1.0 / (y * y), m / (y * y * y) + 1.0 / (y * y), third * third});
}

double concentration1_bound(const Eigen::MatrixXd& U, Complex z, std::size_t n,
                            std::size_t p, double sigma_sq) {
  const double dn = static_cast<double>(n);
  const double cn = dn / static_cast<double>(p);
  return 4.0 * sigma_sq * cn / std::pow(dn, 2.5) * u_of_z(z) * operator_norm(U) * U.norm();
}

double concentration2bis_bound(const Eigen::MatrixXd& V, Complex z, std::size_t n,
                               std::size_t p, double sigma_sq) {
  const double dn = static_cast<double>(n);
  const double cn = dn / static_cast<double>(p);
  const double op = operator_norm(V);
  const double tr = V.squaredNorm();
  const double term = std::max({op * std::sqrt(tr) / std::sqrt(dn),
                                std::pow(op, 1.5) * std::pow(tr, 0.25) / std::pow(dn, 0.25),
                                std::pow(op, 1.25) * std::pow(tr, 0.375) / std::pow(dn, 0.375)});
  return 9.0 * sigma_sq * cn / (dn * dn) * v_of_z(z) * term;
}

double concentration2_bound(const Eigen::MatrixXd& V, Complex z, std::size_t n,
                            std::size_t p, double sigma_sq) {
  const double dn = static_cast<double>(n);
  const double cn = dn / static_cast<double>(p);
  return 9.0 * sigma_sq * cn / std::pow(dn, 2.25) * v_of_z(z) * V.squaredNorm();
}

void ConcentrationConfig::validate() const {
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(p);
  if (n == 0 || p == 0) throw std::invalid_argument("concentration: n and p must be positive");
  if (U.size() != 0 && (U.rows() != rows || U.cols() != rows))
    throw std::invalid_argument("concentration: U must be n x n");
  if (V.size() != 0 && (V.rows() != rows || V.cols() != cols))
    throw std::invalid_argument("concentration: V must be n x p");
  if (deformation.size() != 0 && (deformation.rows() != rows || deformation.cols() != cols))
    throw std::invalid_argument("concentration: deformation must be n x p");
  if (z_set.empty()) throw std::invalid_argument("concentration: empty z set");
  for (Complex z : z_set)
    if (z.imag() == 0.0) throw std::invalid_argument("concentration: z must be non-real");
  if (trials < 2) throw std::invalid_argument("concentration: need at least 2 trials");
  if (bootstrap < 10) throw std::invalid_argument("concentration: need at least 10 bootstrap draws");
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("concentration: sigma_sq must be positive");
}

bool ConcentrationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ConcentrationCheck& c) { return c.pass; });
}

const ConcentrationCheck* ConcentrationReport::find(const std::string& target, Complex z) const {
  for (const auto& c : checks)
    if (c.target == target && c.z == z) return &c;
  return nullptr;
}

ConcentrationReport concentration_audit(const ConcentrationConfig& config) {
  config.validate();
  EnsembleSpec spec;
  spec.n = config.n;
  spec.p = config.p;
  spec.entry_law = StandardGaussian{};
  spec.deformation = config.deformation;
  spec.seed = config.seed;
  spec.trials = config.trials;

  const std::size_t nz = config.z_set.size();
  const bool with_u = config.U.size() != 0;
  const bool with_v = config.V.size() != 0;
  const double dn = static_cast<double>(config.n);
  const Eigen::MatrixXcd Uc = config.U.cast<Complex>();
  const Eigen::MatrixXcd Vc = config.V.cast<Complex>();

  // samples[t][2 * zi + {0: Tr(SU), 1: Tr(X^t S V)}]
  std::vector<std::vector<Complex>> samples(config.trials);
  std::vector<char> ok(config.trials, 0);
  parallel_for(config.trials, [&](std::size_t t) {
    try {
      const Eigen::MatrixXd X = information_plus_noise(spec, t);
      std::vector<Complex> row(2 * nz);
      for (std::size_t zi = 0; zi < nz; ++zi) {
        const Eigen::MatrixXcd S = resolvent(X, config.z_set[zi]);
        if (with_u) row[2 * zi] = (S * Uc).trace() / dn;
        if (with_v) row[2 * zi + 1] = (X.transpose().cast<Complex>() * S * Vc).trace() / dn;
      }
      samples[t] = std::move(row);
      ok[t] = 1;
    } catch (const std::exception&) {
      ok[t] = 0;
    }
  });

  ConcentrationReport report;
  std::vector<std::size_t> good;
  for (std::size_t t = 0; t < config.trials; ++t) {
    if (ok[t]) good.push_back(t);
    else ++report.failures;
  }
  report.trials_used = good.size();
  if (good.size() < 2) throw NumericalError("concentration: fewer than 2 successful trials");

  auto audit = [&](std::size_t column, const std::string& target, Complex z, double bound,
                   std::size_t stream) {
    std::vector<Complex> x;
    x.reserve(good.size());
    for (std::size_t t : good) x.push_back(samples[t][column]);
    ConcentrationCheck c;
    c.target = target;
    c.z = z;
    c.bound = bound;
    c.variance = sample_variance(x, nullptr);

    Engine rng = make_engine(config.seed, "bootstrap", stream);
    std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
    std::vector<double> boot(config.bootstrap);
    std::vector<std::size_t> idx(x.size());
    for (double& b : boot) {
      for (std::size_t& k : idx) k = pick(rng);
      b = sample_variance(x, &idx);
    }
    double mean = 0.0;
    for (double b : boot) mean += b;
    mean /= static_cast<double>(boot.size());
    double ss = 0.0;
    for (double b : boot) ss += (b - mean) * (b - mean);
    c.std_error = std::sqrt(ss / static_cast<double>(boot.size() - 1));
    c.ci_low = percentile(boot, 0.025);
    c.ci_high = percentile(boot, 0.975);
    c.pass = c.ci_high <= bound;
    c.hard_violation = c.variance > bound + 5.0 * c.std_error;
    report.checks.push_back(c);
  };

  for (std::size_t zi = 0; zi < nz; ++zi) {
    const Complex z = config.z_set[zi];
    if (with_u)
      audit(2 * zi, "concentration1", z,
            concentration1_bound(config.U, z, config.n, config.p, config.sigma_sq), 3 * zi);
    if (with_v) {
      audit(2 * zi + 1, "concentration2bis", z,
            concentration2bis_bound(config.V, z, config.n, config.p, config.sigma_sq),
            3 * zi + 1);
      audit(2 * zi + 1, "concentration2", z,
            concentration2_bound(config.V, z, config.n, config.p, config.sigma_sq),
            3 * zi + 2);
    }
  }
  return report;
}

TailFrequencyReport concentration3_audit(const std::vector<std::size_t>& ns, double c,
                                         const std::vector<double>& deltas,
                                         std::size_t trials, std::uint64_t seed,
                                         const EvaluationDomain& domain) {
  if (ns.empty() || deltas.empty()) throw std::invalid_argument("concentration3: empty grid");
  if (trials < 2) throw std::invalid_argument("concentration3: need at least 2 trials");
  TailFrequencyReport report;
  report.deltas = deltas;
  report.monotone_in_delta = true;
  for (std::size_t n : ns) {
    EnsembleSpec spec;
    spec.n = n;
    spec.p = columns_for(n, c);
    spec.entry_law = Rademacher{};
    spec.seed = derive_seed(seed, "concentration3", n);
    spec.trials = trials;

    std::vector<std::vector<Complex>> g(trials);
    parallel_for(trials, [&](std::size_t t) {
      g[t] = stieltjes_on(gram_eigenvalues(information_plus_noise(spec, t)), domain.points());
    });
    std::vector<Complex> mean(domain.size(), Complex{});
    for (const auto& row : g)
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += row[i];
    for (Complex& m : mean) m /= static_cast<double>(trials);

    TailFrequencyRow row;
    row.n = n;
    row.frequencies.assign(deltas.size(), 0.0);
    for (const auto& trial : g) {
      const double d = dst_from_values(trial, mean, domain).value;
      row.mean_distance += d;
      for (std::size_t k = 0; k < deltas.size(); ++k)
        if (d >= deltas[k]) row.frequencies[k] += 1.0;
    }
    row.mean_distance /= static_cast<double>(trials);
    for (double& f : row.frequencies) f /= static_cast<double>(trials);
    for (std::size_t k = 1; k < deltas.size(); ++k)
      if (deltas[k] > deltas[k - 1] && row.frequencies[k] > row.frequencies[k - 1])
        report.monotone_in_delta = false;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace rmtfree
