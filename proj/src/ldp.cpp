#include "rmtfree/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rmtfree/metrics.hpp"
#include "rmtfree/parallel.hpp"
#include "rmtfree/rng.hpp"

namespace rmtfree {

namespace {

// Mass comparisons against the atom conditions allow for the rounding in
// weights such as 1/3 + 1/3 + 1/3.
constexpr double kMassSlack = 1e-12;

bool is_dirac_at_zero(const Measure& mu) {
  return mu.kind() == MeasureKind::Atomic && mass_at_zero(mu) >= 1.0 - kMassSlack;
}

// e^{u0} * int_{u0}^inf (u / a)^{k / alpha} e^{-u} du, i.e. the tail of the
// raw modulus moment with the exponential factor pulled out.
double scaled_tail_moment(const TailLaw& law, double k, double u0) {
  const double e = k / law.alpha;
  return integrate_to_infinity(
      [&](double v) { return std::pow((u0 + v) / law.a, e) * std::exp(-v); }, 0.0);
}

}  // namespace

TruncationThresholds truncation_thresholds(std::size_t n, std::size_t p, double alpha) {
  if (n < 3) throw std::invalid_argument("truncation thresholds need n >= 3");
  if (p == 0) throw std::invalid_argument("truncation thresholds need p >= 1");
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::invalid_argument("alpha must lie in (0, 2)");
  const double logn = std::log(static_cast<double>(n));
  const double sp = std::sqrt(static_cast<double>(p));
  TruncationThresholds th;
  th.eps = 1.0 / logn;
  th.t_a = std::pow(logn, 2.0 / alpha);
  th.t_b = th.eps * sp;
  th.t_c = sp / th.eps;
  return th;
}

Band classify_entry(double x, const TruncationThresholds& th) {
  const double ax = std::abs(x);
  if (ax < th.t_a) return Band::A;
  if (ax <= th.t_b) return Band::B;
  if (ax <= th.t_c) return Band::C;
  return Band::D;
}

TruncationDecomposition truncation_decompose(const Eigen::MatrixXd& X, double alpha) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto p = static_cast<std::size_t>(X.cols());
  TruncationDecomposition d;
  d.thresholds = truncation_thresholds(n, p, alpha);
  d.band_b_empty_by_thresholds = d.thresholds.t_a > d.thresholds.t_b;
  for (Eigen::MatrixXd* m : {&d.A, &d.B, &d.C, &d.D}) m->setZero(X.rows(), X.cols());
  const double sp = std::sqrt(static_cast<double>(p));
  for (Eigen::Index k = 0; k < X.cols(); ++k) {
    for (Eigen::Index j = 0; j < X.rows(); ++j) {
      const Band band = classify_entry(X(j, k), d.thresholds);
      const double v = X(j, k) / sp;
      switch (band) {
        case Band::A: d.A(j, k) = v; break;
        case Band::B: d.B(j, k) = v; break;
        case Band::C: d.C(j, k) = v; break;
        case Band::D: d.D(j, k) = v; break;
      }
      ++d.counts[static_cast<std::size_t>(band)];
      if (band != Band::A) d.index_set.emplace_back(j, k);
    }
  }
  return d;
}

ConditionedMoments conditioned_moments_at(const TailLaw& law, double threshold) {
  law.validate();
  if (!(threshold > 0.0)) throw std::invalid_argument("truncation level must be positive");
  const double s = law.scale();
  const double sign = 2.0 * law.prob_plus - 1.0;
  // |Z| = s R with R the raw modulus, and a R^alpha ~ Exp(1).
  const double u0 = law.a * std::pow(threshold / s, law.alpha);
  const double q = std::exp(-u0);
  const double keep = -std::expm1(-u0);

  auto full = [&](double k) { return std::pow(s, k) * law.raw_modulus_moment(k); };
  auto tail = [&](double k) { return q == 0.0 ? 0.0 : q * std::pow(s, k) * scaled_tail_moment(law, k, u0); };

  const double m1 = full(1), t1 = tail(1);
  const double m2 = full(2), t2 = tail(2);
  const double m4 = full(4), t4 = tail(4);

  ConditionedMoments r;
  r.threshold = threshold;
  r.tail_probability = q;
  const double mean_full = sign * m1;
  r.mean = sign * (m1 - t1) / keep;
  r.second = (m2 - t2) / keep;
  r.fourth = (m4 - t4) / keep;
  r.sigma_sq = r.second - r.mean * r.mean;
  // Var - sigma_sq = (E Z^2 - second) - (mean_full^2 - mean^2), each piece
  // written as a difference of tail terms.
  const double second_gap = (t2 - m2 * q) / keep;
  const double mean_gap = sign * (t1 - m1 * q) / keep;
  r.variance_deficit = second_gap - mean_gap * (mean_full + r.mean);
  return r;
}

ConditionedMoments conditioned_moments(const TailLaw& law, double n) {
  if (!(n >= 3.0)) throw std::invalid_argument("conditioned_moments needs n >= 3");
  return conditioned_moments_at(law, std::pow(std::log(n), 2.0 / law.alpha));
}

std::string to_string(RateKind kind) {
  switch (kind) {
    case RateKind::PhiPrime: return "phi_prime";
    case RateKind::PsiPrime: return "psi_prime";
    case RateKind::JPrimeForward: return "j_prime_forward";
  }
  return "unknown";
}

RateKind rate_kind_from_string(const std::string& name) {
  for (auto k : {RateKind::PhiPrime, RateKind::PsiPrime, RateKind::JPrimeForward})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown rate function: " + name);
}

void RateQuery::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("rate query: c must be positive");
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("rate query: alpha must lie in (0, 2)");
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("rate query: a must be positive");
}

double phi_prime(const RateQuery& q) {
  q.validate();
  const double c = q.c;
  if (!is_symmetric(q.measure)) return kInfiniteRate;
  if (mass_at_zero(q.measure) < std::abs(1.0 - c) / (1.0 + c) - kMassSlack) return kInfiniteRate;
  return 0.5 * q.a * (c + 1.0) / std::pow(c, 1.0 + q.alpha / 2.0) * moment(q.measure, q.alpha);
}

double psi_prime(const RateQuery& q) {
  q.validate();
  if (q.measure.support_hull().first < -kZeroAtomTolerance)
    throw std::invalid_argument("psi_prime: the measure must live on [0, inf)");
  if (mass_at_zero(q.measure) < std::max(0.0, 1.0 - 1.0 / q.c) - kMassSlack) return kInfiniteRate;
  return q.a / std::pow(q.c, q.alpha / 2.0) * moment(q.measure, q.alpha / 2.0);
}

ForwardRate j_prime_forward(const RateQuery& q, const ForwardOptions& options) {
  const double value = psi_prime(q);
  if (is_dirac_at_zero(q.measure)) return {Measure::marchenko_pastur(q.c), value};
  const double top = std::max(q.measure.support_hull().second, 0.0);
  const double hi = std::pow(std::sqrt(top) + 1.0 + std::sqrt(q.c), 2.0) * 1.05;
  auto transform = [&](Complex z) {
    return rectangular_transform_at(q.measure, q.c, z, options.solver).value;
  };
  InversionOptions inv;
  inv.points = options.points;
  Measure mu = invert_stieltjes(transform, 0.0, hi, options.eps_ladder, inv);
  return {std::move(mu), value};
}

double rate_eval(const RateQuery& q, RateKind kind) {
  switch (kind) {
    case RateKind::PhiPrime: return phi_prime(q);
    case RateKind::PsiPrime:
    case RateKind::JPrimeForward: return psi_prime(q);
  }
  return kInfiniteRate;
}

Measure scale_measure(const Measure& mu, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("scale_measure: lambda must be positive");
  switch (mu.kind()) {
    case MeasureKind::Atomic: {
      std::vector<Atom> atoms = mu.atoms();
      for (Atom& a : atoms) a.location *= lambda;
      return Measure::atomic(std::move(atoms));
    }
    case MeasureKind::DensityGrid: {
      std::vector<GridPoint> grid = mu.grid();
      for (GridPoint& g : grid) {
        g.x *= lambda;
        g.density /= lambda;
      }
      return Measure::density_grid(std::move(grid), mu.zero_atom());
    }
    default:
      throw std::invalid_argument("scale_measure: closed-form laws cannot be rescaled");
  }
}

bool ExpEquivReport::nonincreasing_within(double k) const {
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double pooled = std::hypot(points[i - 1].std_error, points[i].std_error);
    if (points[i].mean_distance > points[i - 1].mean_distance + k * pooled) return false;
  }
  return true;
}

ExpEquivReport exp_equiv_diagnostic(const EnsembleSpec& spec, double c,
                                    const std::vector<std::size_t>& ladder,
                                    const EvaluationDomain& domain,
                                    const SolverConfig& solver) {
  const auto* law = std::get_if<TailLaw>(&spec.entry_law);
  if (law == nullptr) throw std::invalid_argument("exp_equiv_diagnostic: entry law must be tail");
  if (spec.has_deformation())
    throw std::invalid_argument("exp_equiv_diagnostic: the spec must not carry a deformation");
  if (!(c > 0.0)) throw std::invalid_argument("exp_equiv_diagnostic: c must be positive");
  if (ladder.empty()) throw std::invalid_argument("exp_equiv_diagnostic: empty ladder");
  if (spec.trials < 2) throw std::invalid_argument("exp_equiv_diagnostic: need at least 2 trials");
  for (std::size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i] <= ladder[i - 1])
      throw std::invalid_argument("exp_equiv_diagnostic: ladder must increase");

  SolverConfig config = solver;
  config.domain = domain;
  const auto mp_values = stieltjes_on_domain(Measure::marchenko_pastur(c), domain);

  ExpEquivReport report;
  report.c = c;
  report.alpha = law->alpha;
  for (std::size_t n : ladder) {
    EnsembleSpec local = spec;
    local.n = n;
    local.p = static_cast<std::size_t>(std::llround(static_cast<double>(n) / c));
    local.seed = derive_seed(spec.seed, "exp_equiv", n);
    local.validate();

    struct Trial {
      double distance = 0.0;
      bool ok = false;
      bool nonempty = false;
      std::string message;
    };
    std::vector<Trial> trials(local.trials);
    parallel_for(local.trials, [&](std::size_t t) {
      Trial& out = trials[t];
      try {
        const Eigen::MatrixXd Y = sample_matrix(local, t);
        const double inv_sp = 1.0 / std::sqrt(static_cast<double>(local.p));
        const Eigen::VectorXd eig = gram_eigenvalues(Y * inv_sp);
        const auto g_x = stieltjes_on(eig, domain.points());
        const TruncationDecomposition parts = truncation_decompose(Y, law->alpha);
        out.nonempty = parts.counts[static_cast<std::size_t>(Band::C)] > 0;
        std::vector<Complex> g_nu;
        if (!out.nonempty) {
          g_nu = mp_values;
        } else {
          const ConvolutionResult res = solve_rectangular(gram_spectrum(parts.C), c, config);
          if (!res.all_converged())
            throw NumericalError("subordination solver did not converge");
          g_nu = res.values;
        }
        out.distance = dst_from_values(g_x, g_nu, domain).value;
        out.ok = true;
      } catch (const std::exception& e) {
        out.message = "trial " + std::to_string(t) + ": " + e.what();
      }
    });

    ExpEquivPoint point;
    point.n = local.n;
    point.p = local.p;
    std::vector<double> d;
    for (const Trial& t : trials) {
      if (t.ok) {
        d.push_back(t.distance);
        if (t.nonempty) ++point.nonempty_c;
      } else {
        ++point.failures;
        point.failure_messages.push_back(t.message);
      }
    }
    point.trials_used = d.size();
    if (d.size() >= 2) {
      double mean = 0.0;
      for (double v : d) mean += v;
      mean /= static_cast<double>(d.size());
      double ss = 0.0;
      for (double v : d) ss += (v - mean) * (v - mean);
      point.mean_distance = mean;
      point.std_error = std::sqrt(ss / static_cast<double>(d.size() - 1) /
                                  static_cast<double>(d.size()));
    } else if (d.size() == 1) {
      point.mean_distance = d.front();
    }
    report.points.push_back(std::move(point));
  }
  return report;
}

}  // namespace rmtfree
