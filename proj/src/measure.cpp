#include "rmtfree/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmtfree/parallel.hpp"

namespace rmtfree {

namespace {

constexpr double kWeightSumTolerance = 1e-12;
constexpr double kGridMassTolerance = 1e-8;

std::vector<Atom> normalize_atoms(std::vector<Atom> atoms) {
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.location) || !std::isfinite(a.weight))
      throw std::invalid_argument("atomic measure: non-finite atom");
    if (a.weight < 0.0)
      throw std::invalid_argument("atomic measure: negative weight");
  }
  std::erase_if(atoms, [](const Atom& a) { return a.weight == 0.0; });
  if (atoms.empty()) throw std::invalid_argument("atomic measure: no atoms");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& l, const Atom& r) { return l.location < r.location; });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().location == a.location)
      merged.back().weight += a.weight;
    else
      merged.push_back(a);
  }
  double total = 0.0;
  for (const Atom& a : merged) total += a.weight;
  if (std::abs(total - 1.0) > kWeightSumTolerance)
    throw std::invalid_argument("atomic measure: weights sum to " +
                                std::to_string(total) + ", expected 1");
  return merged;
}

std::vector<double> trapezoid_weights(const std::vector<GridPoint>& grid) {
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double h = 0.5 * (grid[i + 1].x - grid[i].x);
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

double grid_mass(const std::vector<GridPoint>& grid) {
  const auto w = trapezoid_weights(grid);
  double m = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) m += w[i] * grid[i].density;
  return m;
}

double grid_interpolate(const std::vector<GridPoint>& grid, double x) {
  if (grid.empty() || x < grid.front().x || x > grid.back().x) return 0.0;
  auto it = std::upper_bound(
      grid.begin(), grid.end(), x,
      [](double v, const GridPoint& g) { return v < g.x; });
  if (it == grid.end()) return grid.back().density;
  if (it == grid.begin()) return grid.front().density;
  const GridPoint& hi = *it;
  const GridPoint& lo = *(it - 1);
  const double u = (x - lo.x) / (hi.x - lo.x);
  return (1.0 - u) * lo.density + u * hi.density;
}

void require_nonreal(Complex z) {
  if (z.imag() == 0.0 || !std::isfinite(z.imag()) || !std::isfinite(z.real()))
    throw std::invalid_argument("Stieltjes transform requires non-real z");
}

// Square-root branch with a cut on [lo, hi] and sqrt ~ z at infinity.
Complex cut_sqrt(Complex z, double lo, double hi) {
  return std::sqrt(z - lo) * std::sqrt(z - hi);
}

struct ClosedForm {
  Complex value;
  Complex derivative;
};

// cut_sqrt(z, lo, hi) is analytic off [lo, hi] and behaves like z at
// infinity, so the Herglotz root is always the one written below; the
// rationalized forms avoid cancellation for large |z|.
ClosedForm semicircle_transform(Complex z) {
  const Complex root = cut_sqrt(z, -2.0, 2.0);
  const Complex g = 2.0 / (z + root);
  return {g, -g / root};
}

ClosedForm mp_transform(Complex z, double c) {
  const double sc = std::sqrt(c);
  const double a = (1.0 - sc) * (1.0 - sc);
  const double b = (1.0 + sc) * (1.0 + sc);
  const Complex root = cut_sqrt(z, a, b);
  const Complex g = 2.0 / (z - 1.0 + c + root);
  return {g, (c * g * g - g) / root};
}

}  // namespace

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::Atomic: return "atoms";
    case MeasureKind::Semicircle: return "semicircle";
    case MeasureKind::MarchenkoPastur: return "mp";
    case MeasureKind::DensityGrid: return "grid";
  }
  return "unknown";
}

Measure Measure::atomic(std::vector<Atom> atoms) {
  Measure m;
  m.kind_ = MeasureKind::Atomic;
  m.atoms_ = normalize_atoms(std::move(atoms));
  return m;
}

Measure Measure::dirac(double location) { return atomic({{location, 1.0}}); }

Measure Measure::empirical(std::span<const double> locations) {
  if (locations.empty()) throw std::invalid_argument("empirical: no points");
  const double w = 1.0 / static_cast<double>(locations.size());
  std::vector<Atom> atoms;
  atoms.reserve(locations.size());
  for (double x : locations) atoms.push_back({x, w});
  return atomic(std::move(atoms));
}

Measure Measure::semicircle() {
  Measure m;
  m.kind_ = MeasureKind::Semicircle;
  return m;
}

Measure Measure::marchenko_pastur(double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio))
    throw std::invalid_argument("Marchenko-Pastur ratio must be positive");
  Measure m;
  m.kind_ = MeasureKind::MarchenkoPastur;
  m.ratio_ = ratio;
  m.zero_atom_ = std::max(1.0 - 1.0 / ratio, 0.0);
  return m;
}

Measure Measure::density_grid(std::vector<GridPoint> grid, double zero_atom) {
  if (grid.size() < 2) throw std::invalid_argument("density grid: < 2 points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i].x) || !std::isfinite(grid[i].density) ||
        grid[i].density < 0.0)
      throw std::invalid_argument("density grid: invalid point");
    if (i > 0 && !(grid[i].x > grid[i - 1].x))
      throw std::invalid_argument("density grid: x must be strictly increasing");
  }
  if (zero_atom < 0.0 || zero_atom > 1.0)
    throw std::invalid_argument("density grid: zero atom outside [0, 1]");
  const double mass = grid_mass(grid) + zero_atom;
  if (std::abs(mass - 1.0) > kGridMassTolerance)
    throw std::invalid_argument("density grid: total mass " +
                                std::to_string(mass) + ", expected 1");
  Measure m;
  m.kind_ = MeasureKind::DensityGrid;
  m.grid_ = std::move(grid);
  m.zero_atom_ = zero_atom;
  return m;
}

std::pair<double, double> Measure::support_hull() const {
  switch (kind_) {
    case MeasureKind::Atomic:
      return {atoms_.front().location, atoms_.back().location};
    case MeasureKind::Semicircle:
      return {-2.0, 2.0};
    case MeasureKind::MarchenkoPastur: {
      const double sc = std::sqrt(ratio_);
      const double a = (1.0 - sc) * (1.0 - sc);
      return {zero_atom_ > 0.0 ? 0.0 : a, (1.0 + sc) * (1.0 + sc)};
    }
    case MeasureKind::DensityGrid: {
      double lo = grid_.front().x, hi = grid_.back().x;
      if (zero_atom_ > 0.0) {
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 0.0);
      }
      return {lo, hi};
    }
  }
  return {0.0, 0.0};
}

Complex stieltjes(const Measure& mu, Complex z) {
  require_nonreal(z);
  switch (mu.kind()) {
    case MeasureKind::Atomic: {
      Complex g = 0.0;
      for (const Atom& a : mu.atoms()) g += a.weight / (z - a.location);
      return g;
    }
    case MeasureKind::Semicircle:
      return semicircle_transform(z).value;
    case MeasureKind::MarchenkoPastur:
      return mp_transform(z, mu.ratio()).value;
    case MeasureKind::DensityGrid: {
      const auto& grid = mu.grid();
      const auto w = trapezoid_weights(grid);
      Complex g = mu.zero_atom() / z;
      for (std::size_t i = 0; i < grid.size(); ++i)
        g += w[i] * grid[i].density / (z - grid[i].x);
      return g;
    }
  }
  return 0.0;
}

Complex stieltjes_derivative(const Measure& mu, Complex z) {
  require_nonreal(z);
  switch (mu.kind()) {
    case MeasureKind::Atomic: {
      Complex d = 0.0;
      for (const Atom& a : mu.atoms()) {
        const Complex r = 1.0 / (z - a.location);
        d -= a.weight * r * r;
      }
      return d;
    }
    case MeasureKind::Semicircle:
      return semicircle_transform(z).derivative;
    case MeasureKind::MarchenkoPastur:
      return mp_transform(z, mu.ratio()).derivative;
    case MeasureKind::DensityGrid: {
      const auto& grid = mu.grid();
      const auto w = trapezoid_weights(grid);
      Complex d = -mu.zero_atom() / (z * z);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const Complex r = 1.0 / (z - grid[i].x);
        d -= w[i] * grid[i].density * r * r;
      }
      return d;
    }
  }
  return 0.0;
}

double density(const Measure& mu, double x) {
  switch (mu.kind()) {
    case MeasureKind::Atomic:
      throw std::invalid_argument("density: atomic measure has no density");
    case MeasureKind::Semicircle:
      return std::abs(x) < 2.0 ? std::sqrt(4.0 - x * x) / (2.0 * kPi) : 0.0;
    case MeasureKind::MarchenkoPastur: {
      const double c = mu.ratio();
      const double sc = std::sqrt(c);
      const double a = (1.0 - sc) * (1.0 - sc);
      const double b = (1.0 + sc) * (1.0 + sc);
      if (!(x > a && x < b) || x <= 0.0) return 0.0;
      return std::sqrt((b - x) * (x - a)) / (2.0 * kPi * x * c);
    }
    case MeasureKind::DensityGrid:
      return grid_interpolate(mu.grid(), x);
  }
  return 0.0;
}

double moment(const Measure& mu, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("moment order must be positive");
  switch (mu.kind()) {
    case MeasureKind::Atomic: {
      double m = 0.0;
      for (const Atom& a : mu.atoms()) m += a.weight * std::pow(std::abs(a.location), p);
      return m;
    }
    case MeasureKind::Semicircle: {
      auto f = [p](double x) {
        return std::pow(x, p) * std::sqrt((2.0 - x) * (2.0 + x)) / (2.0 * kPi);
      };
      return 2.0 * integrate(f, 0.0, 2.0);
    }
    case MeasureKind::MarchenkoPastur: {
      const double c = mu.ratio();
      const double sc = std::sqrt(c);
      const double a = (1.0 - sc) * (1.0 - sc);
      const double b = (1.0 + sc) * (1.0 + sc);
      auto f = [&](double x) {
        return std::pow(x, p - 1.0) * std::sqrt((b - x) * (x - a)) / (2.0 * kPi * c);
      };
      return integrate(f, a, b);
    }
    case MeasureKind::DensityGrid: {
      const auto& grid = mu.grid();
      const auto w = trapezoid_weights(grid);
      double m = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        m += w[i] * grid[i].density * std::pow(std::abs(grid[i].x), p);
      return m;
    }
  }
  return 0.0;
}

double mass_at_zero(const Measure& mu, double tol) {
  switch (mu.kind()) {
    case MeasureKind::Atomic: {
      double m = 0.0;
      for (const Atom& a : mu.atoms())
        if (std::abs(a.location) <= tol) m += a.weight;
      return m;
    }
    case MeasureKind::Semicircle:
      return 0.0;
    case MeasureKind::MarchenkoPastur:
    case MeasureKind::DensityGrid:
      return mu.zero_atom();
  }
  return 0.0;
}

Measure coalesce(const Measure& mu, double tol) {
  if (mu.kind() != MeasureKind::Atomic) return mu;
  std::vector<Atom> out;
  double cluster_start = 0.0;
  double weighted_sum = 0.0;
  for (const Atom& a : mu.atoms()) {
    if (!out.empty() && a.location - cluster_start <= tol) {
      out.back().weight += a.weight;
      weighted_sum += a.weight * a.location;
      out.back().location = weighted_sum / out.back().weight;
    } else {
      cluster_start = a.location;
      weighted_sum = a.weight * a.location;
      out.push_back(a);
    }
  }
  return Measure::atomic(std::move(out));
}

bool atoms_match(const Measure& a, const Measure& b, double tol) {
  if (a.kind() != MeasureKind::Atomic || b.kind() != MeasureKind::Atomic)
    throw std::invalid_argument("atoms_match: atomic measures required");
  const Measure ca = coalesce(a, tol);
  const Measure cb = coalesce(b, tol);
  if (ca.atoms().size() != cb.atoms().size()) return false;
  for (std::size_t i = 0; i < ca.atoms().size(); ++i) {
    const Atom& x = ca.atoms()[i];
    const Atom& y = cb.atoms()[i];
    const double scale = std::max(1.0, std::abs(x.location));
    if (std::abs(x.location - y.location) > tol * scale) return false;
    if (std::abs(x.weight - y.weight) > tol) return false;
  }
  return true;
}

bool is_symmetric(const Measure& mu, double location_tol, double weight_tol,
                  double grid_tol) {
  switch (mu.kind()) {
    case MeasureKind::Semicircle:
      return true;
    case MeasureKind::MarchenkoPastur:
      return false;
    case MeasureKind::Atomic: {
      const Measure c = coalesce(mu, location_tol);
      const auto& atoms = c.atoms();
      std::size_t i = 0, j = atoms.size() - 1;
      while (i <= j) {
        const Atom& lo = atoms[i];
        const Atom& hi = atoms[j];
        const double scale = std::max(1.0, std::abs(hi.location));
        if (i == j) return std::abs(lo.location) <= location_tol * scale;
        if (std::abs(lo.location + hi.location) > location_tol * scale) return false;
        if (std::abs(lo.weight - hi.weight) > weight_tol) return false;
        ++i;
        if (j == 0) break;
        --j;
      }
      return true;
    }
    case MeasureKind::DensityGrid: {
      for (const GridPoint& g : mu.grid()) {
        if (std::abs(g.density - density(mu, -g.x)) > grid_tol) return false;
      }
      return true;
    }
  }
  return false;
}

namespace {

Measure square_atomic(const Measure& mu, double scale) {
  std::vector<Atom> atoms;
  atoms.reserve(mu.atoms().size());
  for (const Atom& a : mu.atoms())
    atoms.push_back({a.location * a.location, a.weight * scale});
  return Measure::atomic(std::move(atoms));
}

Measure sqrt_atomic(const Measure& mu) {
  std::vector<Atom> atoms;
  for (const Atom& a : mu.atoms()) {
    if (a.location < -kZeroAtomTolerance)
      throw std::invalid_argument(
          "symmetrized_sqrt: measure has mass on the negative half-line at " +
          std::to_string(a.location));
    const double r = std::sqrt(std::max(a.location, 0.0));
    if (r == 0.0) {
      atoms.push_back({0.0, a.weight});
    } else {
      atoms.push_back({r, 0.5 * a.weight});
      atoms.push_back({-r, 0.5 * a.weight});
    }
  }
  return Measure::atomic(std::move(atoms));
}

Measure sqrt_grid(const Measure& mu) {
  const auto& grid = mu.grid();
  if (grid.front().x < 0.0)
    throw std::invalid_argument(
        "symmetrized_sqrt: density grid extends below zero");
  // Density of +-sqrt(X) with X ~ f: g(y) = |y| f(y^2).
  std::vector<GridPoint> out;
  out.reserve(2 * grid.size());
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    const double y = std::sqrt(it->x);
    if (y > 0.0) out.push_back({-y, y * it->density});
  }
  if (grid.front().x > 0.0) {
    // Gap (-sqrt(x0), sqrt(x0)) carries no mass.
    out.push_back({0.0, 0.0});
  }
  for (const GridPoint& g : grid) {
    const double y = std::sqrt(g.x);
    out.push_back({y, y * g.density});
  }
  const double target = 1.0 - mu.zero_atom();
  const double mass = grid_mass(out);
  if (mass > 0.0)
    for (GridPoint& g : out) g.density *= target / mass;
  return Measure::density_grid(std::move(out), mu.zero_atom());
}

}  // namespace

Measure transform_measure(const Measure& mu, const MeasureTransform& op) {
  switch (op.kind) {
    case TransformKind::Square:
      if (mu.kind() != MeasureKind::Atomic)
        throw std::invalid_argument("square: only atomic measures are supported");
      return square_atomic(mu, 1.0);
    case TransformKind::SymmetrizedSqrt:
      if (mu.kind() == MeasureKind::Atomic) return sqrt_atomic(mu);
      if (mu.kind() == MeasureKind::DensityGrid) return sqrt_grid(mu);
      throw std::invalid_argument(
          "symmetrized_sqrt: atomic or grid measure required");
    case TransformKind::AtomMix: {
      const double c = op.ratio;
      if (!(c > 0.0)) throw std::invalid_argument("atom_mix: ratio must be positive");
      if (mu.kind() != MeasureKind::Atomic)
        throw std::invalid_argument("atom_mix: only atomic measures are supported");
      if (!is_symmetric(mu))
        throw std::invalid_argument("atom_mix: input measure must be symmetric");
      const double scale = 0.5 * (1.0 + 1.0 / c);
      const double extra = 0.5 * (1.0 - 1.0 / c);
      std::vector<Atom> atoms;
      double zero = extra;
      for (const Atom& a : mu.atoms()) {
        const double x2 = a.location * a.location;
        if (std::abs(a.location) <= kZeroAtomTolerance)
          zero += scale * a.weight;
        else
          atoms.push_back({x2, scale * a.weight});
      }
      if (zero < -kWeightSumTolerance)
        throw std::invalid_argument(
            "atom_mix: resulting mass at 0 is negative (" + std::to_string(zero) +
            "); input needs mu({0}) >= |1-c|/(1+c) = " +
            std::to_string(std::abs(1.0 - c) / (1.0 + c)));
      if (zero > kWeightSumTolerance) atoms.push_back({0.0, zero});
      // Rescale away roundoff so the weights sum to one.
      double total = 0.0;
      for (const Atom& a : atoms) total += a.weight;
      for (Atom& a : atoms) a.weight /= total;
      return Measure::atomic(std::move(atoms));
    }
  }
  throw std::invalid_argument("unknown transform");
}

Measure invert_stieltjes(const std::function<Complex(Complex)>& transform,
                         double lo, double hi,
                         std::span<const double> eps_ladder,
                         const InversionOptions& options) {
  if (!(hi > lo)) throw std::invalid_argument("invert_stieltjes: empty window");
  if (eps_ladder.empty())
    throw std::invalid_argument("invert_stieltjes: empty eps ladder");
  for (std::size_t k = 0; k < eps_ladder.size(); ++k) {
    if (!(eps_ladder[k] > 0.0))
      throw std::invalid_argument("invert_stieltjes: eps must be positive");
    if (k > 0 && !(eps_ladder[k] < eps_ladder[k - 1]))
      throw std::invalid_argument("invert_stieltjes: eps ladder must decrease");
  }
  if (options.points < 2)
    throw std::invalid_argument("invert_stieltjes: need at least 2 points");

  for (double far : {1e6, 1e8}) {
    const Complex z(0.5 * (lo + hi), far);
    const Complex g = transform(z);
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag()) ||
        std::abs(z * g - 1.0) > 1e-2)
      throw std::invalid_argument(
          "invert_stieltjes: transform does not decay like 1/z; not the "
          "Stieltjes transform of a probability measure");
  }

  std::vector<double> roots(eps_ladder.size());
  for (std::size_t k = 0; k < eps_ladder.size(); ++k)
    roots[k] = std::sqrt(eps_ladder[k]);

  // The atom uses its own finer ladder below the density ladder: with a
  // regular density eps * Im G(i eps) carries integer powers of eps, with an
  // inverse square-root density a sqrt(eps) term, and both must be removed
  // well below the detection threshold.
  double atom = 0.0;
  if (lo <= 0.0 && hi >= 0.0) {
    constexpr std::size_t kAtomLadder = 8;
    std::vector<double> r(kAtomLadder), m(kAtomLadder);
    for (std::size_t k = 0; k < kAtomLadder; ++k) {
      const double eps = eps_ladder.back() * std::ldexp(1.0, -static_cast<int>(k));
      r[k] = std::sqrt(eps);
      m[k] = -eps * transform(Complex(0.0, eps)).imag();
    }
    const double m0 = neville<double>(r, m, 0.0);
    if (m0 > options.atom_threshold) atom = std::min(m0, 1.0);
  }

  const std::size_t n = options.points;
  std::vector<GridPoint> grid(n);
  parallel_for(n, [&](std::size_t j) {
    // Nodes cluster at both ends of the window, where edge singularities sit.
    const double u = kPi * static_cast<double>(j) / static_cast<double>(n - 1);
    const double x = lo + (hi - lo) * 0.5 * (1.0 - std::cos(u));
    std::vector<double> vals(eps_ladder.size());
    for (std::size_t k = 0; k < eps_ladder.size(); ++k) {
      const double eps = eps_ladder[k];
      double v = -transform(Complex(x, eps)).imag() / kPi;
      if (atom > 0.0) v -= atom * eps / (kPi * (x * x + eps * eps));
      vals[k] = v;
    }
    grid[j] = {x, std::max(neville<double>(roots, vals, 0.0), 0.0)};
  });

  const double mass = grid_mass(grid);
  const double target = 1.0 - atom;
  if (mass > 0.0) {
    for (GridPoint& g : grid) g.density *= target / mass;
  } else if (target > kGridMassTolerance) {
    throw NumericalError("invert_stieltjes: recovered density has no mass");
  }
  return Measure::density_grid(std::move(grid), atom);
}

}  // namespace rmtfree
