#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rmtfree/numerics.hpp"

namespace rmtfree {

/// Raised when a computation hits a singular evaluation or fails to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenvalues (and atom locations) within this distance of 0 count as mass
/// at the origin.
inline constexpr double kZeroAtomTolerance = 1e-10;

enum class MeasureKind { Atomic, Semicircle, MarchenkoPastur, DensityGrid };

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

struct GridPoint {
  double x = 0.0;
  double density = 0.0;
};

/// A probability measure on the real line.
///
/// Atomic measures keep their atoms sorted by location with exact duplicates
/// merged. A DensityGrid measure is a piecewise-linear density on a sorted
/// grid plus an optional atom at the origin; its trapezoid mass and the atom
/// add up to one.
class Measure {
 public:
  static Measure atomic(std::vector<Atom> atoms);
  static Measure dirac(double location);
  /// Equal weights 1/n on the given locations (an empirical measure).
  static Measure empirical(std::span<const double> locations);
  static Measure semicircle();
  static Measure marchenko_pastur(double ratio);
  static Measure density_grid(std::vector<GridPoint> grid,
                              double zero_atom = 0.0);

  MeasureKind kind() const { return kind_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<GridPoint>& grid() const { return grid_; }
  double ratio() const { return ratio_; }
  /// Atom carried at the origin by a DensityGrid or MarchenkoPastur measure.
  double zero_atom() const { return zero_atom_; }
  bool has_density() const { return kind_ != MeasureKind::Atomic; }
  /// Closed interval containing the support.
  std::pair<double, double> support_hull() const;

 private:
  Measure() = default;

  MeasureKind kind_ = MeasureKind::Atomic;
  std::vector<Atom> atoms_;
  std::vector<GridPoint> grid_;
  double ratio_ = 0.0;
  double zero_atom_ = 0.0;
};

/// Stieltjes transform G(z) = int 1/(z - x) dmu(x) for non-real z.
Complex stieltjes(const Measure& mu, Complex z);
/// G'(z) = -int 1/(z - x)^2 dmu(x).
Complex stieltjes_derivative(const Measure& mu, Complex z);

/// Lebesgue density at x (atoms excluded). Atomic measures are rejected.
double density(const Measure& mu, double x);

/// m_p(mu) = int |x|^p dmu(x), p > 0.
double moment(const Measure& mu, double p);

/// mu({0}), counting atoms within `tol` of the origin.
double mass_at_zero(const Measure& mu, double tol = kZeroAtomTolerance);

/// Symmetry under x -> -x. Atomic atoms must pair up to `location_tol` with
/// weights equal to `weight_tol`; grids are compared with their mirror image.
bool is_symmetric(const Measure& mu, double location_tol = 1e-10,
                  double weight_tol = 1e-12, double grid_tol = 1e-8);

/// Merges atoms whose locations are within `tol` of the running cluster start.
Measure coalesce(const Measure& mu, double tol);

/// Atom-for-atom comparison of two atomic measures after coalescing at `tol`.
bool atoms_match(const Measure& a, const Measure& b, double tol);

enum class TransformKind { Square, SymmetrizedSqrt, AtomMix };

struct MeasureTransform {
  TransformKind kind = TransformKind::Square;
  double ratio = 1.0;  // c, used by AtomMix

  static MeasureTransform square() { return {TransformKind::Square, 1.0}; }
  static MeasureTransform symmetrized_sqrt() {
    return {TransformKind::SymmetrizedSqrt, 1.0};
  }
  static MeasureTransform atom_mix(double c) { return {TransformKind::AtomMix, c}; }
};

/// Push-forwards: x -> x^2, the symmetric law of +-sqrt(X), and
/// mu -> (1 + 1/c)/2 mu^2 + (1 - 1/c)/2 delta_0.
Measure transform_measure(const Measure& mu, const MeasureTransform& op);

struct InversionOptions {
  std::size_t points = 4096;
  double atom_threshold = 1e-6;
};

/// Recovers a density on [lo, hi] from a Stieltjes transform by evaluating
/// -Im G(x + i eps) / pi, on cosine-spaced nodes (dense near lo and hi),
/// along the eps ladder and extrapolating to eps = 0 in
/// powers of sqrt(eps). An atom at the origin is detected from eps * Im G(i eps),
/// on eight halvings starting at the smallest ladder eps, and carried
/// separately. Throws std::invalid_argument when the transform does not decay
/// like 1/z.
Measure invert_stieltjes(const std::function<Complex(Complex)>& transform,
                         double lo, double hi,
                         std::span<const double> eps_ladder,
                         const InversionOptions& options = {});

std::string to_string(MeasureKind kind);

}  // namespace rmtfree
