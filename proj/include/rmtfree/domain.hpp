#pragma once

#include <cstddef>
#include <vector>

#include "rmtfree/numerics.hpp"

namespace rmtfree {

/// Finite sample of the truncated cone {Im z > s, |Re z / Im z| < t}.
///
/// Points are laid out level-major: `levels` imaginary parts on a geometric
/// ladder from 1.01 s to im_max, and at each level `per_level` ratios
/// Re z / Im z spread uniformly over the open interval (-t, t).
class EvaluationDomain {
 public:
  EvaluationDomain(double s, double t, double im_max, std::size_t levels = 24,
                   std::size_t per_level = 17);

  /// im_max = max(4 / margin, 2 s) with margin 0.05.
  static EvaluationDomain standard(double s = 10.0, double t = 0.5);

  double s() const { return s_; }
  double t() const { return t_; }
  double im_max() const { return im_max_; }
  std::size_t levels() const { return levels_; }
  std::size_t per_level() const { return per_level_; }
  const std::vector<Complex>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  bool contains(Complex z) const;
  /// Bound on sup |G_mu - G_nu| over the part of the cone above im_max.
  double tail_bound() const { return 2.0 / im_max_; }
  /// Index of the top-level point closest to the imaginary axis.
  std::size_t top_axis_index() const;

 private:
  double s_;
  double t_;
  double im_max_;
  std::size_t levels_;
  std::size_t per_level_;
  std::vector<Complex> points_;
};

inline bool domain_contains(const EvaluationDomain& domain, Complex z) {
  return domain.contains(z);
}

}  // namespace rmtfree
