#include "rmtfree/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmtfree {

namespace {
constexpr double kBottomOffset = 1.01;
constexpr double kTruncationMargin = 0.05;
}  // namespace

EvaluationDomain::EvaluationDomain(double s, double t, double im_max,
                                   std::size_t levels, std::size_t per_level)
    : s_(s), t_(t), im_max_(im_max), levels_(levels), per_level_(per_level) {
  if (!(s > 0.0) || !(t > 0.0))
    throw std::invalid_argument("domain: s and t must be positive");
  if (!(im_max > kBottomOffset * s))
    throw std::invalid_argument("domain: im_max must exceed 1.01 s");
  if (levels < 2 || per_level < 1)
    throw std::invalid_argument("domain: need >= 2 levels and >= 1 point per level");
  points_.reserve(levels * per_level);
  const double bottom = kBottomOffset * s;
  const double step = std::log(im_max / bottom) / static_cast<double>(levels - 1);
  for (std::size_t l = 0; l < levels; ++l) {
    const double y = l + 1 == levels ? im_max
                                     : bottom * std::exp(step * static_cast<double>(l));
    for (std::size_t k = 0; k < per_level; ++k) {
      const double ratio = -t + 2.0 * t * static_cast<double>(k + 1) /
                                    static_cast<double>(per_level + 1);
      points_.emplace_back(ratio * y, y);
    }
  }
}

EvaluationDomain EvaluationDomain::standard(double s, double t) {
  return EvaluationDomain(s, t, std::max(4.0 / kTruncationMargin, 2.0 * s));
}

bool EvaluationDomain::contains(Complex z) const {
  return z.imag() > s_ && std::abs(z.real() / z.imag()) < t_;
}

std::size_t EvaluationDomain::top_axis_index() const {
  const std::size_t base = (levels_ - 1) * per_level_;
  std::size_t best = base;
  for (std::size_t k = 0; k < per_level_; ++k)
    if (std::abs(points_[base + k].real()) < std::abs(points_[best].real()))
      best = base + k;
  return best;
}

}  // namespace rmtfree
