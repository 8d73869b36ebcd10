#include "mpp/grid.hpp"

#include <algorithm>
#include <cmath>

#include "mpp/errors.hpp"

namespace mpp {

Grid1D::Grid1D(double half_width, int intervals_per_side)
    : half_width_(half_width), intervals_(intervals_per_side) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw DomainError("grid.L must be a positive finite half-width");
  }
  if (intervals_per_side < 2) throw DomainError("grid.M must be at least 2");
  spacing_ = half_width / intervals_per_side;
  const std::size_t n = 2 * static_cast<std::size_t>(intervals_per_side) + 1;
  nodes_.resize(n);
  // Built from integer offsets so the grid is exactly antisymmetric.
  for (int k = -intervals_per_side; k <= intervals_per_side; ++k) {
    nodes_[static_cast<std::size_t>(k + intervals_per_side)] =
        half_width * static_cast<double>(k) / intervals_per_side;
  }
}

std::size_t Grid1D::nearest(double x) const noexcept {
  const double s = std::round(x / spacing_) + intervals_;
  const double clamped = std::clamp(s, 0.0, static_cast<double>(nodes_.size() - 1));
  return static_cast<std::size_t>(clamped);
}

Grid1D build_grid(double half_width, int intervals_per_side) {
  return Grid1D(half_width, intervals_per_side);
}

}  // namespace mpp
