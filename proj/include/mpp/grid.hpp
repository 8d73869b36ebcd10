#pragma once

#include <cstddef>
#include <vector>

namespace mpp {

/// Uniform grid on [-L, L] with 2M+1 nodes; node M is exactly x = 0.
class Grid1D {
 public:
  Grid1D(double half_width, int intervals_per_side);

  double half_width() const noexcept { return half_width_; }
  int intervals_per_side() const noexcept { return intervals_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  double spacing() const noexcept { return spacing_; }
  std::size_t zero_index() const noexcept { return static_cast<std::size_t>(intervals_); }
  double node(std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }

  /// Trapezoid quadrature weight of node i.
  double weight(std::size_t i) const noexcept {
    return (i == 0 || i + 1 == nodes_.size()) ? 0.5 * spacing_ : spacing_;
  }

  /// Index of the node closest to x (clamped to the grid).
  std::size_t nearest(double x) const noexcept;

  bool operator==(const Grid1D& other) const noexcept {
    return half_width_ == other.half_width_ && intervals_ == other.intervals_;
  }

 private:
  double half_width_;
  int intervals_;
  double spacing_;
  std::vector<double> nodes_;
};

Grid1D build_grid(double half_width, int intervals_per_side);

}  // namespace mpp
