#include "mpp/density.hpp"

#include <cmath>
#include <utility>

#include "mpp/errors.hpp"

namespace mpp {

DensityField::DensityField(Grid1D g, Eigen::VectorXd v, double t)
    : grid(std::move(g)), values(std::move(v)), time(t) {
  if (static_cast<std::size_t>(values.size()) != grid.size()) {
    throw DomainError("density values do not match the grid size");
  }
}

DensityField delta_init(const Grid1D& grid, double x0) {
  const double h = grid.spacing();
  if (!std::isfinite(x0) || std::abs(x0) > grid.half_width() - 3.0 * h + 1e-12 * h) {
    throw DomainError("initial state x0 must satisfy |x0| <= L - 3h");
  }
  const double width = 2.0 * h;
  Eigen::VectorXd v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double z = (grid.node(i) - x0) / width;
    v[static_cast<Eigen::Index>(i)] = std::exp(-0.5 * z * z);
  }
  v /= total_mass(grid, v);
  return DensityField(grid, std::move(v), 0.0);
}

double total_mass(const Grid1D& grid, const Eigen::Ref<const Eigen::VectorXd>& values) {
  const Eigen::Index n = values.size();
  if (n == 0) return 0.0;
  return grid.spacing() * (values.sum() - 0.5 * (values[0] + values[n - 1]));
}

double total_mass(const DensityField& field) { return total_mass(field.grid, field.values); }

DensityField reflect(const DensityField& field) {
  return DensityField(field.grid, field.values.reverse(), field.time);
}

}  // namespace mpp
