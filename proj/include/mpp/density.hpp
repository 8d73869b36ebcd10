#pragma once

#include <Eigen/Core>

#include "mpp/grid.hpp"

namespace mpp {

/// Probability density sampled on a grid at one time instant.
struct DensityField {
  Grid1D grid;
  Eigen::VectorXd values;
  double time = 0.0;

  DensityField(Grid1D g, Eigen::VectorXd v, double t = 0.0);
};

/// Gaussian of standard deviation 2h centred at x0, normalised to unit
/// trapezoid mass. Requires |x0| <= L - 3h.
DensityField delta_init(const Grid1D& grid, double x0);

/// Trapezoid integral over the grid.
double total_mass(const DensityField& field);
double total_mass(const Grid1D& grid, const Eigen::Ref<const Eigen::VectorXd>& values);

/// Node reversal x -> -x.
DensityField reflect(const DensityField& field);

}  // namespace mpp
