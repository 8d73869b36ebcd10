#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mpp/density.hpp"
#include "mpp/model.hpp"

namespace mpp {

/// How the noise enters: sigma(x) = x (the model) or sigma(x) = const
/// (calibration mode with closed-form marginals).
enum class NoiseScaling { state, constant };

struct SimulationConfig {
  ModelSpec model;
  NoiseScaling scaling = NoiseScaling::state;
  double sigma = 1.0;  // amplitude in constant mode
  bool include_drift = true;
  double x0 = 1.0;
  double horizon = 1.0;
  double dt = 1e-3;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  /// Paths with |X| above this are frozen and flagged as escaped.
  double escape_radius = 100.0;
  /// Paths are also flagged once |X| exceeds this window; 0 disables.
  double window = 0.0;
  int threads = 0;

  void validate() const;
};

struct PathEnsemble {
  SimulationConfig config;
  std::vector<double> endpoints;
  std::vector<std::uint8_t> escaped;
  std::vector<std::uint8_t> left_window;

  std::size_t size() const noexcept { return endpoints.size(); }
  std::size_t escaped_count() const;
  double escaped_fraction() const;
  double left_window_fraction() const;
};

/// Euler-Maruyama with stable (or Gaussian) increments:
///   X <- X + f(X) dt + sigma(X) dt^(1/alpha) Z.
/// Path k draws from Philox stream k only, so results do not depend on the
/// thread count. Throws SolverError when every path escapes.
PathEnsemble simulate_endpoints(const SimulationConfig& config);

PathEnsemble simulate_endpoints(const ModelSpec& model, double x0, double horizon, double dt,
                                std::size_t n_paths, std::uint64_t seed,
                                double escape_radius = 100.0);

/// Histogram of non-escaped endpoints on cells centred at the nodes (half
/// cells at +-L). Endpoints outside the window go to the edge cells, so the
/// trapezoid mass equals the non-escaped fraction.
DensityField empirical_density(const PathEnsemble& ensemble, const Grid1D& grid);

/// Trapezoid integral of |a - b|; throws DomainError on a grid mismatch.
double l1_distance(const DensityField& a, const DensityField& b);

}  // namespace mpp
