#pragma once

#include <string_view>
#include <vector>

#include "mpp/density.hpp"
#include "mpp/errors.hpp"
#include "mpp/evolution_operator.hpp"
#include "mpp/solver.hpp"

namespace mpp {

struct RidgePoint {
  double location = 0.0;
  /// Two separated local maxima agree to 1e-9 relative; location is the
  /// nonnegative one and its mirror image is an equally valid maximiser.
  bool tie = false;
  /// The maximum sits on the first or last node (returned unrefined).
  bool at_boundary = false;
};

/// Maximiser of a sampled density: discrete argmax refined by a three-point
/// parabola through the peak node and its neighbours.
RidgePoint ridge_point(const Grid1D& grid, const Eigen::Ref<const Eigen::VectorXd>& values);
RidgePoint ridge_point(const DensityField& field);

struct TrackerConfig {
  TimeConfig time;
  BoundaryPolicy boundary = BoundaryPolicy::reinject;
  /// An orbit is settled when its ridge speed stays below this over the last
  /// settle_window fraction of the horizon.
  double settle_speed = 1e-3;
  double settle_window = 0.1;
  /// Horizon doublings attempted for unsettled orbits.
  int max_extensions = 4;
  /// Inner probes at +-probe_inner * h; clustering tolerance cluster_factor * h.
  double probe_inner = 5.0;
  double cluster_factor = 3.0;
  /// Geometric ladder from the inner probe out to ladder_outer * L.
  int ladder_points = 5;
  double ladder_outer = 0.8;

  void validate() const;
};

struct MostProbableOrbit {
  double x0 = 0.0;
  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> speeds;  // |dx_m/dt| between consecutive snapshots, 0 first
  std::vector<bool> ties;
  bool settled = false;
  double horizon = 0.0;
  /// Largest ridge speed over the final settling window.
  double window_speed = 0.0;
  double final_position = 0.0;
  bool final_tie = false;
};

/// Most probable orbits for several initial states sharing one operator and
/// one factorisation. Each orbit is reported at the first horizon (T, 2T, ...)
/// at which it is settled, or at the last extension otherwise. Throws
/// SolverError when an orbit ends on the window edge (L too small).
std::vector<MostProbableOrbit> most_probable_orbits(const EvolutionOperator& op,
                                                    const std::vector<double>& initial_states,
                                                    const TrackerConfig& config);

MostProbableOrbit most_probable_orbit(const ModelSpec& model, double x0, const Grid1D& grid,
                                      const TrackerConfig& config);

enum class Stability { stable, unstable };
std::string_view to_string(Stability s);

struct EquilibriumState {
  double location = 0.0;
  Stability stability = Stability::stable;
  std::vector<double> witnesses;  // initial states supporting the classification
};

/// Raised when some orbits do not settle even after horizon extension.
class UnresolvedEquilibria : public SolverError {
 public:
  UnresolvedEquilibria(std::vector<double> offending, const std::string& context = {});
  const std::vector<double>& offending() const noexcept { return offending_; }

 private:
  std::vector<double> offending_;
};

/// +-probe_inner*h plus a geometric ladder to ladder_outer*L, mirrored; sorted.
std::vector<double> default_probes(const Grid1D& grid, const TrackerConfig& config);

/// Throws DomainError unless the set has at least 5 points, is symmetric
/// about 0, contains +-probe_inner*h and stays at least 3h inside the window.
void check_probe_set(const std::vector<double>& initial_set, const Grid1D& grid,
                     const TrackerConfig& config);

/// Most probable equilibrium states seen from a symmetric probe set. Settled
/// endpoints are clustered (single linkage, tolerance cluster_factor*h); every
/// cluster away from 0 is a stable state. The state at 0 is always present:
/// stable when the +-inner probes settle within the tolerance of 0, unstable
/// otherwise. Sorted by location.
std::vector<EquilibriumState> find_equilibria(const ModelSpec& model,
                                              const std::vector<double>& initial_set,
                                              const Grid1D& grid, const TrackerConfig& config);

std::vector<EquilibriumState> find_equilibria(const EvolutionOperator& op,
                                              const std::vector<double>& initial_set,
                                              const TrackerConfig& config);

/// Equilibria from already computed orbits (no further solving).
std::vector<EquilibriumState> classify_endpoints(const std::vector<MostProbableOrbit>& orbits,
                                                 const Grid1D& grid, const TrackerConfig& config);

}  // namespace mpp
