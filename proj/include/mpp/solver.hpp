#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "mpp/density.hpp"
#include "mpp/evolution_operator.hpp"

namespace mpp {

struct TimeConfig {
  double horizon = 10.0;
  double dt = 1e-3;
  /// Steps between stored snapshots.
  int snapshot_every = 50;
  /// Number of leading Crank-Nicolson steps replaced by two implicit-Euler
  /// half steps each (Rannacher start). Damps the stiff modes of the initial
  /// spike, which otherwise ring negative while a far-out spike is swept in by
  /// the cubic drift. Zero gives pure Crank-Nicolson.
  int smoothing_steps = 100;

  /// Number of time steps in the horizon; throws DomainError unless
  /// horizon / dt is an integer.
  long step_count() const;
  void validate() const;
};

/// Relative negativity that advance() tolerates (and clamps) before failing.
inline constexpr double kNegativityTolerance = 1e-10;

/// Clamps entries in [-tol * max, 0) of every column to zero; throws
/// SolverError if a column has a more negative entry or no positive maximum.
void enforce_positivity(Eigen::Ref<Eigen::MatrixXd> columns);

/// One Crank-Nicolson step (I - dt/2 A) p+ = (I + dt/2 A) p with the
/// positivity policy above. Factorises on every call; use Propagator for
/// repeated steps.
DensityField advance(const DensityField& field, const EvolutionOperator& op, double dt);

/// Reusable time stepper for one operator and step size. Holds a single
/// factorisation of (I - dt/2 A). For dense operators it also holds the
/// one-step matrix S and its power S^block_steps, so a snapshot interval costs
/// one matrix product regardless of its length. Immutable after construction.
class Propagator {
 public:
  Propagator(const EvolutionOperator& op, double dt, int block_steps);

  double dt() const noexcept { return dt_; }
  int block_steps() const noexcept { return block_steps_; }
  const Grid1D& grid() const noexcept { return grid_; }

  void crank_nicolson(Eigen::MatrixXd& columns) const;
  /// Implicit Euler over dt/2; shares the Crank-Nicolson factorisation.
  void implicit_half_step(Eigen::MatrixXd& columns) const;
  /// block_steps Crank-Nicolson steps.
  void advance_block(Eigen::MatrixXd& columns) const;

 private:
  void solve_implicit(Eigen::MatrixXd& rhs) const;

  Grid1D grid_;
  double dt_;
  int block_steps_;
  bool local_;
  // Local (tridiagonal) path: explicit half and Thomas factors of the implicit half.
  Tridiagonal explicit_;
  Eigen::VectorXd thomas_lower_, thomas_upper_, thomas_inv_pivot_;
  // Dense path.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::MatrixXd step_;
  Eigen::MatrixXd block_;
};

/// A batch of densities (one per column) advanced snapshot by snapshot.
class BatchEvolution {
 public:
  BatchEvolution(std::shared_ptr<const Propagator> propagator, Eigen::MatrixXd initial,
                 int smoothing_steps);

  double time() const noexcept;
  long steps_taken() const noexcept { return steps_; }
  const Eigen::MatrixXd& state() const noexcept { return state_; }

  /// Advances by `steps` time steps (one snapshot interval when steps equals
  /// the propagator block) and applies the positivity policy.
  void advance(long steps);

 private:
  std::shared_ptr<const Propagator> propagator_;
  Eigen::MatrixXd state_;
  int smoothing_left_;
  long steps_ = 0;
};

/// Density snapshots from p(x, 0) = mollified delta at x0, every
/// snapshot_every steps up to the horizon (the last snapshot is always at the
/// horizon). The operator is assembled and factorised once.
std::vector<DensityField> solve_density(const ModelSpec& model, double x0, const TimeConfig& time,
                                        const Grid1D& grid,
                                        BoundaryPolicy boundary = BoundaryPolicy::reinject);

std::vector<DensityField> solve_density(const EvolutionOperator& op, double x0,
                                        const TimeConfig& time);

struct MassAudit {
  std::vector<double> times;
  std::vector<double> masses;
  /// Time integral of leak_rates . p (trapezoid over snapshots).
  double audited_leak = 0.0;
  /// Time integral of exterior_rates . p: mass that jumped or diffused past
  /// the window edges (returned under reinject, lost under absorbing).
  double exterior_flux = 0.0;

  double mass_change() const { return masses.empty() ? 0.0 : masses.back() - masses.front(); }
};

MassAudit audit_mass(const EvolutionOperator& op, const std::vector<DensityField>& snapshots);

}  // namespace mpp
