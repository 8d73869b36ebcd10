#pragma once

#include <string_view>

#include <Eigen/Core>

#include "mpp/grid.hpp"
#include "mpp/model.hpp"

namespace mpp {

/// What happens to probability that leaves [-L, L].
///
/// `absorbing`: p = 0 outside the window and the mass is lost.
/// `reinject`: mass that jumps past an edge is deposited on that edge's node.
/// The cubic drift returns any exterior excursion to the window in a time of
/// order 1/(2L^2), so this keeps the density a probability density.
enum class BoundaryPolicy { reinject, absorbing };

std::string_view to_string(BoundaryPolicy policy);
BoundaryPolicy parse_boundary_policy(std::string_view text);

/// Tridiagonal matrix stored by diagonals; lower[0] and upper[n-1] unused.
struct Tridiagonal {
  Eigen::VectorXd lower;
  Eigen::VectorXd diag;
  Eigen::VectorXd upper;

  explicit Tridiagonal(Eigen::Index n = 0)
      : lower(Eigen::VectorXd::Zero(n)), diag(Eigen::VectorXd::Zero(n)),
        upper(Eigen::VectorXd::Zero(n)) {}

  Eigen::Index size() const noexcept { return diag.size(); }
  Eigen::MatrixXd dense() const;
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;
};

/// Quadrature weights a_k, k = 1..K, such that for a smooth field q
///
///   int_{|y|>0} [q(x+y) - q(x)] nu_alpha(dy)
///     ~ sum_k a_k (q(x+kh) + q(x-kh) - 2 q(x)) - q(x) nu_alpha(|y| > Kh).
///
/// g(y) / y^2 is interpolated piecewise linearly against y^(1-alpha) on
/// [h, Kh] and held at its value at h on the hole |y| < h, where the
/// symmetric second difference is exactly the local Taylor term.
/// Entry 0 of the result is unused.
Eigen::VectorXd nonlocal_weights(double alpha, double spacing, Eigen::Index max_offset);

/// Discrete int [q(x+y) - q(x)] nu_alpha(dy) at every node, for q given on
/// the nodes and zero outside the window. This is the stencil of the levy
/// operator before its columns are scaled by |x|^alpha.
Eigen::VectorXd nonlocal_apply(double alpha, const Grid1D& grid,
                               const Eigen::Ref<const Eigen::VectorXd>& q);

/// Discretised Fokker-Planck operator A* for one model on one grid:
/// dp/dt = A* p. Immutable after construction.
class EvolutionOperator {
 public:
  EvolutionOperator(const Grid1D& grid, const ModelSpec& model,
                    BoundaryPolicy boundary = BoundaryPolicy::reinject);

  const Grid1D& grid() const noexcept { return grid_; }
  const ModelSpec& model() const noexcept { return model_; }
  BoundaryPolicy boundary() const noexcept { return boundary_; }
  NoiseKind noise_kind() const noexcept { return model_.noise; }

  /// Full operator as a dense (2M+1)^2 matrix.
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }

  /// Upwind finite-volume discretisation of -(f p)_x.
  const Tridiagonal& drift_part() const noexcept { return drift_; }
  /// matrix() minus the drift part.
  Eigen::MatrixXd noise_part() const;

  /// True when the operator is tridiagonal (noise kinds none and brownian).
  bool is_local() const noexcept { return model_.noise != NoiseKind::levy; }
  /// Whole operator in tridiagonal form; valid only when is_local().
  const Tridiagonal& local_part() const noexcept { return local_; }

  /// Mass-loss rate per unit density at each node: d(mass)/dt = -leak_rates . p.
  /// Zero to rounding under the reinject policy.
  const Eigen::VectorXd& leak_rates() const noexcept { return leak_rates_; }
  /// Rate at which mass jumps past the window edges, per unit density at each
  /// node. Under `reinject` this mass is returned; under `absorbing` it is the
  /// noise share of leak_rates().
  const Eigen::VectorXd& exterior_rates() const noexcept { return exterior_rates_; }

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& p) const;

 private:
  void assemble_drift();
  void assemble_brownian(Tridiagonal& diffusion);
  void assemble_levy();

  Grid1D grid_;
  ModelSpec model_;
  BoundaryPolicy boundary_;
  Tridiagonal drift_;
  Tridiagonal local_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd leak_rates_;
  Eigen::VectorXd exterior_rates_;
};

EvolutionOperator assemble_evolution_operator(const Grid1D& grid, const ModelSpec& model,
                                              BoundaryPolicy boundary = BoundaryPolicy::reinject);

}  // namespace mpp
