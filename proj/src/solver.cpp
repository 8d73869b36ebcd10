#include "mpp/solver.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mpp/errors.hpp"

#if defined(__SSE2__)
#include <xmmintrin.h>
#endif

namespace mpp {

long TimeConfig::step_count() const {
  validate();
  const double ratio = horizon / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw DomainError("time.T / time.dt must be an integer");
  }
  return static_cast<long>(rounded);
}

void TimeConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("time.T must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time.dt must be positive");
  if (snapshot_every < 1) throw DomainError("time.snapshot_every must be at least 1");
  if (smoothing_steps < 0) throw DomainError("time.smoothing_steps must be nonnegative");
}

void enforce_positivity(Eigen::Ref<Eigen::MatrixXd> columns) {
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    auto col = columns.col(c);
    const double top = col.maxCoeff();
    if (!(top > 0.0) || !std::isfinite(top)) {
      throw SolverError("density lost its positive maximum (unstable configuration)");
    }
    const double floor = -kNegativityTolerance * top;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (col[i] < 0.0) {
        if (col[i] < floor) {
          throw SolverError("negative density " + std::to_string(col[i] / top) +
                            " x max exceeds tolerance (unstable configuration)");
        }
        col[i] = 0.0;
      }
    }
  }
}

DensityField advance(const DensityField& field, const EvolutionOperator& op, double dt) {
  if (!(dt > 0.0)) throw DomainError("time step dt must be positive");
  if (!(field.grid == op.grid())) throw DomainError("field and operator use different grids");
  Eigen::MatrixXd p = field.values;
  Propagator(op, dt, 1).crank_nicolson(p);
  enforce_positivity(p);
  return DensityField(field.grid, p.col(0), field.time + dt);
}

namespace {

// Far tails of a spike decay into subnormal range, where arithmetic is
// very slow. Flush them to zero for the duration of a stepping call.
class FlushDenormals {
 public:
#if defined(__SSE2__)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
  ~FlushDenormals() { _mm_setcsr(saved_); }

 private:
  unsigned saved_;
#endif
};

}  // namespace

Propagator::Propagator(const EvolutionOperator& op, double dt, int block_steps)
    : grid_(op.grid()), dt_(dt), block_steps_(block_steps), local_(op.is_local()) {
  if (!(dt > 0.0)) throw DomainError("time step dt must be positive");
  if (block_steps < 1) throw DomainError("block length must be at least 1");
  const FlushDenormals ftz;
  const double half = 0.5 * dt;

  if (local_) {
    const Tridiagonal& a = op.local_part();
    const Eigen::Index n = a.size();
    explicit_ = a;
    explicit_.lower *= half;
    explicit_.upper *= half;
    explicit_.diag = Eigen::VectorXd::Ones(n) + half * a.diag;

    // (I - dt/2 A) is column diagonally dominant, so elimination without
    // pivoting is stable.
    thomas_lower_ = -half * a.lower;
    thomas_upper_ = Eigen::VectorXd::Zero(n);
    thomas_inv_pivot_ = Eigen::VectorXd::Zero(n);
    double prev_upper = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double pivot = 1.0 - half * a.diag[i] - (i > 0 ? thomas_lower_[i] * prev_upper : 0.0);
      if (pivot == 0.0 || !std::isfinite(pivot)) throw SolverError("singular implicit matrix");
      thomas_inv_pivot_[i] = 1.0 / pivot;
      prev_upper = (i + 1 < n ? -half * a.upper[i] : 0.0) / pivot;
      thomas_upper_[i] = prev_upper;
    }
    return;
  }

  const Eigen::Index n = op.matrix().rows();
  Eigen::MatrixXd implicit = -half * op.matrix();
  implicit.diagonal().array() += 1.0;
  lu_.compute(implicit);
  const double rcond = lu_.rcond();
  if (!(rcond > 1e-14)) throw SolverError("implicit Crank-Nicolson matrix is singular");

  Eigen::MatrixXd rhs = half * op.matrix();
  rhs.diagonal().array() += 1.0;
  step_ = lu_.solve(rhs);

  // block_ = step_^block_steps by binary powering.
  if (block_steps_ > 1) {
    Eigen::MatrixXd base = step_;
    Eigen::MatrixXd result;
    bool have_result = false;
    Eigen::MatrixXd scratch(n, n);
    for (int e = block_steps_; e > 0; e >>= 1) {
      if (e & 1) {
        if (have_result) {
          scratch.noalias() = result * base;
          result.swap(scratch);
        } else {
          result = base;
          have_result = true;
        }
      }
      if (e > 1) {
        scratch.noalias() = base * base;
        base.swap(scratch);
      }
    }
    block_ = std::move(result);
  }
}

void Propagator::solve_implicit(Eigen::MatrixXd& rhs) const {
  if (!local_) {
    rhs = lu_.solve(rhs);
    return;
  }
  // Sweep all columns together: the inner loop over columns hides the
  // serial dependency of the elimination.
  const Eigen::Index n = rhs.rows();
  const Eigen::Index k = rhs.cols();
  for (Eigen::Index c = 0; c < k; ++c) rhs(0, c) *= thomas_inv_pivot_[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    const double l = thomas_lower_[i];
    const double inv = thomas_inv_pivot_[i];
    for (Eigen::Index c = 0; c < k; ++c) rhs(i, c) = (rhs(i, c) - l * rhs(i - 1, c)) * inv;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    const double u = thomas_upper_[i];
    for (Eigen::Index c = 0; c < k; ++c) rhs(i, c) -= u * rhs(i + 1, c);
  }
}

void Propagator::crank_nicolson(Eigen::MatrixXd& columns) const {
  if (!local_) {
    columns = step_ * columns;
    return;
  }
  const Eigen::Index n = columns.rows();
  const auto& lo = explicit_.lower;
  const auto& di = explicit_.diag;
  const auto& up = explicit_.upper;
  thread_local Eigen::MatrixXd out;
  out.resize(n, columns.cols());
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    const double* p = columns.col(c).data();
    double* q = out.col(c).data();
    q[0] = di[0] * p[0] + up[0] * p[1];
    for (Eigen::Index i = 1; i + 1 < n; ++i) q[i] = lo[i] * p[i - 1] + di[i] * p[i] + up[i] * p[i + 1];
    q[n - 1] = lo[n - 1] * p[n - 2] + di[n - 1] * p[n - 1];
  }
  columns.swap(out);
  solve_implicit(columns);
}

void Propagator::implicit_half_step(Eigen::MatrixXd& columns) const { solve_implicit(columns); }

void Propagator::advance_block(Eigen::MatrixXd& columns) const {
  if (!local_ && block_steps_ > 1) {
    columns = block_ * columns;
    return;
  }
  for (int s = 0; s < block_steps_; ++s) crank_nicolson(columns);
}

BatchEvolution::BatchEvolution(std::shared_ptr<const Propagator> propagator,
                               Eigen::MatrixXd initial, int smoothing_steps)
    : propagator_(std::move(propagator)), state_(std::move(initial)),
      smoothing_left_(smoothing_steps) {
  if (!propagator_) throw DomainError("missing propagator");
  if (static_cast<std::size_t>(state_.rows()) != propagator_->grid().size()) {
    throw DomainError("initial densities do not match the propagator grid");
  }
}

double BatchEvolution::time() const noexcept {
  return static_cast<double>(steps_) * propagator_->dt();
}

void BatchEvolution::advance(long steps) {
  const FlushDenormals ftz;
  long remaining = steps;
  while (remaining > 0 && smoothing_left_ > 0) {
    propagator_->implicit_half_step(state_);
    propagator_->implicit_half_step(state_);
    --smoothing_left_;
    --remaining;
  }
  const long block = propagator_->block_steps();
  while (remaining >= block) {
    propagator_->advance_block(state_);
    remaining -= block;
  }
  while (remaining > 0) {
    propagator_->crank_nicolson(state_);
    --remaining;
  }
  steps_ += steps;
  enforce_positivity(state_);
}

std::vector<DensityField> solve_density(const ModelSpec& model, double x0, const TimeConfig& time,
                                        const Grid1D& grid, BoundaryPolicy boundary) {
  time.validate();
  return solve_density(EvolutionOperator(grid, model, boundary), x0, time);
}

std::vector<DensityField> solve_density(const EvolutionOperator& op, double x0,
                                        const TimeConfig& time) {
  const long total = time.step_count();
  const Grid1D& grid = op.grid();
  DensityField start = delta_init(grid, x0);

  auto propagator = std::make_shared<const Propagator>(op, time.dt, time.snapshot_every);
  BatchEvolution evolution(propagator, start.values, time.smoothing_steps);

  std::vector<DensityField> out;
  out.reserve(static_cast<std::size_t>(total / time.snapshot_every + 2));
  out.push_back(std::move(start));
  while (evolution.steps_taken() < total) {
    const long step = std::min<long>(time.snapshot_every, total - evolution.steps_taken());
    evolution.advance(step);
    out.emplace_back(grid, evolution.state().col(0), evolution.time());
  }
  return out;
}

MassAudit audit_mass(const EvolutionOperator& op, const std::vector<DensityField>& snapshots) {
  MassAudit audit;
  double prev_leak = 0.0;
  double prev_ext = 0.0;
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    const auto& s = snapshots[k];
    const double leak = op.leak_rates().dot(s.values);
    const double ext = op.exterior_rates().dot(s.values);
    if (k > 0) {
      const double span = s.time - audit.times.back();
      audit.audited_leak += 0.5 * span * (leak + prev_leak);
      audit.exterior_flux += 0.5 * span * (ext + prev_ext);
    }
    audit.times.push_back(s.time);
    audit.masses.push_back(total_mass(s));
    prev_leak = leak;
    prev_ext = ext;
  }
  return audit;
}

}  // namespace mpp
