#include <doctest.h>

#include <cmath>
#include <memory>

#include "mpp/density.hpp"
#include "mpp/errors.hpp"
#include "mpp/solver.hpp"

using namespace mpp;

namespace {

TimeConfig short_run(double horizon, double dt = 1e-3, int every = 50) {
  TimeConfig t;
  t.horizon = horizon;
  t.dt = dt;
  t.snapshot_every = every;
  return t;
}

double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("time configuration validation") {
  CHECK(short_run(1.0).step_count() == 1000);
  CHECK(short_run(10.0).step_count() == 10000);
  CHECK_THROWS_WITH_AS(short_run(1.0, 0.3).step_count(), doctest::Contains("time.T / time.dt"),
                       DomainError);
  CHECK_THROWS_AS(short_run(-1.0).validate(), DomainError);
  CHECK_THROWS_AS(short_run(1.0, 0.0).validate(), DomainError);
  CHECK_THROWS_AS(short_run(1.0, 1e-3, 0).validate(), DomainError);
}

TEST_CASE("positivity policy clamps tiny negatives and rejects large ones") {
  Eigen::MatrixXd m(3, 1);
  m << 1.0, -1e-12, 0.5;
  enforce_positivity(m);
  CHECK(m(1, 0) == 0.0);
  m << 1.0, -1e-6, 0.5;
  CHECK_THROWS_AS(enforce_positivity(m), SolverError);
  m << 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(enforce_positivity(m), SolverError);
}

TEST_CASE("snapshots follow the configured cadence and stay nonnegative") {
  const Grid1D g(5.0, 100);
  const auto snaps = solve_density(ModelSpec::levy(0.8, 0.5), 1.0, short_run(0.23, 1e-3, 50), g);
  REQUIRE(snaps.size() == 6);  // 0, 0.05, ..., 0.2 and the horizon
  CHECK(snaps.front().time == 0.0);
  CHECK(snaps[1].time == doctest::Approx(0.05));
  CHECK(snaps.back().time == doctest::Approx(0.23));
  CHECK((snaps.front().values - delta_init(g, 1.0).values).cwiseAbs().maxCoeff() == 0.0);
  for (const auto& s : snaps) CHECK(s.values.minCoeff() >= 0.0);
}

TEST_CASE("reinject keeps unit mass") {
  const Grid1D g(10.0, 300);
  for (const auto& m : {ModelSpec::levy(0.8, 0.3), ModelSpec::levy(-0.5, 1.7), ModelSpec::brownian(1.0)}) {
    const auto snaps = solve_density(m, 1.5, short_run(2.0), g);
    for (const auto& s : snaps) CHECK(total_mass(s) == doctest::Approx(1.0).epsilon(1e-10));
    const auto audit = audit_mass(EvolutionOperator(g, m), snaps);
    CHECK(std::abs(audit.audited_leak) < 1e-10);
    CHECK(audit.exterior_flux >= 0.0);
  }
}

TEST_CASE("absorbing mass loss matches the leakage audit") {
  const Grid1D g(4.0, 160);
  const EvolutionOperator op(g, ModelSpec::levy(0.8, 0.6), BoundaryPolicy::absorbing);
  const auto snaps = solve_density(op, 1.0, short_run(2.0, 1e-3, 10));
  const auto audit = audit_mass(op, snaps);
  CHECK(audit.mass_change() < 0.0);
  CHECK(-audit.mass_change() == doctest::Approx(audit.audited_leak).epsilon(2e-2));
  CHECK(audit.exterior_flux == doctest::Approx(audit.audited_leak).epsilon(1e-9));
}

TEST_CASE("solution is reflection equivariant") {
  const Grid1D g(6.0, 150);
  for (const auto& m : {ModelSpec::levy(0.8, 0.9), ModelSpec::brownian(0.5), ModelSpec::deterministic(1.0)}) {
    const auto a = solve_density(m, 0.7, short_run(1.0), g);
    const auto b = solve_density(m, -0.7, short_run(1.0), g);
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(max_abs(reflect(a[k]).values - b[k].values) <= 1e-10 * max_abs(a[k].values));
    }
  }
}

TEST_CASE("advance is one Crank-Nicolson step") {
  const Grid1D g(3.0, 40);
  const EvolutionOperator op(g, ModelSpec::levy(0.3, 1.2));
  const auto p0 = delta_init(g, 0.5);
  const double dt = 1e-3;
  const auto p1 = advance(p0, op, dt);
  const Eigen::MatrixXd a = op.matrix();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::VectorXd rhs = (id + 0.5 * dt * a) * p0.values;
  const Eigen::VectorXd residual = (id - 0.5 * dt * a) * p1.values - rhs;
  CHECK(max_abs(residual) <= 1e-12 * max_abs(rhs));
  CHECK(p1.time == doctest::Approx(dt));
  CHECK_THROWS_AS(advance(delta_init(Grid1D(3.0, 41), 0.0), op, dt), DomainError);
}

TEST_CASE("block power equals repeated single steps") {
  const Grid1D g(3.0, 60);
  const EvolutionOperator op(g, ModelSpec::levy(0.8, 0.7));
  const auto blocked = std::make_shared<const Propagator>(op, 1e-3, 37);
  const auto single = std::make_shared<const Propagator>(op, 1e-3, 1);
  Eigen::MatrixXd a = delta_init(g, 1.0).values;
  Eigen::MatrixXd b = a;
  blocked->advance_block(a);
  for (int s = 0; s < 37; ++s) single->crank_nicolson(b);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * b.cwiseAbs().maxCoeff());
}

TEST_CASE("Crank-Nicolson converges at second order in dt") {
  // Fixed number of smoothing steps, so the start-up error is O(dt^2) too.
  const Grid1D g(4.0, 200);
  for (const auto& m : {ModelSpec::brownian(0.5), ModelSpec::levy(0.5, 1.3)}) {
    const auto end_state = [&](double dt) {
      TimeConfig t = short_run(0.4, dt, 1);
      t.smoothing_steps = 2;
      return solve_density(m, 1.0, t, g).back().values;
    };
    const Eigen::VectorXd a = end_state(0.02), b = end_state(0.01), c = end_state(0.005);
    const double ratio = max_abs(a - b) / max_abs(b - c);
    CAPTURE(m.describe());
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.2));
  }
}

TEST_CASE("far-out spikes swept in by the drift stay nonnegative") {
  const Grid1D g(10.0, 1000);
  for (const auto& m : {ModelSpec::deterministic(-1.0), ModelSpec::brownian(5.0)}) {
    const auto snaps = solve_density(m, 8.0, short_run(0.5), g);
    for (const auto& s : snaps) CHECK(s.values.minCoeff() >= 0.0);
  }
}
