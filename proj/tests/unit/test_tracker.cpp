#include <doctest.h>

#include <cmath>
#include <vector>

#include "mpp/density.hpp"
#include "mpp/errors.hpp"
#include "mpp/tracker.hpp"

using namespace mpp;

namespace {

// Closed-form solution of dx/dt = r x - x^3.
double ode_solution(double r, double x0, double t) {
  const double e = std::exp(2.0 * r * t);
  return x0 * std::sqrt(e / (1.0 + x0 * x0 * (e - 1.0) / r));
}

Eigen::VectorXd parabola(const Grid1D& g, double peak) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g.node(i) - peak;
    v[static_cast<Eigen::Index>(i)] = std::max(0.0, 1.0 - 4.0 * d * d);
  }
  return v;
}

}  // namespace

TEST_CASE("ridge point is exact on parabolas") {
  const Grid1D g(2.0, 100);
  const auto p = ridge_point(g, parabola(g, 0.3037));
  CHECK(p.location == doctest::Approx(0.3037).epsilon(1e-12));
  CHECK_FALSE(p.tie);
  CHECK_FALSE(p.at_boundary);
}

TEST_CASE("ridge point is scale invariant and mirrors") {
  const Grid1D g(3.0, 150);
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    v[static_cast<Eigen::Index>(i)] = std::exp(-3.0 * (x - 0.71) * (x - 0.71)) + 0.2 * std::exp(-x * x);
  }
  const double base = ridge_point(g, v).location;
  for (double c : {1e-6, 0.5, 3.0, 1e8}) {
    const Eigen::VectorXd scaled = c * v;
    CHECK(ridge_point(g, scaled).location == doctest::Approx(base).epsilon(1e-13));
  }
  const Eigen::VectorXd mirrored = v.reverse();
  CHECK(ridge_point(g, mirrored).location == doctest::Approx(-base).epsilon(1e-12));
}

TEST_CASE("symmetric double peaks are reported as a tie at the nonnegative maximum") {
  const Grid1D g(3.0, 150);
  const Eigen::VectorXd v = parabola(g, 1.0) + parabola(g, -1.0);
  const auto p = ridge_point(g, v);
  CHECK(p.tie);
  CHECK(p.location == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("boundary maxima are flagged and degenerate fields rejected") {
  const Grid1D g(1.0, 20);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  v[v.size() - 1] = 1.0;
  const auto p = ridge_point(g, v);
  CHECK(p.at_boundary);
  CHECK(p.location == doctest::Approx(1.0));
  v.setZero();
  CHECK_THROWS_AS(ridge_point(g, v), DomainError);
}

TEST_CASE("deterministic orbit follows the ODE within 2h") {
  const Grid1D g(10.0, 1000);
  const double h = g.spacing();
  TrackerConfig cfg;
  cfg.time.snapshot_every = 10;
  const auto orbit = most_probable_orbit(ModelSpec::deterministic(1.0), 0.3, g, cfg);
  REQUIRE(orbit.times.size() == orbit.positions.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < orbit.times.size(); ++k) {
    worst = std::max(worst, std::abs(orbit.positions[k] - ode_solution(1.0, 0.3, orbit.times[k])));
  }
  CHECK(worst < 2.0 * h);
  CHECK(orbit.settled);
  CHECK(orbit.final_position == doctest::Approx(1.0).epsilon(2.0 * h));
}

TEST_CASE("deterministic equilibria") {
  const Grid1D g(10.0, 1000);
  const double h = g.spacing();
  const TrackerConfig cfg;
  const auto probes = default_probes(g, cfg);

  const auto up = find_equilibria(ModelSpec::deterministic(1.0), probes, g, cfg);
  REQUIRE(up.size() == 3);
  CHECK(up[0].location == doctest::Approx(-1.0).epsilon(2.0 * h));
  CHECK(up[0].stability == Stability::stable);
  CHECK(up[1].location == 0.0);
  CHECK(up[1].stability == Stability::unstable);
  CHECK(up[2].location == doctest::Approx(1.0).epsilon(2.0 * h));
  CHECK(up[2].stability == Stability::stable);

  const auto down = find_equilibria(ModelSpec::deterministic(-1.0), probes, g, cfg);
  REQUIRE(down.size() == 1);
  CHECK(down[0].location == 0.0);
  CHECK(down[0].stability == Stability::stable);
}

TEST_CASE("default probes form a valid symmetric set") {
  const Grid1D g(10.0, 1000);
  const TrackerConfig cfg;
  const auto probes = default_probes(g, cfg);
  REQUIRE(probes.size() == 12);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    CHECK(probes[i] == -probes[probes.size() - 1 - i]);
    if (i > 0) CHECK(probes[i] > probes[i - 1]);
  }
  CHECK(probes.back() == doctest::Approx(8.0));
  CHECK_NOTHROW(check_probe_set(probes, g, cfg));
}

TEST_CASE("probe sets are validated") {
  const Grid1D g(10.0, 1000);
  const TrackerConfig cfg;
  CHECK_THROWS_AS(check_probe_set({-0.1, 0.1, 1.0}, g, cfg), DomainError);
  CHECK_THROWS_AS(check_probe_set({-2.0, -1.0, -0.05, 0.05, 1.0, 3.0}, g, cfg), DomainError);
  CHECK_THROWS_AS(check_probe_set({-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}, g, cfg), DomainError);
  CHECK_THROWS_AS(check_probe_set({-9.99, -1.0, -0.05, 0.05, 1.0, 9.99}, g, cfg), DomainError);
  CHECK_NOTHROW(check_probe_set({-2.0, -1.0, -0.05, 0.05, 1.0, 2.0}, g, cfg));
}

TEST_CASE("unsettled orbits raise an unresolved error naming them") {
  const Grid1D g(5.0, 250);
  TrackerConfig cfg;
  cfg.time.horizon = 0.5;
  cfg.max_extensions = 0;
  const std::vector<double> probes{-2.0, -1.0, -0.1, 0.1, 1.0, 2.0};
  try {
    find_equilibria(ModelSpec::deterministic(1.0), probes, g, cfg);
    FAIL("expected UnresolvedEquilibria");
  } catch (const UnresolvedEquilibria& e) {
    CHECK_FALSE(e.offending().empty());
    CHECK(std::string(e.what()).find("0.1") != std::string::npos);
  }
}

TEST_CASE("tracker config validation") {
  TrackerConfig cfg;
  cfg.settle_window = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = TrackerConfig{};
  cfg.ladder_points = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = TrackerConfig{};
  cfg.settle_speed = -1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("levy orbits and equilibria at alpha 0.3") {
  const Grid1D g(10.0, 1000);
  const TrackerConfig cfg;

  const auto decaying = most_probable_orbit(ModelSpec::levy(-0.9, 0.3), 0.5, g, cfg);
  CHECK(std::abs(decaying.final_position) < 0.05);

  const auto rising = most_probable_orbit(ModelSpec::levy(0.8, 0.3), 1.5, g, cfg);
  CHECK(rising.final_position == doctest::Approx(1.0).epsilon(0.1));

  const auto eq = find_equilibria(ModelSpec::levy(0.8, 0.3), {-1.5, -0.5, -0.05, 0.05, 0.5, 1.5}, g, cfg);
  REQUIRE(eq.size() == 3);
  CHECK(eq[0].location == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(eq[0].stability == Stability::stable);
  CHECK(eq[1].stability == Stability::unstable);
  CHECK(eq[2].location == doctest::Approx(1.0).epsilon(0.1));
  CHECK(eq[2].stability == Stability::stable);

  const auto quiet = find_equilibria(ModelSpec::levy(-0.9, 0.3), default_probes(g, cfg), g, cfg);
  REQUIRE(quiet.size() == 1);
  CHECK(quiet[0].stability == Stability::stable);
}

TEST_CASE("brownian orbits settle on the stationary ridge") {
  // Stationary density of dX = (rX - X^3)dt + X dB is x^(2r-2) exp(-x^2),
  // maximal at sqrt(r - 1) for r > 1.
  const Grid1D g(10.0, 1000);
  const double h = g.spacing();
  const TrackerConfig cfg;
  for (double r : {2.0, 5.0}) {
    const auto orbit = most_probable_orbit(ModelSpec::brownian(r), 1.5, g, cfg);
    CAPTURE(r);
    CHECK(orbit.settled);
    CHECK(std::abs(orbit.final_position - std::sqrt(r - 1.0)) < 2.0 * h);
  }
}
