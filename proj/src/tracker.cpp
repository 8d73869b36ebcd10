#include "mpp/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

namespace mpp {

RidgePoint ridge_point(const Grid1D& grid, const Eigen::Ref<const Eigen::VectorXd>& p) {
  const Eigen::Index n = p.size();
  if (n < 3) throw DomainError("ridge point needs at least three nodes");
  Eigen::Index peak = 0;
  const double top = p.maxCoeff(&peak);
  if (!(top > 0.0)) throw DomainError("ridge point of a density without positive maximum");

  // A second, separated local maximum of (almost) the same height means the
  // density is symmetric about 0; report the nonnegative representative.
  bool tie = false;
  const double tie_floor = top * (1.0 - 1e-9);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p[i] < tie_floor || std::abs(i - peak) <= 1) continue;
    const bool left_ok = i == 0 || p[i] >= p[i - 1];
    const bool right_ok = i == n - 1 || p[i] >= p[i + 1];
    if (!(left_ok && right_ok)) continue;
    tie = true;
    if (grid.node(static_cast<std::size_t>(i)) >= 0.0 &&
        grid.node(static_cast<std::size_t>(peak)) < 0.0) {
      peak = i;
    }
  }

  RidgePoint out;
  out.tie = tie;
  const double xp = grid.node(static_cast<std::size_t>(peak));
  if (peak == 0 || peak == n - 1) {
    out.location = xp;
    out.at_boundary = true;
    return out;
  }
  const double left = p[peak - 1];
  const double mid = p[peak];
  const double right = p[peak + 1];
  const double curvature = left - 2.0 * mid + right;
  out.location = curvature < 0.0 ? xp + 0.5 * grid.spacing() * (left - right) / curvature : xp;
  return out;
}

RidgePoint ridge_point(const DensityField& field) { return ridge_point(field.grid, field.values); }

void TrackerConfig::validate() const {
  time.validate();
  if (!(settle_speed > 0.0)) throw DomainError("probes.settle_speed must be positive");
  if (!(settle_window > 0.0 && settle_window <= 1.0)) {
    throw DomainError("probes.settle_window must lie in (0, 1]");
  }
  if (max_extensions < 0) throw DomainError("probes.max_extensions must be nonnegative");
  if (!(probe_inner > 0.0)) throw DomainError("probes.inner must be positive");
  if (!(cluster_factor > 0.0)) throw DomainError("probes.cluster must be positive");
  if (ladder_points < 1) throw DomainError("probes.ladder_points must be at least 1");
  if (!(ladder_outer > 0.0 && ladder_outer < 1.0)) {
    throw DomainError("probes.ladder_outer must lie in (0, 1)");
  }
}

namespace {

// Largest ridge speed over snapshots inside [horizon * (1 - window), horizon].
double window_speed(const MostProbableOrbit& o, double horizon, double window) {
  const double start = horizon * (1.0 - window) - 1e-9 * horizon;
  double worst = 0.0;
  for (std::size_t k = 1; k < o.times.size(); ++k) {
    if (o.times[k - 1] >= start) worst = std::max(worst, o.speeds[k]);
  }
  return worst;
}

void record(MostProbableOrbit& o, double t, const RidgePoint& rp) {
  double speed = 0.0;
  if (!o.times.empty()) speed = std::abs(rp.location - o.positions.back()) / (t - o.times.back());
  o.times.push_back(t);
  o.positions.push_back(rp.location);
  o.speeds.push_back(speed);
  o.ties.push_back(rp.tie);
}

}  // namespace

std::vector<MostProbableOrbit> most_probable_orbits(const EvolutionOperator& op,
                                                    const std::vector<double>& initial_states,
                                                    const TrackerConfig& config) {
  config.validate();
  if (initial_states.empty()) return {};
  const Grid1D& grid = op.grid();
  const long base_steps = config.time.step_count();
  const auto count = static_cast<Eigen::Index>(initial_states.size());

  Eigen::MatrixXd initial(static_cast<Eigen::Index>(grid.size()), count);
  std::vector<MostProbableOrbit> orbits(initial_states.size());
  for (Eigen::Index c = 0; c < count; ++c) {
    const double x0 = initial_states[static_cast<std::size_t>(c)];
    initial.col(c) = delta_init(grid, x0).values;
    orbits[static_cast<std::size_t>(c)].x0 = x0;
    record(orbits[static_cast<std::size_t>(c)], 0.0, ridge_point(grid, initial.col(c)));
  }

  auto propagator =
      std::make_shared<const Propagator>(op, config.time.dt, config.time.snapshot_every);
  BatchEvolution evolution(propagator, std::move(initial), config.time.smoothing_steps);
  std::vector<bool> done(orbits.size(), false);
  std::vector<RidgePoint> last(orbits.size());

  for (int level = 0; level <= config.max_extensions; ++level) {
    const long target = base_steps << level;
    const double horizon = static_cast<double>(target) * config.time.dt;
    while (evolution.steps_taken() < target) {
      const long step = std::min<long>(config.time.snapshot_every, target - evolution.steps_taken());
      evolution.advance(step);
      const double t = evolution.time();
      for (Eigen::Index c = 0; c < count; ++c) {
        const auto k = static_cast<std::size_t>(c);
        if (done[k]) continue;
        last[k] = ridge_point(grid, evolution.state().col(c));
        record(orbits[k], t, last[k]);
      }
    }
    bool all_done = true;
    for (std::size_t k = 0; k < orbits.size(); ++k) {
      if (done[k]) continue;
      auto& o = orbits[k];
      o.horizon = horizon;
      o.window_speed = window_speed(o, horizon, config.settle_window);
      o.settled = o.window_speed < config.settle_speed;
      o.final_position = o.positions.back();
      o.final_tie = o.ties.back();
      if (o.settled || level == config.max_extensions) {
        done[k] = true;
        if (last[k].at_boundary) {
          std::ostringstream msg;
          msg << "most probable orbit from x0=" << o.x0
              << " ends on the window edge; increase grid.L";
          throw SolverError(msg.str());
        }
      } else {
        all_done = false;
      }
    }
    if (all_done) break;
  }
  return orbits;
}

MostProbableOrbit most_probable_orbit(const ModelSpec& model, double x0, const Grid1D& grid,
                                      const TrackerConfig& config) {
  const EvolutionOperator op(grid, model, config.boundary);
  return most_probable_orbits(op, {x0}, config).front();
}

std::string_view to_string(Stability s) { return s == Stability::stable ? "stable" : "unstable"; }

namespace {

std::string describe_offending(const std::vector<double>& xs, const std::string& context) {
  std::ostringstream msg;
  msg << "unresolved equilibria: orbits from x0 =";
  for (double x : xs) msg << ' ' << x;
  msg << " did not settle";
  if (!context.empty()) msg << " (" << context << ")";
  return msg.str();
}

}  // namespace

UnresolvedEquilibria::UnresolvedEquilibria(std::vector<double> offending,
                                           const std::string& context)
    : SolverError(describe_offending(offending, context)), offending_(std::move(offending)) {}

std::vector<double> default_probes(const Grid1D& grid, const TrackerConfig& config) {
  config.validate();
  const double inner = config.probe_inner * grid.spacing();
  const double outer = config.ladder_outer * grid.half_width();
  std::vector<double> positive{inner};
  if (outer > inner) {
    for (int k = 1; k <= config.ladder_points; ++k) {
      positive.push_back(inner * std::pow(outer / inner, static_cast<double>(k) / config.ladder_points));
    }
  }
  std::vector<double> probes;
  for (double x : positive) {
    probes.push_back(x);
    probes.push_back(-x);
  }
  std::sort(probes.begin(), probes.end());
  return probes;
}

void check_probe_set(const std::vector<double>& xs, const Grid1D& grid,
                     const TrackerConfig& config) {
  if (xs.size() < 5) throw DomainError("probes.initial_set needs at least 5 points");
  const double tol = 1e-9 * grid.half_width();
  for (double x : xs) {
    const bool mirrored = std::any_of(xs.begin(), xs.end(),
                                      [&](double y) { return std::abs(x + y) <= tol; });
    if (!mirrored) throw DomainError("probes.initial_set must be symmetric about 0");
  }
  const double inner = config.probe_inner * grid.spacing();
  const auto has = [&](double target) {
    return std::any_of(xs.begin(), xs.end(), [&](double y) { return std::abs(y - target) <= tol; });
  };
  if (!has(inner) || !has(-inner)) {
    throw DomainError("probes.initial_set must contain the inner probes +-probe_inner*h");
  }
  const double reach = grid.half_width() - 3.0 * grid.spacing();
  for (double x : xs) {
    if (std::abs(x) > reach) throw DomainError("probes.initial_set points must satisfy |x| <= L - 3h");
  }
}

std::vector<EquilibriumState> classify_endpoints(const std::vector<MostProbableOrbit>& orbits,
                                                 const Grid1D& grid,
                                                 const TrackerConfig& config) {
  const double h = grid.spacing();
  const double cluster_tol = config.cluster_factor * h;
  const double inner = config.probe_inner * h;
  const double id_tol = 1e-9 * grid.half_width();

  bool zero_stable = true;
  bool saw_inner = false;
  EquilibriumState zero{0.0, Stability::stable, {}};
  for (const auto& o : orbits) {
    if (std::abs(std::abs(o.x0) - inner) > id_tol) continue;
    saw_inner = true;
    if (std::abs(o.final_position) > cluster_tol) zero_stable = false;
  }
  if (!saw_inner) throw DomainError("orbit set lacks the inner probes +-probe_inner*h");
  zero.stability = zero_stable ? Stability::stable : Stability::unstable;

  std::vector<std::pair<double, double>> ends;  // (final position, x0)
  for (const auto& o : orbits) {
    ends.emplace_back(o.final_position, o.x0);
    if (o.final_tie && o.final_position != 0.0) ends.emplace_back(-o.final_position, o.x0);
  }
  std::sort(ends.begin(), ends.end());

  std::vector<EquilibriumState> states;
  std::size_t begin = 0;
  while (begin < ends.size()) {
    std::size_t end = begin + 1;
    while (end < ends.size() && ends[end].first - ends[end - 1].first <= cluster_tol) ++end;
    double sum = 0.0;
    std::vector<double> witnesses;
    for (std::size_t k = begin; k < end; ++k) {
      sum += ends[k].first;
      witnesses.push_back(ends[k].second);
    }
    std::sort(witnesses.begin(), witnesses.end());
    const double location = sum / static_cast<double>(end - begin);
    if (std::abs(location) <= cluster_tol) {
      if (zero_stable) {
        zero.witnesses.insert(zero.witnesses.end(), witnesses.begin(), witnesses.end());
      }
    } else {
      states.push_back(EquilibriumState{location, Stability::stable, std::move(witnesses)});
    }
    begin = end;
  }

  if (!zero_stable) {
    for (const auto& o : orbits) {
      if (std::abs(std::abs(o.x0) - inner) <= id_tol) zero.witnesses.push_back(o.x0);
    }
  }
  std::sort(zero.witnesses.begin(), zero.witnesses.end());
  zero.witnesses.erase(std::unique(zero.witnesses.begin(), zero.witnesses.end()),
                       zero.witnesses.end());
  states.push_back(std::move(zero));
  std::sort(states.begin(), states.end(),
            [](const auto& a, const auto& b) { return a.location < b.location; });
  return states;
}

std::vector<EquilibriumState> find_equilibria(const EvolutionOperator& op,
                                              const std::vector<double>& initial_set,
                                              const TrackerConfig& config) {
  config.validate();
  check_probe_set(initial_set, op.grid(), config);
  const auto orbits = most_probable_orbits(op, initial_set, config);
  std::vector<double> offending;
  for (const auto& o : orbits) {
    if (!o.settled) offending.push_back(o.x0);
  }
  if (!offending.empty()) throw UnresolvedEquilibria(std::move(offending), op.model().describe());
  return classify_endpoints(orbits, op.grid(), config);
}

std::vector<EquilibriumState> find_equilibria(const ModelSpec& model,
                                              const std::vector<double>& initial_set,
                                              const Grid1D& grid, const TrackerConfig& config) {
  return find_equilibria(EvolutionOperator(grid, model, config.boundary), initial_set, config);
}

}  // namespace mpp
