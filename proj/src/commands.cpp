#include "mpp/cli/commands.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include "mpp/bifurcation.hpp"
#include "mpp/errors.hpp"
#include "mpp/mc_oracle.hpp"
#include "mpp/solver.hpp"
#include "mpp/tracker.hpp"

namespace mpp::cli {

namespace fs = std::filesystem;

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

namespace {

class Outputs {
 public:
  explicit Outputs(const RunConfig& c) : dir_(c.output.directory), csv_(c.output.csv), json_(c.output.json) {
    fs::create_directories(dir_);
  }

  bool csv() const { return csv_; }
  bool json() const { return json_; }

  std::ofstream open(const char* name) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    written_.push_back(p);
    return out;
  }

  void write_json(const char* name, const Json& doc) {
    auto out = open(name);
    out << doc.dump(2) << '\n';
  }

  std::vector<fs::path> finish() { return std::move(written_); }

 private:
  fs::path dir_;
  bool csv_;
  bool json_;
  std::vector<fs::path> written_;
};

Json manifest(std::string_view command, const RunConfig& c) {
  return Json{{"command", std::string(command)}, {"model", c.model.describe()}, {"config", echo(c)}};
}

Json signature_json(Signature s) {
  return Json{{"stable_pairs", s.stable_pairs}, {"zero", std::string(to_string(s.zero))}};
}

Json equilibria_json(const std::vector<EquilibriumState>& states) {
  Json list = Json::array();
  for (const auto& s : states) {
    list.push_back(Json{{"location", s.location},
                        {"stability", std::string(to_string(s.stability))},
                        {"witnesses", s.witnesses}});
  }
  return list;
}

std::vector<fs::path> run_solve(const RunConfig& c) {
  Outputs out(c);
  const EvolutionOperator op(c.build_grid(), c.model, c.grid.boundary);
  const auto snapshots = solve_density(op, c.probes.x0, c.time);
  const MassAudit audit = audit_mass(op, snapshots);
  if (out.csv()) {
    auto f = out.open("density.csv");
    f << "time,x,p\n";
    for (const auto& s : snapshots) {
      const std::string t = format_number(s.time);
      for (std::size_t i = 0; i < s.grid.size(); ++i) {
        f << t << ',' << format_number(s.grid.node(i)) << ','
          << format_number(s.values[static_cast<Eigen::Index>(i)]) << '\n';
      }
    }
  }
  if (out.json()) {
    Json m = manifest("solve", c);
    m["snapshots"] = snapshots.size();
    m["mass_audit"] = Json{{"times", audit.times},
                           {"masses", audit.masses},
                           {"mass_change", audit.mass_change()},
                           {"audited_leak", audit.audited_leak},
                           {"exterior_flux", audit.exterior_flux}};
    out.write_json("manifest.json", m);
  }
  return out.finish();
}

std::vector<fs::path> run_orbit(const RunConfig& c) {
  Outputs out(c);
  const auto orbit = most_probable_orbit(c.model, c.probes.x0, c.build_grid(), c.tracker());
  if (out.csv()) {
    auto f = out.open("orbit.csv");
    f << "time,x_m,ridge_speed,settled\n";
    const double settle_from = orbit.horizon * (1.0 - c.probes.tracker.settle_window);
    for (std::size_t k = 0; k < orbit.times.size(); ++k) {
      // Settled flag is set on the final window of a settled orbit.
      const bool settled = orbit.settled && orbit.times[k] >= settle_from - 1e-9 * orbit.horizon;
      f << format_number(orbit.times[k]) << ',' << format_number(orbit.positions[k]) << ','
        << format_number(orbit.speeds[k]) << ',' << (settled ? 1 : 0) << '\n';
    }
  }
  if (out.json()) {
    Json m = manifest("orbit", c);
    m["x0"] = orbit.x0;
    m["settled"] = orbit.settled;
    m["horizon"] = orbit.horizon;
    m["window_speed"] = orbit.window_speed;
    m["final_position"] = orbit.final_position;
    m["final_tie"] = orbit.final_tie;
    out.write_json("manifest.json", m);
  }
  return out.finish();
}

std::vector<fs::path> run_equilibria(const RunConfig& c) {
  Outputs out(c);
  const Grid1D grid = c.build_grid();
  const TrackerConfig t = c.tracker();
  const auto probes = c.probes.initial_set.empty() ? default_probes(grid, t) : c.probes.initial_set;
  const auto states = find_equilibria(c.model, probes, grid, t);
  if (out.json()) {
    out.write_json("equilibria.json", equilibria_json(states));
    Json m = manifest("equilibria", c);
    m["probes"] = probes;
    m["signature"] = signature_json(signature_of(states));
    out.write_json("manifest.json", m);
  }
  return out.finish();
}

std::vector<fs::path> run_sweep(const RunConfig& c) {
  Outputs out(c);
  const ModelFamily family{c.model, c.sweep.axis.which};
  const SweepConfig sc = c.sweep_config();
  const BifurcationDiagram d = sweep_parameter(family, c.sweep.axis, sc);
  if (out.csv()) {
    auto f = out.open("sweep.csv");
    f << "parameter,location,stability\n";
    for (std::size_t i = 0; i < d.parameters.size(); ++i) {
      for (const auto& s : d.equilibria[i]) {
        f << format_number(d.parameters[i]) << ',' << format_number(s.location) << ','
          << to_string(s.stability) << '\n';
      }
    }
  }
  if (out.json()) {
    Json events = Json::array();
    for (const auto& e : d.events) {
      events.push_back(Json{{"bracket", {e.lo, e.hi}},
                            {"kind", std::string(to_string(e.kind))},
                            {"refined", e.refined ? Json(*e.refined) : Json(nullptr)},
                            {"before", signature_json(e.before)},
                            {"after", signature_json(e.after)}});
    }
    out.write_json("events.json", events);
    Json m = manifest("sweep", c);
    m["axis"] = std::string(to_string(d.axis.which));
    m["parameters"] = d.parameters;
    m["probes"] = sc.probe_set();
    m["events"] = d.events.size();
    out.write_json("manifest.json", m);
  }
  return out.finish();
}

std::vector<fs::path> run_oracle(const RunConfig& c) {
  Outputs out(c);
  const Grid1D grid = c.build_grid();
  const EvolutionOperator op(grid, c.model, c.grid.boundary);
  const auto snapshots = solve_density(op, c.probes.x0, c.time);
  const MassAudit audit = audit_mass(op, snapshots);

  SimulationConfig sim;
  sim.model = c.model;
  sim.x0 = c.probes.x0;
  sim.horizon = c.time.horizon;
  sim.dt = c.time.dt;
  sim.n_paths = c.oracle.n_paths;
  sim.seed = c.oracle.seed;
  sim.escape_radius = c.oracle.escape_factor * c.grid.L;
  sim.window = c.grid.L;
  const PathEnsemble ens = simulate_endpoints(sim);
  const DensityField mc = empirical_density(ens, grid);
  const double l1 = l1_distance(snapshots.back(), mc);

  if (out.json()) {
    Json doc{{"l1_distance", l1},
             {"n_paths", ens.size()},
             {"seed", c.oracle.seed},
             {"escape_radius", sim.escape_radius},
             {"escaped_fraction", ens.escaped_fraction()},
             {"left_window_fraction", ens.left_window_fraction()},
             {"pde_final_mass", audit.masses.back()},
             {"pde_exterior_flux", audit.exterior_flux},
             {"mc_window_mass", total_mass(mc)}};
    out.write_json("oracle.json", doc);
    out.write_json("manifest.json", manifest("oracle-check", c));
  }
  return out.finish();
}

}  // namespace

std::vector<fs::path> run_command(std::string_view name, const RunConfig& config) {
  if (name == "solve") return run_solve(config);
  if (name == "orbit") return run_orbit(config);
  if (name == "equilibria") return run_equilibria(config);
  if (name == "sweep") return run_sweep(config);
  if (name == "oracle-check") return run_oracle(config);
  throw DomainError("unknown command '" + std::string(name) +
                    "'; expected solve, orbit, equilibria, sweep or oracle-check");
}

}  // namespace mpp::cli
