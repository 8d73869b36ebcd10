#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mpp/bifurcation.hpp"
#include "mpp/evolution_operator.hpp"
#include "mpp/model.hpp"
#include "mpp/solver.hpp"
#include "mpp/tracker.hpp"

namespace mpp::cli {

using Json = nlohmann::ordered_json;

/// Every problem found in a configuration, one per entry.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct GridSection {
  double L = 10.0;
  int M = 1000;
  BoundaryPolicy boundary = BoundaryPolicy::reinject;
};

struct ProbeSection {
  /// Initial state for solve, orbit and oracle-check.
  double x0 = 1.0;
  /// Empty selects the default symmetric ladder.
  std::vector<double> initial_set;
  TrackerConfig tracker;  // its time member is ignored; RunConfig::time wins
};

struct SweepSection {
  ParameterAxis axis;
  bool refine = true;
  double tol_p = 0.01;
  double min_event_separation = 0.0;
};

struct OracleSection {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  /// Escape radius in units of grid.L.
  double escape_factor = 10.0;
};

struct OutputSection {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
};

struct RunConfig {
  ModelSpec model = ModelSpec{0.0, NoiseKind::levy, 1.0};
  GridSection grid;
  TimeConfig time;
  ProbeSection probes;
  SweepSection sweep;
  OracleSection oracle;
  OutputSection output;

  Grid1D build_grid() const { return Grid1D(grid.L, grid.M); }
  TrackerConfig tracker() const;
  SweepConfig sweep_config() const;
};

/// Parses and validates a raw configuration. Missing fields take their
/// defaults; top-level "r", "alpha" and "noise" are accepted as shorthand
/// for the model section. Throws ConfigError listing every violation.
RunConfig validate_config(const Json& raw);
/// Same, from JSON text.
RunConfig parse_config(std::string_view text);

/// Fully explicit form of a configuration; validate_config(echo(c)) == c.
Json echo(const RunConfig& config);

/// Applies "dotted.key=value" to a raw configuration. The value is parsed as
/// JSON when possible and taken as a string otherwise.
void apply_override(Json& raw, std::string_view assignment);

}  // namespace mpp::cli
