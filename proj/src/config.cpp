#include "mpp/cli/config.hpp"

#include <cmath>
#include <functional>
#include <initializer_list>
#include <sstream>

#include "mpp/errors.hpp"
#include "mpp/grid.hpp"

namespace mpp::cli {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::ostringstream out;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    if (i) out << "; ";
    out << problems[i];
  }
  return out.str();
}

// Reads fields out of a raw document and collects every problem instead of
// stopping at the first.
class Reader {
 public:
  std::vector<std::string> problems;

  void fail(std::string message) { problems.push_back(std::move(message)); }

  void guard(const std::function<void()>& check) {
    try {
      check();
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

  const Json* section(const Json& raw, const char* name) {
    if (!raw.contains(name)) return nullptr;
    const Json& s = raw.at(name);
    if (!s.is_object()) {
      fail(std::string(name) + " must be an object");
      return nullptr;
    }
    return &s;
  }

  void only(const Json* s, const char* name, std::initializer_list<const char*> known) {
    if (!s) return;
    for (const auto& item : s->items()) {
      bool ok = false;
      for (const char* k : known) ok = ok || item.key() == k;
      if (!ok) fail(std::string(name) + "." + item.key() + " is not a recognised field");
    }
  }

  void number(const Json* s, const char* sec, const char* key, double& out) {
    if (!s || !s->contains(key)) return;
    const Json& v = s->at(key);
    if (!v.is_number()) return fail(path(sec, key) + " must be a number");
    out = v.get<double>();
  }

  template <class Int>
  void integer(const Json* s, const char* sec, const char* key, Int& out) {
    if (!s || !s->contains(key)) return;
    const Json& v = s->at(key);
    if (!v.is_number_integer()) return fail(path(sec, key) + " must be an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned()) {
        out = v.get<Int>();
      } else {
        fail(path(sec, key) + " must be nonnegative");
      }
    } else {
      out = v.get<Int>();
    }
  }

  void boolean(const Json* s, const char* sec, const char* key, bool& out) {
    if (!s || !s->contains(key)) return;
    const Json& v = s->at(key);
    if (!v.is_boolean()) return fail(path(sec, key) + " must be true or false");
    out = v.get<bool>();
  }

  bool string(const Json* s, const char* sec, const char* key, std::string& out) {
    if (!s || !s->contains(key)) return false;
    const Json& v = s->at(key);
    if (!v.is_string()) {
      fail(path(sec, key) + " must be a string");
      return false;
    }
    out = v.get<std::string>();
    return true;
  }

  static std::string path(const char* sec, const char* key) {
    return sec ? std::string(sec) + "." + key : std::string(key);
  }
};

Json normalise_shorthand(const Json& raw, Reader& rd) {
  Json doc = raw;
  for (const char* key : {"r", "alpha", "noise"}) {
    if (!doc.contains(key)) continue;
    if (doc.contains("model") && doc["model"].is_object() && doc["model"].contains(key)) {
      rd.fail(std::string(key) + " is given both at top level and as model." + key);
    } else {
      doc["model"][key] = doc[key];
    }
    doc.erase(key);
  }
  return doc;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(join_problems(problems)), problems_(std::move(problems)) {}

TrackerConfig RunConfig::tracker() const {
  TrackerConfig t = probes.tracker;
  t.time = time;
  t.boundary = grid.boundary;
  return t;
}

SweepConfig RunConfig::sweep_config() const {
  SweepConfig s;
  s.grid = build_grid();
  s.tracker = tracker();
  s.probes = probes.initial_set;
  s.refine = sweep.refine;
  s.tol_p = sweep.tol_p;
  s.min_event_separation = sweep.min_event_separation;
  return s;
}

RunConfig validate_config(const Json& raw_in) {
  Reader rd;
  RunConfig c;
  if (!raw_in.is_object()) throw ConfigError({"configuration must be a JSON object"});
  const Json raw = normalise_shorthand(raw_in, rd);
  bool axis_given = false;
  bool range_given = false;
  rd.only(&raw, "config", {"model", "grid", "time", "probes", "sweep", "oracle", "output"});

  if (const Json* s = rd.section(raw, "model")) {
    rd.only(s, "model", {"r", "noise", "alpha"});
    rd.number(s, "model", "r", c.model.r);
    rd.number(s, "model", "alpha", c.model.alpha);
    std::string noise;
    if (rd.string(s, "model", "noise", noise)) {
      rd.guard([&] { c.model.noise = parse_noise_kind(noise); });
    }
  }
  if (const Json* s = rd.section(raw, "grid")) {
    rd.only(s, "grid", {"L", "M", "boundary"});
    rd.number(s, "grid", "L", c.grid.L);
    rd.integer(s, "grid", "M", c.grid.M);
    std::string boundary;
    if (rd.string(s, "grid", "boundary", boundary)) {
      rd.guard([&] { c.grid.boundary = parse_boundary_policy(boundary); });
    }
  }
  if (const Json* s = rd.section(raw, "time")) {
    rd.only(s, "time", {"T", "dt", "snapshot_every", "smoothing_steps"});
    rd.number(s, "time", "T", c.time.horizon);
    rd.number(s, "time", "dt", c.time.dt);
    rd.integer(s, "time", "snapshot_every", c.time.snapshot_every);
    rd.integer(s, "time", "smoothing_steps", c.time.smoothing_steps);
  }
  if (const Json* s = rd.section(raw, "probes")) {
    rd.only(s, "probes", {"x0", "initial_set", "settle_speed", "settle_window", "max_extensions",
                          "inner", "cluster", "ladder_points", "ladder_outer"});
    auto& t = c.probes.tracker;
    rd.number(s, "probes", "x0", c.probes.x0);
    if (s->contains("initial_set")) {
      const Json& v = s->at("initial_set");
      bool ok = v.is_array() || v.is_null();
      if (v.is_array()) {
        for (const auto& x : v) ok = ok && x.is_number();
      }
      if (!ok) {
        rd.fail("probes.initial_set must be a list of numbers or null");
      } else if (v.is_array()) {
        c.probes.initial_set = v.get<std::vector<double>>();
      }
    }
    rd.number(s, "probes", "settle_speed", t.settle_speed);
    rd.number(s, "probes", "settle_window", t.settle_window);
    rd.integer(s, "probes", "max_extensions", t.max_extensions);
    rd.number(s, "probes", "inner", t.probe_inner);
    rd.number(s, "probes", "cluster", t.cluster_factor);
    rd.integer(s, "probes", "ladder_points", t.ladder_points);
    rd.number(s, "probes", "ladder_outer", t.ladder_outer);
  }
  if (const Json* s = rd.section(raw, "sweep")) {
    rd.only(s, "sweep", {"axis", "range", "samples", "refine", "tol_p", "min_event_separation"});
    std::string axis;
    if (rd.string(s, "sweep", "axis", axis)) {
      axis_given = true;
      rd.guard([&] { c.sweep.axis.which = parse_axis(axis); });
    }
    if (s->contains("range")) {
      const Json& v = s->at("range");
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        rd.fail("sweep.range must be a pair [lo, hi] of numbers");
      } else {
        range_given = true;
        c.sweep.axis.lo = v[0].get<double>();
        c.sweep.axis.hi = v[1].get<double>();
      }
    }
    rd.integer(s, "sweep", "samples", c.sweep.axis.samples);
    rd.boolean(s, "sweep", "refine", c.sweep.refine);
    rd.number(s, "sweep", "tol_p", c.sweep.tol_p);
    rd.number(s, "sweep", "min_event_separation", c.sweep.min_event_separation);
  }
  if (const Json* s = rd.section(raw, "oracle")) {
    rd.only(s, "oracle", {"n_paths", "seed", "escape_factor"});
    rd.integer(s, "oracle", "n_paths", c.oracle.n_paths);
    rd.integer(s, "oracle", "seed", c.oracle.seed);
    rd.number(s, "oracle", "escape_factor", c.oracle.escape_factor);
  }
  if (const Json* s = rd.section(raw, "output")) {
    rd.only(s, "output", {"directory", "formats"});
    rd.string(s, "output", "directory", c.output.directory);
    if (s->contains("formats")) {
      const Json& v = s->at("formats");
      c.output.csv = c.output.json = false;
      bool ok = v.is_array();
      if (ok) {
        for (const auto& f : v) {
          if (f == "csv") {
            c.output.csv = true;
          } else if (f == "json") {
            c.output.json = true;
          } else {
            ok = false;
          }
        }
      }
      if (!ok) rd.fail("output.formats must be a list drawn from \"csv\", \"json\"");
    }
  }

  // Domain constraints, all of them, after parsing.
  rd.guard([&] { c.model.validate(); });
  bool grid_ok = true;
  rd.guard([&] {
    grid_ok = false;
    (void)c.build_grid();
    grid_ok = true;
  });
  rd.guard([&] {
    c.time.validate();
    (void)c.time.step_count();
  });
  rd.guard([&] {
    TrackerConfig t = c.probes.tracker;
    t.time = TimeConfig{};  // time problems are reported once, above
    t.validate();
  });
  if (grid_ok) {
    const Grid1D grid = c.build_grid();
    const double reach = grid.half_width() - 3.0 * grid.spacing();
    if (!(std::abs(c.probes.x0) <= reach)) rd.fail("probes.x0 must satisfy |x0| <= L - 3h");
    if (!c.probes.initial_set.empty()) {
      rd.guard([&] {
        TrackerConfig t = c.probes.tracker;
        t.time = TimeConfig{};
        check_probe_set(c.probes.initial_set, grid, t);
      });
    }
  }
  // Without levy noise the only meaningful axis is r.
  if (!axis_given && c.model.noise != NoiseKind::levy) {
    c.sweep.axis.which = Axis::r;
    if (!range_given) {
      c.sweep.axis.lo = -1.0;
      c.sweep.axis.hi = 2.0;
    }
  }
  rd.guard([&] { c.sweep.axis.validate(); });
  if (c.sweep.axis.which == Axis::alpha && c.model.noise != NoiseKind::levy) {
    rd.fail("sweep.axis alpha requires model.noise levy");
  }
  if (!(c.sweep.tol_p > 0.0)) rd.fail("sweep.tol_p must be positive");
  if (!(c.sweep.min_event_separation >= 0.0)) rd.fail("sweep.min_event_separation must be nonnegative");
  if (c.oracle.n_paths < 1) rd.fail("oracle.n_paths must be at least 1");
  if (!(c.oracle.escape_factor >= 1.0)) rd.fail("oracle.escape_factor must be at least 1");
  if (c.output.directory.empty()) rd.fail("output.directory must not be empty");

  if (!rd.problems.empty()) throw ConfigError(std::move(rd.problems));
  return c;
}

RunConfig parse_config(std::string_view text) {
  Json raw;
  try {
    raw = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError({std::string("configuration is not valid JSON: ") + e.what()});
  }
  return validate_config(raw);
}

Json echo(const RunConfig& c) {
  const auto& t = c.probes.tracker;
  Json probes_set = c.probes.initial_set.empty() ? Json(nullptr) : Json(c.probes.initial_set);
  Json formats = Json::array();
  if (c.output.csv) formats.push_back("csv");
  if (c.output.json) formats.push_back("json");
  return Json{
      {"model",
       {{"r", c.model.r}, {"noise", std::string(to_string(c.model.noise))}, {"alpha", c.model.alpha}}},
      {"grid",
       {{"L", c.grid.L}, {"M", c.grid.M}, {"boundary", std::string(to_string(c.grid.boundary))}}},
      {"time",
       {{"T", c.time.horizon},
        {"dt", c.time.dt},
        {"snapshot_every", c.time.snapshot_every},
        {"smoothing_steps", c.time.smoothing_steps}}},
      {"probes",
       {{"x0", c.probes.x0},
        {"initial_set", probes_set},
        {"settle_speed", t.settle_speed},
        {"settle_window", t.settle_window},
        {"max_extensions", t.max_extensions},
        {"inner", t.probe_inner},
        {"cluster", t.cluster_factor},
        {"ladder_points", t.ladder_points},
        {"ladder_outer", t.ladder_outer}}},
      {"sweep",
       {{"axis", std::string(to_string(c.sweep.axis.which))},
        {"range", {c.sweep.axis.lo, c.sweep.axis.hi}},
        {"samples", c.sweep.axis.samples},
        {"refine", c.sweep.refine},
        {"tol_p", c.sweep.tol_p},
        {"min_event_separation", c.sweep.min_event_separation}}},
      {"oracle",
       {{"n_paths", c.oracle.n_paths},
        {"seed", c.oracle.seed},
        {"escape_factor", c.oracle.escape_factor}}},
      {"output", {{"directory", c.output.directory}, {"formats", formats}}},
  };
}

void apply_override(Json& raw, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError({"override '" + std::string(assignment) + "' must look like key=value"});
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  if (!raw.is_object()) raw = Json::object();
  Json* node = &raw;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError({"override key '" + key + "' has an empty component"});
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    Json& child = (*node)[part];
    if (!child.is_object()) child = Json::object();
    node = &child;
    start = dot + 1;
  }
}

}  // namespace mpp::cli
