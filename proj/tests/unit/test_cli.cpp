#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "mpp/cli/commands.hpp"
#include "mpp/cli/config.hpp"

using namespace mpp;
using namespace mpp::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mpp_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

// Small problem so every command runs in about a second.
Json small(const fs::path& out) {
  Json raw = Json::parse(R"({
    "model": {"r": 0.8, "noise": "levy", "alpha": 0.6},
    "grid": {"L": 3, "M": 60},
    "time": {"T": 2, "dt": 0.01, "snapshot_every": 10, "smoothing_steps": 4},
    "probes": {"x0": 0.8},
    "sweep": {"range": [0.4, 1.2], "samples": 3, "tol_p": 0.1},
    "oracle": {"n_paths": 2000}
  })");
  raw["output"]["directory"] = out.string();
  return raw;
}

std::vector<std::string> problems_of(const Json& raw) {
  try {
    validate_config(raw);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems) {
    if (p.find(needle) != std::string::npos) return true;
  }
  return false;
}

int run_tool(const std::string& args, const fs::path& stderr_file) {
  const std::string cmd = std::string("\"") + MPP_CLI_PATH + "\" " + args + " > /dev/null 2> \"" +
                          stderr_file.string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const auto c = parse_config(R"({"r": 0.8, "alpha": 0.3})");
  CHECK(c.model.r == 0.8);
  CHECK(c.model.alpha == 0.3);
  CHECK(c.model.noise == NoiseKind::levy);
  CHECK(c.grid.L == 10.0);
  CHECK(c.grid.M == 1000);
  CHECK(c.time.horizon == 10.0);
  CHECK(c.time.dt == 1e-3);
  const Json e = echo(c);
  CHECK(e["grid"]["L"] == 10.0);
  CHECK(e["grid"]["M"] == 1000);
  CHECK(e["time"]["T"] == 10.0);
  CHECK(e["time"]["dt"] == 1e-3);
  CHECK(echo(validate_config(e)) == e);
}

TEST_CASE("non-levy models default to an r sweep") {
  const auto c = parse_config(R"({"noise": "brownian", "r": -1})");
  CHECK(c.sweep.axis.which == Axis::r);
  CHECK(c.sweep.axis.lo == -1.0);
  CHECK(c.sweep.axis.hi == 2.0);
  CHECK(mentions(problems_of(Json::parse(R"({"noise": "none", "sweep": {"axis": "alpha"}})")), "sweep.axis"));
}

TEST_CASE("validation errors name the offending field") {
  CHECK(mentions(problems_of(Json::parse(R"({"grid": {"M": -5}})")), "grid.M"));
  const auto order = problems_of(Json::parse(R"({"sweep": {"range": [1.5, 0.5]}})"));
  CHECK(mentions(order, "sweep.range"));
  CHECK(mentions(order, "lo < hi"));
  CHECK(mentions(problems_of(Json::parse(R"({"alpha": 2.5})")), "(0, 2)"));
  CHECK(mentions(problems_of(Json::parse(R"({"grid": {"Mx": 5}})")), "grid.Mx"));
  CHECK(mentions(problems_of(Json::parse(R"({"alpha": 1, "model": {"alpha": 1}})")), "alpha"));
  CHECK(mentions(problems_of(Json::parse(R"({"time": {"T": 1, "dt": 0.3}})")), "time.T / time.dt"));
  CHECK(mentions(problems_of(Json::parse(R"({"probes": {"x0": 9.999}})")), "probes.x0"));

  const auto many = problems_of(Json::parse(R"({"alpha": 2.5, "grid": {"M": 0}, "sweep": {"range": [1, 0]}})"));
  CHECK(many.size() >= 3);
  CHECK(mentions(many, "model.alpha"));
  CHECK(mentions(many, "grid.M"));
  CHECK(mentions(many, "sweep.range"));
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("overrides") {
  Json raw = Json::object();
  apply_override(raw, "grid.M=500");
  apply_override(raw, "model.noise=brownian");
  apply_override(raw, "sweep.range=[-2, 1]");
  const auto c = validate_config(raw);
  CHECK(c.grid.M == 500);
  CHECK(c.model.noise == NoiseKind::brownian);
  CHECK(c.sweep.axis.lo == -2.0);
  CHECK_THROWS_AS(apply_override(raw, "no_equals_sign"), ConfigError);
}

TEST_CASE("numbers are formatted stably") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333333");
}

TEST_CASE("every command writes its documented files") {
  const fs::path out = scratch("all");
  const auto cfg = validate_config(small(out));
  const std::map<std::string, std::vector<std::string>> expected{
      {"solve", {"density.csv", "manifest.json"}},
      {"orbit", {"orbit.csv", "manifest.json"}},
      {"equilibria", {"equilibria.json", "manifest.json"}},
      {"sweep", {"sweep.csv", "events.json", "manifest.json"}},
      {"oracle-check", {"oracle.json", "manifest.json"}}};
  for (const auto& [command, files] : expected) {
    const auto written = run_command(command, cfg);
    REQUIRE(written.size() == files.size());
    for (std::size_t i = 0; i < files.size(); ++i) CHECK(written[i].filename() == files[i]);
    const Json manifest = Json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["command"] == command);
    CHECK(manifest["config"] == echo(cfg));
  }
  CHECK(first_line(out / "density.csv") == "time,x,p");
  CHECK(first_line(out / "orbit.csv") == "time,x_m,ridge_speed,settled");
  CHECK(first_line(out / "sweep.csv") == "parameter,location,stability");

  const Json eq = Json::parse(slurp(out / "equilibria.json"));
  REQUIRE(eq.is_array());
  for (const auto& e : eq) {
    CHECK(e.contains("location"));
    CHECK(e.contains("stability"));
    CHECK(e.contains("witnesses"));
  }
  const Json events = Json::parse(slurp(out / "events.json"));
  REQUIRE(events.is_array());
  for (const auto& e : events) {
    CHECK(e["bracket"].size() == 2);
    CHECK(e.contains("kind"));
    CHECK(e.contains("refined"));
  }
  const Json oracle = Json::parse(slurp(out / "oracle.json"));
  for (const char* key : {"l1_distance", "n_paths", "seed", "escaped_fraction", "left_window_fraction"}) {
    CHECK(oracle.contains(key));
  }
  CHECK_THROWS(run_command("plot", cfg));
  fs::remove_all(out);
}

TEST_CASE("reruns are byte identical") {
  const fs::path out = scratch("rerun");
  const auto cfg = validate_config(small(out));
  for (const char* command : {"solve", "sweep", "oracle-check"}) {
    std::map<fs::path, std::string> first;
    for (const auto& p : run_command(command, cfg)) first[p] = slurp(p);
    for (const auto& p : run_command(command, cfg)) {
      CAPTURE(p.string());
      CHECK(slurp(p) == first[p]);
    }
  }
  fs::remove_all(out);
}

TEST_CASE("the tool reports invalid configurations with a nonzero exit") {
  const fs::path dir = scratch("tool");
  fs::create_directories(dir);
  const fs::path err = dir / "stderr.txt";
  CHECK(run_tool("--set alpha=2.5 --print-config", err) != 0);
  CHECK(slurp(err).find("alpha") != std::string::npos);
  CHECK(slurp(err).find("(0, 2)") != std::string::npos);

  CHECK(run_tool("--set grid.M=-3 solve", err) != 0);
  CHECK(slurp(err).find("grid.M") != std::string::npos);

  CHECK(run_tool("--config " + (dir / "missing.json").string() + " solve", err) != 0);
  CHECK(run_tool("--print-config", err) == 0);
  fs::remove_all(dir);
}
