#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpp/cli/commands.hpp"
#include "mpp/cli/config.hpp"

namespace {

int fail(const std::string& message) {
  std::cerr << "mpp: " << message << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Most probable equilibria of dX = (rX - X^3)dt + X dL for alpha-stable L"};
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool print_config = false;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "Output directory (overrides output.directory)");
  app.add_option("--set", overrides, "Override a field, e.g. --set grid.M=500")->take_all();
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");
  app.require_subcommand(0, 1);
  for (auto name : mpp::cli::kCommands) {
    app.add_subcommand(std::string(name))->fallthrough();
  }
  CLI11_PARSE(app, argc, argv);

  mpp::cli::RunConfig config;
  try {
    mpp::cli::Json raw = mpp::cli::Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) return fail("cannot read config file " + config_path);
      std::stringstream text;
      text << in.rdbuf();
      try {
        raw = mpp::cli::Json::parse(text.str());
      } catch (const mpp::cli::Json::parse_error& e) {
        return fail("config file is not valid JSON: " + std::string(e.what()));
      }
    }
    for (const auto& o : overrides) mpp::cli::apply_override(raw, o);
    if (!out_dir.empty()) {
      if (!raw.contains("output") || !raw["output"].is_object()) raw["output"] = mpp::cli::Json::object();
      raw["output"]["directory"] = out_dir;
    }
    config = mpp::cli::validate_config(raw);
  } catch (const mpp::cli::ConfigError& e) {
    return fail("invalid configuration: " + std::string(e.what()));
  }

  if (print_config) {
    std::cout << mpp::cli::echo(config).dump(2) << '\n';
    return 0;
  }
  const auto subs = app.get_subcommands();
  if (subs.empty()) return fail("no command given; expected one of solve, orbit, equilibria, sweep, oracle-check");

  try {
    for (const auto& path : mpp::cli::run_command(subs.front()->get_name(), config)) {
      std::cout << path.string() << '\n';
    }
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return 0;
}
