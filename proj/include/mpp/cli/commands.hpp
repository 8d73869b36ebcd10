#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "mpp/cli/config.hpp"

namespace mpp::cli {

inline constexpr std::string_view kCommands[] = {"solve", "orbit", "equilibria", "sweep",
                                                 "oracle-check"};

/// Runs one command and writes its files into config.output.directory
/// (created if missing). Returns the written paths in creation order.
///
///   solve         density.csv   time,x,p
///                 manifest.json config, mass audit
///   orbit         orbit.csv     time,x_m,ridge_speed,settled
///                 manifest.json config, settling summary
///   equilibria    equilibria.json  [{location, stability, witnesses}]
///                 manifest.json
///   sweep         sweep.csv     parameter,location,stability
///                 events.json   [{bracket, kind, refined, before, after}]
///                 manifest.json
///   oracle-check  oracle.json   l1 distance, escape statistics
///                 manifest.json
///
/// Library errors propagate; the caller turns them into a diagnostic.
std::vector<std::filesystem::path> run_command(std::string_view name, const RunConfig& config);

/// Fixed-width decimal used in every CSV field (15 significant digits).
std::string format_number(double value);

}  // namespace mpp::cli
