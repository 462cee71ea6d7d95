#pragma once

// Scenario execution: data tables, detection records and the run manifest.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sivsim_cli/config.hpp"

namespace sivsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

struct RunOptions {
  std::optional<int> workers;           // overrides solver.workers
  std::optional<std::uint64_t> seed;    // overrides solver.seed
  std::filesystem::path output_root;    // relative output directories resolve here
  std::string config_source = "<config>";
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::filesystem::path directory;
  std::filesystem::path manifest;
  std::string message;  // error text when exit_code != 0
};

/// SIVSIM_OUT when set, otherwise the working directory.
std::filesystem::path default_output_root();

/// Runs a validated configuration. Solver failures yield kExitSolver and a
/// manifest with status "failed"; nothing is thrown.
RunOutcome run_scenario(const ScenarioConfig& cfg, const RunOptions& opts);

/// `run <config>`: parse, then execute. Diagnostics go to `err`.
int run_command(const std::string& config_path, RunOptions opts, std::ostream& out, std::ostream& err);

/// `validate <config>`: prints every violation; exit 0 when there are none.
int validate_command(const std::string& config_path, std::ostream& out, std::ostream& err);

/// Bundled scenario configurations, as (name, YAML text).
const std::vector<std::pair<std::string, std::string>>& bundled_configs();

/// `figures`: runs every bundled configuration under `opts.output_root`.
int figures_command(RunOptions opts, std::ostream& out, std::ostream& err);

}  // namespace sivsim::cli
