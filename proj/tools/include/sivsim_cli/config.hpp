#pragma once

// Declarative scenario configuration: YAML text in, validated records out.
// Every schema violation carries the line and column of the offending node.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sivsim/analysis.hpp"
#include "sivsim/dynamics.hpp"
#include "sivsim/siv_models.hpp"

namespace sivsim::cli {

enum class Scenario { spectrum, saturation, switch_, correlations, raman, entangle, custom };

std::string to_string(Scenario s);
const std::vector<std::string>& scenario_names();

enum class CustomModel { cavity, waveguide_single, waveguide_pair };

struct Violation {
  int line = 0;    // 1-based; 0 when the document itself is unreadable
  int column = 0;  // 1-based
  std::string path;
  std::string message;

  std::string format(const std::string& source) const;
};

struct Sweep {
  std::string variable;
  std::vector<double> grid;
};

struct SolverBlock {
  SolverOptions options;
  int fock_cutoff = 4;
  int n_traj = 0;
  double duration_ns = 0.0;
  std::optional<std::uint64_t> seed;
  int workers = 1;
};

struct OutputBlock {
  std::string directory;  // empty: SIVSIM_OUT or the working directory
  bool csv = true;
  bool records = false;
};

struct RamanBlock {
  double filter_fwhm_ghz = 0.0;
  double span_ghz = 0.3;
  double step_ghz = 0.002;
};

struct ScenarioConfig {
  Scenario scenario = Scenario::spectrum;
  SivParams siv;
  CavityParams cavity;
  DriveParams drive;
  WaveguideParams waveguide;
  double sigma_delta_ghz = 0.0;
  CustomModel model = CustomModel::cavity;
  std::vector<std::string> channels_a;
  std::vector<std::string> channels_b;
  std::optional<CoincidenceConfig> histogram;
  RamanBlock raman;
  Sweep sweep;
  SolverBlock solver;
  OutputBlock output;

  /// Fully resolved configuration, defaults included; reloadable by parse_config.
  nlohmann::json to_json() const;
};

/// Thrown by parse_config; holds every violation found.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
  std::vector<Violation> violations_;
};

/// Checks a configuration document without running anything. A run manifest
/// is accepted as well: its embedded configuration is used.
std::vector<Violation> validate_config(const std::string& text);

/// Parses and validates; throws ConfigError listing all violations.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Reads a file; throws ConfigError (line 0) when it cannot be read.
std::string read_config_file(const std::string& path);

}  // namespace sivsim::cli
