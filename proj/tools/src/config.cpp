#include "sivsim_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "sivsim/errors.hpp"

namespace sivsim::cli {

namespace {

const std::vector<std::string> kScenarioNames{"spectrum", "saturation", "switch", "correlations",
                                              "raman",    "entangle",   "custom"};
const std::vector<std::string> kModelNames{"cavity", "waveguide_single", "waveguide_pair"};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// yaml-cpp's default node is a defined null; absent blocks must test false.
YAML::Node absent() { return YAML::Node(YAML::NodeType::Undefined); }

// Constraint on a real value; `text` names the invariant in messages.
struct Check {
  std::function<bool(double)> ok;
  std::string text;
};
const Check kAny{[](double) { return true; }, "finite"};
const Check kPositive{[](double x) { return x > 0.0; }, "> 0"};
const Check kNonNegative{[](double x) { return x >= 0.0; }, ">= 0"};
const Check kUnit{[](double x) { return x >= 0.0 && x <= 1.0; }, "in [0, 1]"};
const Check kOpenUnit{[](double x) { return x > 0.0 && x <= 1.0; }, "in (0, 1]"};

// Collects violations while reading a YAML document.
class Reader {
 public:
  std::vector<Violation> violations;

  void fail(const YAML::Node& at, const std::string& path, const std::string& message) {
    const YAML::Mark m = at.Mark();
    violations.push_back({m.line >= 0 ? m.line + 1 : 0, m.column >= 0 ? m.column + 1 : 0, path, message});
  }

  // Child block; a missing required block is reported at the parent.
  YAML::Node block(const YAML::Node& parent, const std::string& key, bool required) {
    const YAML::Node n = parent[key];
    if (!n) {
      if (required) fail(parent, key, "missing required block '" + key + "'");
      return absent();
    }
    if (!n.IsMap()) {
      fail(n, key, "expected a mapping");
      return absent();
    }
    return n;
  }

  void allow_only(const YAML::Node& blk, const std::string& path, const std::vector<std::string>& allowed) {
    if (!blk || !blk.IsMap()) return;
    for (const auto& kv : blk) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        fail(kv.first, path.empty() ? key : path + "." + key,
             "unknown field '" + key + "'; allowed: " + join(allowed));
    }
  }

  // Reads a real into `dst`; absent optional fields keep the current value.
  bool real(const YAML::Node& blk, const std::string& path, const std::string& key, bool required, double& dst,
            const Check& check = kAny) {
    const std::string full = path + "." + key;
    if (!blk) return false;
    const YAML::Node n = blk[key];
    if (!n) {
      if (required) fail(blk, full, "missing required field '" + key + "'");
      return false;
    }
    double v = 0.0;
    try {
      v = n.as<double>();
    } catch (const YAML::Exception&) {
      fail(n, full, "expected a number");
      return false;
    }
    if (!std::isfinite(v) || !check.ok(v)) {
      fail(n, full, "must be " + check.text + " (got " + number(v) + ")");
      return false;
    }
    dst = v;
    return true;
  }

  template <class Int>
  bool integer(const YAML::Node& blk, const std::string& path, const std::string& key, bool required, Int& dst,
               long long min_value) {
    const std::string full = path + "." + key;
    if (!blk) return false;
    const YAML::Node n = blk[key];
    if (!n) {
      if (required) fail(blk, full, "missing required field '" + key + "'");
      return false;
    }
    Int v{};
    try {
      v = n.as<Int>();
    } catch (const YAML::Exception&) {
      fail(n, full, "expected an integer");
      return false;
    }
    if (static_cast<long double>(v) < static_cast<long double>(min_value)) {
      fail(n, full, "must be >= " + std::to_string(min_value) + " (got " + std::to_string(v) + ")");
      return false;
    }
    dst = v;
    return true;
  }

  bool text(const YAML::Node& blk, const std::string& path, const std::string& key, bool required,
            std::string& dst, const std::vector<std::string>& choices = {}) {
    const std::string full = path.empty() ? key : path + "." + key;
    if (!blk) return false;
    const YAML::Node n = blk[key];
    if (!n) {
      if (required) fail(blk, full, "missing required field '" + key + "'");
      return false;
    }
    if (!n.IsScalar()) {
      fail(n, full, "expected a string");
      return false;
    }
    const auto v = n.as<std::string>();
    if (!choices.empty() && std::find(choices.begin(), choices.end(), v) == choices.end()) {
      fail(n, full, "unknown value '" + v + "'; allowed: " + join(choices));
      return false;
    }
    dst = v;
    return true;
  }

  bool strings(const YAML::Node& blk, const std::string& path, const std::string& key, bool required,
               std::vector<std::string>& dst) {
    const std::string full = path + "." + key;
    if (!blk) return false;
    const YAML::Node n = blk[key];
    if (!n) {
      if (required) fail(blk, full, "missing required field '" + key + "'");
      return false;
    }
    if (!n.IsSequence() || n.size() == 0) {
      fail(n, full, "expected a non-empty list");
      return false;
    }
    std::vector<std::string> out;
    for (const auto& item : n) {
      if (!item.IsScalar()) {
        fail(item, full, "expected a list of strings");
        return false;
      }
      out.push_back(item.as<std::string>());
    }
    dst = std::move(out);
    return true;
  }
};

bool uses_cavity(const ScenarioConfig& c) {
  switch (c.scenario) {
    case Scenario::spectrum:
    case Scenario::saturation:
    case Scenario::switch_:
    case Scenario::correlations:
      return true;
    case Scenario::custom:
      return c.model == CustomModel::cavity;
    default:
      return false;
  }
}

bool uses_waveguide(const ScenarioConfig& c) {
  return c.scenario == Scenario::entangle || (c.scenario == Scenario::custom && c.model != CustomModel::cavity);
}

bool uses_trajectories(const ScenarioConfig& c) {
  return c.scenario == Scenario::correlations || c.scenario == Scenario::custom;
}

std::string allowed_sweep(Scenario s) {
  switch (s) {
    case Scenario::spectrum:
      return "probe_freq";
    case Scenario::saturation:
      return "probe_flux";
    case Scenario::switch_:
      return "time";
    case Scenario::raman:
      return "detuning";
    default:
      return "tau";
  }
}

void read_siv(Reader& r, const YAML::Node& root, SivParams& s) {
  const auto b = r.block(root, "siv", true);
  r.allow_only(b, "siv",
               {"gamma", "orbital_splitting", "tau0", "temperature", "branching_ce", "dephasing",
                "nonradiative_fraction"});
  r.real(b, "siv", "gamma", true, s.gamma, kPositive);
  r.real(b, "siv", "orbital_splitting", true, s.orbital_splitting, kPositive);
  r.real(b, "siv", "tau0", true, s.tau0, kPositive);
  r.real(b, "siv", "temperature", true, s.temperature, kPositive);
  r.real(b, "siv", "branching_ce", true, s.branching_ce, kOpenUnit);
  r.real(b, "siv", "dephasing", true, s.dephasing, kNonNegative);
  r.real(b, "siv", "nonradiative_fraction", true, s.nonradiative_fraction, kUnit);
}

void read_cavity(Reader& r, const YAML::Node& root, CavityParams& c) {
  const auto b = r.block(root, "cavity", true);
  r.allow_only(b, "cavity", {"g", "kappa", "kappa_wg_fraction", "detuning_cavity"});
  r.real(b, "cavity", "g", true, c.g, kNonNegative);
  r.real(b, "cavity", "kappa", true, c.kappa, kPositive);
  r.real(b, "cavity", "kappa_wg_fraction", true, c.kappa_wg_fraction, kUnit);
  r.real(b, "cavity", "detuning_cavity", true, c.detuning_cavity);
}

void read_drive(Reader& r, const YAML::Node& root, ScenarioConfig& c, bool swept) {
  const bool cavity = uses_cavity(c);
  const auto b = r.block(root, "drive", c.scenario != Scenario::saturation);
  if (cavity) {
    r.allow_only(b, "drive", {"probe_freq", "probe_flux", "gate"});
    const bool need_freq = c.scenario == Scenario::switch_ || c.scenario == Scenario::correlations ||
                           c.scenario == Scenario::custom;
    if (c.scenario != Scenario::spectrum) r.real(b, "drive", "probe_freq", need_freq, c.drive.probe_freq);
    if (c.scenario != Scenario::saturation) r.real(b, "drive", "probe_flux", true, c.drive.probe_flux, kNonNegative);
  } else {
    r.allow_only(b, "drive", {"detuning", "rabi"});
    r.real(b, "drive", "detuning", !swept, c.drive.detuning);
    r.real(b, "drive", "rabi", true, c.drive.rabi, kNonNegative);
  }
  if (c.scenario == Scenario::switch_) {
    const auto g = b ? r.block(b, "gate", true) : absent();
    if (!g) return;
    r.allow_only(g, "drive.gate", {"target", "duration_ns", "strength"});
    GatePulse pulse;
    std::string target;
    if (r.text(g, "drive.gate", "target", true, target, {"u", "c"}))
      pulse.target = target == "u" ? Level::u : Level::c;
    r.real(g, "drive.gate", "duration_ns", true, pulse.duration_ns, kPositive);
    r.real(g, "drive.gate", "strength", true, pulse.strength, kNonNegative);
    c.drive.gate = pulse;
  } else if (b && b["gate"]) {
    r.fail(b["gate"], "drive.gate", "a gate pulse only applies to the switch scenario");
  }
}

void read_waveguide(Reader& r, const YAML::Node& root, ScenarioConfig& c) {
  const auto b = r.block(root, "waveguide", true);
  std::vector<std::string> allowed{"gamma_1d", "phase_phi",  "delta_rel", "detuning", "rabi", "collection_efficiency",
                                   "indistinguishability"};
  if (c.scenario == Scenario::entangle) allowed.push_back("sigma_delta");
  r.allow_only(b, "waveguide", allowed);
  auto& w = c.waveguide;
  r.real(b, "waveguide", "gamma_1d", true, w.gamma_1d, kNonNegative);
  r.real(b, "waveguide", "phase_phi", true, w.phase_phi);
  r.real(b, "waveguide", "delta_rel", true, w.delta_rel);
  double detuning = w.drive1.detuning, rabi = w.drive1.rabi;
  r.real(b, "waveguide", "detuning", true, detuning);
  r.real(b, "waveguide", "rabi", true, rabi, kNonNegative);
  w.drive1.detuning = w.drive2.detuning = detuning;
  w.drive1.rabi = w.drive2.rabi = rabi;
  r.real(b, "waveguide", "collection_efficiency", true, w.collection_efficiency, kUnit);
  r.real(b, "waveguide", "indistinguishability", false, w.indistinguishability, kUnit);
  if (c.scenario == Scenario::entangle) r.real(b, "waveguide", "sigma_delta", false, c.sigma_delta_ghz, kNonNegative);
}

void read_sweep(Reader& r, const YAML::Node& root, ScenarioConfig& c, bool required) {
  const auto b = r.block(root, "sweep", required);
  if (!b) return;
  r.allow_only(b, "sweep", {"variable", "start", "stop", "step", "values"});
  const std::string want = allowed_sweep(c.scenario);
  r.text(b, "sweep", "variable", true, c.sweep.variable, {want});
  std::vector<double> grid;
  if (b["values"]) {
    if (b["start"] || b["stop"] || b["step"]) r.fail(b, "sweep", "give either values or start/stop/step, not both");
    const auto v = b["values"];
    if (!v.IsSequence() || v.size() == 0) {
      r.fail(v, "sweep.values", "expected a non-empty list of numbers");
      return;
    }
    for (const auto& item : v) {
      try {
        grid.push_back(item.as<double>());
      } catch (const YAML::Exception&) {
        r.fail(item, "sweep.values", "expected a number");
        return;
      }
    }
  } else {
    double start = 0, stop = 0, step = 0;
    const bool ok = r.real(b, "sweep", "start", true, start) & r.real(b, "sweep", "stop", true, stop) &
                    r.real(b, "sweep", "step", true, step, kPositive);
    if (!ok) return;
    if (stop < start) {
      r.fail(b["stop"], "sweep.stop", "must be >= sweep.start");
      return;
    }
    const double n = std::floor((stop - start) / step + 1e-9);
    if (n > 1e6) {
      r.fail(b, "sweep", "grid has more than 1e6 points");
      return;
    }
    for (long long i = 0; i <= static_cast<long long>(n); ++i) grid.push_back(start + static_cast<double>(i) * step);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      r.fail(b, "sweep", "grid must be finite and strictly increasing");
      return;
    }
  }
  const auto& var = c.sweep.variable;
  if (var == "probe_flux" && grid.front() < 0.0) r.fail(b, "sweep", "probe_flux values must be >= 0");
  if (var == "time" && grid.front() != 0.0) r.fail(b, "sweep", "time grid must start at 0 (end of the gate)");
  if (var == "time" && grid.back() < 2.0) r.fail(b, "sweep", "time grid must extend beyond 2 ns");
  if (var == "tau" && c.scenario == Scenario::entangle && grid.front() < 0.0)
    r.fail(b, "sweep", "beat delays must be >= 0");
  c.sweep.grid = std::move(grid);
}

void read_solver(Reader& r, const YAML::Node& root, ScenarioConfig& c) {
  const auto b = r.block(root, "solver", false);
  if (!b) return;
  r.allow_only(b, "solver", {"rtol", "atol", "fock_cutoff", "n_traj", "duration_ns", "seed", "workers"});
  auto& s = c.solver;
  r.real(b, "solver", "rtol", false, s.options.rtol, kPositive);
  r.real(b, "solver", "atol", false, s.options.atol, kPositive);
  r.integer(b, "solver", "fock_cutoff", false, s.fock_cutoff, 2);
  r.integer(b, "solver", "workers", false, s.workers, 1);
  if (b["n_traj"] && !uses_trajectories(c)) {
    r.fail(b["n_traj"], "solver.n_traj", "trajectories only apply to the correlations and custom scenarios");
    return;
  }
  r.integer(b, "solver", "n_traj", false, s.n_traj, 0);
  if (s.n_traj > 0) {
    r.real(b, "solver", "duration_ns", true, s.duration_ns, kPositive);
    std::uint64_t seed = 0;
    if (r.integer(b, "solver", "seed", true, seed, 0)) s.seed = seed;
  } else if (b["seed"]) {
    std::uint64_t seed = 0;
    if (r.integer(b, "solver", "seed", false, seed, 0)) s.seed = seed;
  }
}

void read_histogram(Reader& r, const YAML::Node& root, ScenarioConfig& c) {
  const auto b = r.block(root, "histogram", false);
  if (c.solver.n_traj == 0) {
    if (b) r.fail(b, "histogram", "a histogram needs trajectories (solver.n_traj > 0)");
    return;
  }
  CoincidenceConfig h;
  if (c.scenario == Scenario::custom && !c.channels_a.empty()) {
    h.channel_a = c.channels_a.front();
    h.channel_b = c.channels_b.front();
  }
  if (b) {
    r.allow_only(b, "histogram", {"channel_a", "channel_b", "bin_width_ns", "max_tau_ns", "norm_lo_ns", "norm_hi_ns"});
    r.text(b, "histogram", "channel_a", false, h.channel_a);
    r.text(b, "histogram", "channel_b", false, h.channel_b);
    r.real(b, "histogram", "bin_width_ns", false, h.bin_width_ns, kPositive);
    r.real(b, "histogram", "max_tau_ns", false, h.max_tau_ns, kPositive);
    h.with_default_window();
    r.real(b, "histogram", "norm_lo_ns", false, h.norm_lo_ns, kNonNegative);
    r.real(b, "histogram", "norm_hi_ns", false, h.norm_hi_ns, kPositive);
  }
  try {
    h.validate();
  } catch (const sivsim::Error& e) {
    r.fail(b ? b : root, "histogram", e.what());
    return;
  }
  if (h.max_tau_ns >= c.solver.duration_ns) {
    const YAML::Node at = b && b["max_tau_ns"] ? b["max_tau_ns"]
                          : root["solver"]["duration_ns"] ? root["solver"]["duration_ns"]
                                                          : (b ? b : root);
    r.fail(at, "histogram.max_tau_ns",
           "max_tau_ns (" + std::to_string(h.max_tau_ns) + ") must be below solver.duration_ns");
  }
  c.histogram = h;
}

void read_output(Reader& r, const YAML::Node& root, ScenarioConfig& c) {
  const auto b = r.block(root, "output", false);
  if (!b) return;
  r.allow_only(b, "output", {"directory", "formats"});
  r.text(b, "output", "directory", false, c.output.directory);
  std::vector<std::string> formats;
  if (r.strings(b, "output", "formats", false, formats)) {
    c.output.csv = c.output.records = false;
    for (const auto& f : formats) {
      if (f == "csv") {
        c.output.csv = true;
      } else if (f == "records") {
        if (c.solver.n_traj == 0) r.fail(b["formats"], "output.formats", "records need solver.n_traj > 0");
        c.output.records = true;
      } else {
        r.fail(b["formats"], "output.formats", "unknown format '" + f + "'; allowed: csv, records");
      }
    }
  }
}

// Channel names of a custom model are fixed by its type.
void check_channels(Reader& r, const YAML::Node& root, const ScenarioConfig& c) {
  LindbladModel model = c.model == CustomModel::cavity ? build_cavity_model(c.siv, c.cavity, c.drive)
                        : c.model == CustomModel::waveguide_single
                            ? build_waveguide_model(c.siv, std::nullopt, c.waveguide)
                            : build_waveguide_model(c.siv, c.siv, c.waveguide);
  std::vector<std::string> labels;
  for (const auto& j : model.jumps()) labels.push_back(j.label);
  auto check = [&](const std::vector<std::string>& names, const YAML::Node& at, const std::string& path) {
    for (const auto& n : names)
      if (!model.has_channel(n)) r.fail(at, path, "unknown channel '" + n + "'; model channels: " + join(labels));
  };
  const auto corr = root["correlate"];
  if (corr) {
    check(c.channels_a, corr, "correlate.channels_a");
    check(c.channels_b, corr, "correlate.channels_b");
  }
  if (c.histogram) {
    const auto h = root["histogram"] ? root["histogram"] : root;
    check({c.histogram->channel_a, c.histogram->channel_b}, h, "histogram");
  }
}

ScenarioConfig read(Reader& r, const YAML::Node& doc) {
  ScenarioConfig c;
  // A run manifest carries the resolved configuration under "config".
  const bool manifest = doc.IsMap() && doc["manifest_version"];
  const YAML::Node root = manifest ? doc["config"] : doc;
  if (manifest && (!root || !root.IsMap())) {
    r.fail(doc, "config", "manifest has no embedded configuration");
    return c;
  }
  if (!root.IsMap()) {
    r.fail(root, "", "configuration must be a mapping");
    return c;
  }
  r.allow_only(root, "",
               {"scenario", "model", "siv", "cavity", "drive", "waveguide", "raman", "correlate", "sweep", "solver",
                "histogram", "output"});
  std::string name;
  if (!r.text(root, "", "scenario", true, name, kScenarioNames)) return c;
  c.scenario = static_cast<Scenario>(std::find(kScenarioNames.begin(), kScenarioNames.end(), name) -
                                     kScenarioNames.begin());
  if (c.scenario == Scenario::custom) {
    const auto m = r.block(root, "model", true);
    r.allow_only(m, "model", {"type"});
    std::string type;
    if (r.text(m, "model", "type", true, type, kModelNames))
      c.model = static_cast<CustomModel>(std::find(kModelNames.begin(), kModelNames.end(), type) -
                                         kModelNames.begin());
    const auto corr = r.block(root, "correlate", false);
    if (corr) {
      r.allow_only(corr, "correlate", {"channels_a", "channels_b"});
      r.strings(corr, "correlate", "channels_a", true, c.channels_a);
      r.strings(corr, "correlate", "channels_b", true, c.channels_b);
    }
  }

  read_siv(r, root, c.siv);
  if (uses_cavity(c)) read_cavity(r, root, c.cavity);
  const bool sweep_required = c.scenario != Scenario::raman &&
                              !(c.scenario == Scenario::custom && c.channels_a.empty());
  read_sweep(r, root, c, sweep_required);
  if (uses_waveguide(c))
    read_waveguide(r, root, c);
  else
    read_drive(r, root, c, !c.sweep.grid.empty());
  if (c.scenario == Scenario::raman) {
    const auto b = r.block(root, "raman", false);
    r.allow_only(b, "raman", {"filter_fwhm_ghz", "span_ghz", "step_ghz"});
    r.real(b, "raman", "filter_fwhm_ghz", false, c.raman.filter_fwhm_ghz, kNonNegative);
    r.real(b, "raman", "span_ghz", false, c.raman.span_ghz, kPositive);
    r.real(b, "raman", "step_ghz", false, c.raman.step_ghz, kPositive);
    if (c.raman.span_ghz / c.raman.step_ghz > 1e6) r.fail(b, "raman", "spectrum grid has more than 1e6 points");
  }
  read_solver(r, root, c);
  c.cavity.fock_cutoff = c.solver.fock_cutoff;
  if (uses_trajectories(c)) read_histogram(r, root, c);
  read_output(r, root, c);
  if (c.scenario == Scenario::custom && r.violations.empty()) {
    try {
      check_channels(r, root, c);
    } catch (const sivsim::Error& e) {
      r.fail(root, "model", e.what());
    }
  }
  return c;
}

}  // namespace

std::string to_string(Scenario s) { return kScenarioNames[static_cast<std::size_t>(s)]; }

const std::vector<std::string>& scenario_names() { return kScenarioNames; }

std::string Violation::format(const std::string& source) const {
  std::string out = source;
  if (line > 0) out += ":" + std::to_string(line) + ":" + std::to_string(column);
  out += ": ";
  if (!path.empty()) out += path + ": ";
  return out + message;
}

ConfigError::ConfigError(std::string source, std::vector<Violation> violations)
    : std::runtime_error(violations.empty() ? source + ": invalid configuration"
                                            : violations.front().format(source)),
      source_(std::move(source)),
      violations_(std::move(violations)) {}

namespace {

std::pair<ScenarioConfig, std::vector<Violation>> load(const std::string& text) {
  Reader r;
  YAML::Node doc;
  try {
    doc = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    r.violations.push_back({e.mark.line + 1, e.mark.column + 1, "", e.msg});
    return {ScenarioConfig{}, r.violations};
  }
  if (!doc || doc.IsNull()) {
    r.violations.push_back({1, 1, "", "empty configuration"});
    return {ScenarioConfig{}, r.violations};
  }
  ScenarioConfig c = read(r, doc);
  return {std::move(c), std::move(r.violations)};
}

}  // namespace

std::vector<Violation> validate_config(const std::string& text) { return load(text).second; }

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  auto [cfg, violations] = load(text);
  if (!violations.empty()) throw ConfigError(source, std::move(violations));
  return cfg;
}

std::string read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, {{0, 0, "", "cannot read file"}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json ScenarioConfig::to_json() const {
  using nlohmann::json;
  json j;
  j["scenario"] = to_string(scenario);
  j["siv"] = {{"gamma", siv.gamma},
              {"orbital_splitting", siv.orbital_splitting},
              {"tau0", siv.tau0},
              {"temperature", siv.temperature},
              {"branching_ce", siv.branching_ce},
              {"dephasing", siv.dephasing},
              {"nonradiative_fraction", siv.nonradiative_fraction}};
  if (scenario == Scenario::custom) {
    j["model"] = {{"type", kModelNames[static_cast<std::size_t>(model)]}};
    if (!channels_a.empty()) j["correlate"] = {{"channels_a", channels_a}, {"channels_b", channels_b}};
  }
  if (uses_cavity(*this)) {
    j["cavity"] = {{"g", cavity.g},
                   {"kappa", cavity.kappa},
                   {"kappa_wg_fraction", cavity.kappa_wg_fraction},
                   {"detuning_cavity", cavity.detuning_cavity}};
    json d = json::object();
    if (scenario != Scenario::spectrum) d["probe_freq"] = drive.probe_freq;
    if (scenario != Scenario::saturation) d["probe_flux"] = drive.probe_flux;
    if (drive.gate)
      d["gate"] = {{"target", drive.gate->target == Level::u ? "u" : "c"},
                   {"duration_ns", drive.gate->duration_ns},
                   {"strength", drive.gate->strength}};
    if (!d.empty()) j["drive"] = d;
  } else if (uses_waveguide(*this)) {
    json w = {{"gamma_1d", waveguide.gamma_1d},
              {"phase_phi", waveguide.phase_phi},
              {"delta_rel", waveguide.delta_rel},
              {"detuning", waveguide.drive1.detuning},
              {"rabi", waveguide.drive1.rabi},
              {"collection_efficiency", waveguide.collection_efficiency},
              {"indistinguishability", waveguide.indistinguishability}};
    if (scenario == Scenario::entangle) w["sigma_delta"] = sigma_delta_ghz;
    j["waveguide"] = w;
  } else {
    json d = {{"rabi", drive.rabi}};
    if (sweep.grid.empty()) d["detuning"] = drive.detuning;
    j["drive"] = d;
  }
  if (scenario == Scenario::raman)
    j["raman"] = {
        {"filter_fwhm_ghz", raman.filter_fwhm_ghz}, {"span_ghz", raman.span_ghz}, {"step_ghz", raman.step_ghz}};
  if (!sweep.grid.empty()) j["sweep"] = {{"variable", sweep.variable}, {"values", sweep.grid}};
  json s = {{"rtol", solver.options.rtol},
            {"atol", solver.options.atol},
            {"fock_cutoff", solver.fock_cutoff},
            {"workers", solver.workers}};
  if (uses_trajectories(*this)) s["n_traj"] = solver.n_traj;
  if (solver.n_traj > 0) s["duration_ns"] = solver.duration_ns;
  if (solver.seed) s["seed"] = *solver.seed;
  j["solver"] = s;
  if (histogram)
    j["histogram"] = {{"channel_a", histogram->channel_a},   {"channel_b", histogram->channel_b},
                      {"bin_width_ns", histogram->bin_width_ns}, {"max_tau_ns", histogram->max_tau_ns},
                      {"norm_lo_ns", histogram->norm_lo_ns},     {"norm_hi_ns", histogram->norm_hi_ns}};
  json formats = json::array();
  if (output.csv) formats.push_back("csv");
  if (output.records) formats.push_back("records");
  j["output"] = {{"formats", formats}};
  if (!output.directory.empty()) j["output"]["directory"] = output.directory;
  return j;
}

}  // namespace sivsim::cli
