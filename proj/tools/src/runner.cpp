#include "sivsim_cli/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>

#include <Eigen/Core>

#include "sivsim/analysis.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/records_io.hpp"
#include "sivsim/trajectories.hpp"
#include "table.hpp"

#ifndef SIVSIM_VERSION
#define SIVSIM_VERSION "0.0.0"
#endif

namespace sivsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;

// Collects the outputs of one run; files are listed in the manifest.
class RunContext {
 public:
  RunContext(const ScenarioConfig& cfg, fs::path dir, int workers, std::optional<std::uint64_t> seed)
      : cfg(cfg), dir(std::move(dir)), workers(workers), seed(seed) {}

  const ScenarioConfig& cfg;
  fs::path dir;
  int workers;
  std::optional<std::uint64_t> seed;
  json results = json::object();
  json convergence = json::object();
  json files = json::array();

  SolverOptions solver() const { return cfg.solver.options; }

  void write(const Table& t, const std::string& name) {
    if (!cfg.output.csv) return;
    t.write(dir / name, preamble());
    files.push_back({{"name", name}, {"kind", "table"}, {"rows", t.rows()}});
  }

  std::string preamble() const {
    std::string p = "sivsim " SIVSIM_VERSION " scenario=" + to_string(cfg.scenario);
    if (seed) p += " seed=" + std::to_string(*seed);
    return p;
  }
};

SweepOptions sweep_options(const RunContext& ctx) { return {ctx.solver(), ctx.workers}; }

json convergence_json(const ConvergenceCheck& c) {
  return {{"fock_cutoff", c.cutoff},
          {"doubled_cutoff", c.doubled_cutoff},
          {"max_relative_change", c.max_relative_change},
          {"tolerance", 1e-6},
          {"passed", c.passed}};
}

void record_fock_convergence(RunContext& ctx, const DriveParams& drive) {
  ctx.convergence["fock_doubling"] =
      convergence_json(fock_convergence(ctx.cfg.siv, ctx.cfg.cavity, drive, 1e-6, ctx.solver()));
}

void run_spectrum(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto spec = transmission_spectrum(c.siv, c.cavity, c.drive.probe_flux, c.sweep.grid, sweep_options(ctx));
  Table t("probe transmission relative to the bare cavity, and free-space fluorescence",
          {{"probe_freq_ghz", "GHz"}, {"transmission", "dimensionless"}, {"fluorescence_per_ns", "1/ns"}});
  for (std::size_t i = 0; i < spec.freq_ghz.size(); ++i)
    t.row({spec.freq_ghz[i], spec.transmission[i], spec.fluorescence[i]});
  ctx.write(t, "spectrum.csv");
  ctx.results["cooperativity"] = cooperativity(c.cavity.g, c.cavity.kappa, c.siv.gamma);
  ctx.results["extinction_on_grid"] = spec.extinction;
  ctx.results["extinction"] = extinction(c.siv, c.cavity, c.drive.probe_flux, ctx.solver());
  ctx.results["fluorescence_fwhm_ghz"] = fluorescence_linewidth(c.siv, c.cavity, c.drive.probe_flux, ctx.solver());
  DriveParams d = c.drive;
  d.probe_freq = 0.0;
  record_fock_convergence(ctx, d);
}

void run_saturation(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto sat = saturation_sweep(c.siv, c.cavity, c.sweep.grid, sweep_options(ctx));
  Table t("weak-probe extinction and fluorescence linewidth versus probe flux",
          {{"probe_flux_per_ns", "1/ns"}, {"extinction", "dimensionless"}, {"fluorescence_fwhm_ghz", "GHz"}});
  for (std::size_t i = 0; i < sat.flux.size(); ++i) t.row({sat.flux[i], sat.extinction[i], sat.linewidth_ghz[i]});
  ctx.write(t, "saturation.csv");
  ctx.results["extinction_min_flux"] = sat.extinction.front();
  ctx.results["extinction_max_flux"] = sat.extinction.back();
  DriveParams d = c.drive;
  d.probe_flux = c.sweep.grid.back();
  record_fock_convergence(ctx, d);
}

void run_switch(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto sw = switch_dynamics(c.siv, c.cavity, c.drive, c.sweep.grid, ctx.solver());
  Table t("probe transmission and fluorescence after the gate pulse",
          {{"t_ns", "ns"}, {"transmission", "dimensionless"}, {"fluorescence_per_ns", "1/ns"}});
  t.note("t = 0 is the end of the gate pulse");
  for (std::size_t i = 0; i < sw.t_ns.size(); ++i) t.row({sw.t_ns[i], sw.transmission[i], sw.fluorescence[i]});
  ctx.write(t, "switch.csv");
  auto sign = [](double x) { return x > 0 ? "increased" : x < 0 ? "suppressed" : "unchanged"; };
  ctx.results["transmission_steady"] = sw.transmission_steady;
  ctx.results["fluorescence_steady_per_ns"] = sw.fluorescence_steady;
  ctx.results["tau_transmission_ns"] = sw.tau_transmission_ns;
  ctx.results["tau_fluorescence_ns"] = sw.tau_fluorescence_ns;
  ctx.results["transmission_transient"] = sign(sw.transmission_transient);
  ctx.results["fluorescence_transient"] = sign(sw.fluorescence_transient);
  double worst = 0.0;
  for (const auto& s : sw.states) worst = std::max(worst, std::abs(s.rho().trace().real() - 1.0));
  ctx.convergence["max_trace_error"] = worst;
  DriveParams d = c.drive;
  d.gate.reset();
  record_fock_convergence(ctx, d);
}

// Unravels `model` from its steady state; streams records to disk and into
// a histogram, then compares with the binned regression curve.
void run_trajectories(RunContext& ctx, const LindbladModel& model, const DensityState& steady) {
  const auto& c = ctx.cfg;
  const auto& h = *c.histogram;
  TrajectoryOptions topts;
  topts.workers = ctx.workers;
  std::set<std::string> channels{h.channel_a, h.channel_b};
  for (const auto& n : c.channels_a) channels.insert(n);
  for (const auto& n : c.channels_b) channels.insert(n);
  topts.record_channels.assign(channels.begin(), channels.end());
  const TrajectoryEngine engine(model, topts);

  std::ofstream records_out;
  std::optional<RecordWriter> writer;
  if (c.output.records) {
    records_out.open(ctx.dir / "records.csv", std::ios::binary);
    if (!records_out) throw Error("cannot write records.csv");
    const std::vector<std::string> comments{ctx.preamble(), "initial state: steady state of the model"};
    writer.emplace(records_out, comments);
  }
  CoincidenceHistogram hist(h);
  std::int64_t clicks = 0;
  engine.run(steady, c.solver.duration_ns, c.solver.n_traj, *ctx.seed, [&](DetectionRecord&& r) {
    clicks += static_cast<std::int64_t>(r.clicks.size());
    hist.add(r);
    if (writer) writer->write(r);
  });
  if (writer) {
    writer->finish(c.solver.duration_ns, *ctx.seed);
    records_out.close();
    ctx.files.push_back({{"name", "records.csv"}, {"kind", "records"}, {"trajectories", c.solver.n_traj}});
  }
  ctx.results["trajectories"] = c.solver.n_traj;
  ctx.results["clicks"] = clicks;
  ctx.results["time_resolution_ns"] = engine.resolution_ns();

  const CorrelationResult measured = hist.result();
  const double w = h.bin_width_ns;
  std::vector<double> fine;
  for (double t = -h.max_tau_ns - w; t <= h.max_tau_ns + w + 1e-9; t += 0.125 * w) fine.push_back(t);
  const auto model_curve =
      correlate_g2(model, std::vector<std::string>{h.channel_a}, std::vector<std::string>{h.channel_b}, fine,
                   ctx.solver());
  const auto binned = bin_model_curve(model_curve, h, c.solver.duration_ns);

  Table t("coincidence histogram from detection records with the binned regression curve",
          {{"tau_ns", "ns"},
           {"g2_records", "dimensionless"},
           {"std_error", "dimensionless"},
           {"g2_model_binned", "dimensionless"},
           {"counts", "coincidences"}});
  t.note("channels " + h.channel_a + " then " + h.channel_b + "; bin width " + fmt(w) +
         " ns; normalized over |tau| in [" + fmt(h.norm_lo_ns) + ", " + fmt(h.norm_hi_ns) + "] ns");
  double chi2 = 0.0;
  int dof = 0;
  const auto counts = hist.counts();
  for (std::size_t i = 0; i < measured.tau.size(); ++i) {
    t.row({fmt(measured.tau[i]), fmt(measured.g2[i]), fmt(measured.std_error[i]), fmt(binned.g2[i]),
           std::to_string(counts[i])});
    if (measured.std_error[i] > 0.0) {
      const double z = (measured.g2[i] - binned.g2[i]) / measured.std_error[i];
      chi2 += z * z;
      ++dof;
    }
  }
  ctx.write(t, "g2_records.csv");
  ctx.results["records_vs_model_reduced_chi2"] = dof > 0 ? chi2 / dof : 0.0;
}

void run_correlations(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const LindbladModel model = build_cavity_model(c.siv, c.cavity, c.drive);
  const DensityState ss = steady_state(model, ctx.solver());
  const std::vector<std::pair<std::string, std::string>> pairs{{"T", "T"}, {"S", "S"}, {"S", "T"}};
  std::vector<CorrelationResult> curves;
  for (const auto& [a, b] : pairs)
    curves.push_back(correlate_g2(model, ss, Detector{model.collapse(a)}, Detector{model.collapse(b)},
                                  c.sweep.grid, ctx.solver()));
  Table t("intensity correlations by quantum regression",
          {{"tau_ns", "ns"}, {"g2_TT", "dimensionless"}, {"g2_SS", "dimensionless"}, {"g2_ST", "dimensionless"}});
  t.note("T: transmitted waveguide port; S: free-space scattering; g2_ST: S click then T click at +tau");
  for (std::size_t i = 0; i < c.sweep.grid.size(); ++i)
    t.row({c.sweep.grid[i], curves[0].g2[i], curves[1].g2[i], curves[2].g2[i]});
  ctx.write(t, "g2_model.csv");
  for (std::size_t k = 0; k < pairs.size(); ++k)
    ctx.results["g2_" + pairs[k].first + pairs[k].second + "_0"] =
        g2_zero_direct(ss, Detector{model.collapse(pairs[k].first)}, Detector{model.collapse(pairs[k].second)});
  ctx.results["flux_T_per_ns"] = flux(ss, {model.collapse("T")});
  ctx.results["flux_S_per_ns"] = flux(ss, {model.collapse("S")});
  if (c.solver.n_traj > 0) run_trajectories(ctx, model, ss);
  record_fock_convergence(ctx, c.drive);
}

void run_raman(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const std::vector<double> detunings = c.sweep.grid.empty() ? std::vector<double>{c.drive.detuning} : c.sweep.grid;
  Table spectra("Raman emission spectra; frequency relative to nu_ec",
                {{"detuning_ghz", "GHz"}, {"freq_ghz", "GHz"}, {"power", "arb. (photons/ns per GHz)"}});
  Table peaks("Raman line centre and width per detuning",
              {{"detuning_ghz", "GHz"}, {"center_ghz", "GHz"}, {"fwhm_ghz", "GHz"}, {"height", "arb."}});
  spectra.note("filter FWHM " + fmt(c.raman.filter_fwhm_ghz) + " GHz");
  json summary = json::array();
  for (double delta : detunings) {
    DriveParams d = c.drive;
    d.detuning = delta;
    std::vector<double> grid;
    const auto n = static_cast<long>(std::floor(2.0 * c.raman.span_ghz / c.raman.step_ghz + 1e-9));
    for (long i = 0; i <= n; ++i) grid.push_back(-delta - c.raman.span_ghz + static_cast<double>(i) * c.raman.step_ghz);
    const auto spec = raman_spectrum(c.siv, d, grid, c.raman.filter_fwhm_ghz, ctx.solver());
    for (std::size_t i = 0; i < spec.freq_ghz.size(); ++i) spectra.row({delta, spec.freq_ghz[i], spec.power[i]});
    const auto p = raman_peak(c.siv, d, c.raman.filter_fwhm_ghz, ctx.solver());
    peaks.row({delta, p.center_ghz, p.fwhm_ghz, p.height});
    summary.push_back({{"detuning_ghz", delta}, {"center_ghz", p.center_ghz}, {"fwhm_ghz", p.fwhm_ghz}});
  }
  ctx.write(spectra, "raman_spectra.csv");
  ctx.write(peaks, "raman_peaks.csv");
  ctx.results["peaks"] = summary;
  ctx.convergence["fock_doubling"] = "not applicable (no cavity mode)";
}

void run_entangle(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto rep = entanglement_report(c.siv, c.waveguide, ctx.solver());
  Table e("heralded two-emitter state after one waveguide click", {{"quantity", "-"}, {"value", "see name"}});
  e.note("fidelity: Bell-state fidelity within span{|cu>,|uc>}; fidelity_orbital: on the full {c,u}^2 state");
  const std::vector<std::pair<std::string, double>> rows{{"fidelity", rep.fidelity},
                                                         {"fidelity_orbital", rep.fidelity_orbital},
                                                         {"fidelity_lower_bound", rep.fidelity_lower_bound},
                                                         {"concurrence", rep.concurrence},
                                                         {"g2_ind_0", rep.g2_ind_0},
                                                         {"g2_dist_0", rep.g2_dist_0},
                                                         {"herald_rate_per_s", rep.herald_rate_per_s}};
  for (const auto& [k, v] : rows) {
    e.row(std::vector<std::string>{k, fmt(v)});
    ctx.results[k] = v;
  }
  ctx.write(e, "entanglement.csv");

  Table rho("conditional orbital density matrix; qubit basis 0 = |c>, 1 = |u>, index = 2 q1 + q2",
            {{"row", "index"}, {"col", "index"}, {"re", "dimensionless"}, {"im", "dimensionless"}});
  const Matrix& m = rep.conditional_state.rho();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      rho.row(std::vector<std::string>{std::to_string(i), std::to_string(j), fmt(m(i, j).real()), fmt(m(i, j).imag())});
  ctx.write(rho, "conditional_state.csv");

  const auto beat = entangled_state_beat(c.siv, c.waveguide, c.sweep.grid, c.sigma_delta_ghz, ctx.solver());
  Table b("conditional second-photon rate after a waveguide click",
          {{"tau_ns", "ns"},
           {"g2", "dimensionless"},
           {"baseline", "dimensionless"},
           {"interference", "dimensionless"},
           {"fringe", "dimensionless"}});
  b.note("delta_rel " + fmt(c.waveguide.delta_rel) + " GHz, Gaussian spread " + fmt(c.sigma_delta_ghz) + " GHz");
  for (std::size_t i = 0; i < beat.tau.size(); ++i)
    b.row({beat.tau[i], beat.g2[i], beat.baseline[i], beat.interference[i], beat.fringe[i]});
  ctx.write(b, "beat.csv");
  try {
    ctx.results["first_beat_zero_ns"] = first_beat_zero(beat);
  } catch (const Error&) {
    ctx.results["first_beat_zero_ns"] = nullptr;
  }
  ctx.convergence["fock_doubling"] = "not applicable (no cavity mode)";
}

void run_custom(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const LindbladModel model = c.model == CustomModel::cavity ? build_cavity_model(c.siv, c.cavity, c.drive)
                              : c.model == CustomModel::waveguide_single
                                  ? build_waveguide_model(c.siv, std::nullopt, c.waveguide)
                                  : build_waveguide_model(c.siv, c.siv, c.waveguide);
  const DensityState ss = steady_state(model, ctx.solver());
  Table f("steady-state photon flux per jump channel", {{"channel", "-"}, {"flux_per_ns", "1/ns"}});
  for (const auto& j : model.jumps()) {
    const double v = flux(ss, {model.collapse(j.label)});
    f.row(std::vector<std::string>{j.label, fmt(v)});
    ctx.results["flux_" + j.label + "_per_ns"] = v;
  }
  ctx.write(f, "steady_flux.csv");
  Table p("steady-state populations of the product basis", {{"index", "-"}, {"digits", "-"}, {"population", "-"}});
  for (int i = 0; i < model.dim(); ++i) {
    std::string digits;
    for (int d : model.space().digits(i)) digits += std::to_string(d);
    p.row(std::vector<std::string>{std::to_string(i), digits, fmt(ss.rho()(i, i).real())});
  }
  ctx.write(p, "steady_populations.csv");
  if (!c.channels_a.empty()) {
    const auto g2 = correlate_g2(model, c.channels_a, c.channels_b, c.sweep.grid, ctx.solver());
    Table t("intensity correlation by quantum regression", {{"tau_ns", "ns"}, {"g2", "dimensionless"}});
    auto names = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& n : v) s += (s.empty() ? "" : "+") + n;
      return s;
    };
    t.note("detector a: " + names(c.channels_a) + "; detector b: " + names(c.channels_b));
    for (std::size_t i = 0; i < g2.tau.size(); ++i) t.row({g2.tau[i], g2.g2[i]});
    ctx.write(t, "g2.csv");
  }
  if (c.solver.n_traj > 0) run_trajectories(ctx, model, ss);
  if (c.model == CustomModel::cavity)
    record_fock_convergence(ctx, c.drive);
  else
    ctx.convergence["fock_doubling"] = "not applicable (no cavity mode)";
}

json versions() {
  return {{"sivsim", SIVSIM_VERSION},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__},
          {"cplusplus", __cplusplus}};
}

void write_manifest(const fs::path& path, const json& m) {
  std::ofstream out(path, std::ios::binary);
  out << m.dump(2) << '\n';
}

}  // namespace

fs::path default_output_root() {
  if (const char* env = std::getenv("SIVSIM_OUT"); env && *env) return fs::path(env);
  return fs::current_path();
}

RunOutcome run_scenario(const ScenarioConfig& cfg_in, const RunOptions& opts) {
  ScenarioConfig cfg = cfg_in;
  if (opts.workers) cfg.solver.workers = *opts.workers;
  if (opts.seed) cfg.solver.seed = *opts.seed;

  RunOutcome outcome;
  const fs::path sub = cfg.output.directory.empty() ? fs::path(to_string(cfg.scenario)) : fs::path(cfg.output.directory);
  const fs::path root = opts.output_root.empty() ? default_output_root() : opts.output_root;
  outcome.directory = sub.is_absolute() ? sub : root / sub;
  outcome.manifest = outcome.directory / "manifest.json";

  const auto start = std::chrono::steady_clock::now();
  json manifest = {{"manifest_version", kManifestVersion},
                   {"tool", "sivsim"},
                   {"scenario", to_string(cfg.scenario)},
                   {"config_source", opts.config_source},
                   {"config", cfg.to_json()},
                   {"seed", cfg.solver.seed ? json(*cfg.solver.seed) : json(nullptr)},
                   {"workers", cfg.solver.workers},
                   {"versions", versions()}};
  try {
    fs::create_directories(outcome.directory);
  } catch (const fs::filesystem_error& e) {
    outcome.exit_code = kExitSolver;
    outcome.message = std::string("cannot create output directory: ") + e.what();
    return outcome;
  }

  RunContext ctx(cfg, outcome.directory, cfg.solver.workers, cfg.solver.seed);
  try {
    switch (cfg.scenario) {
      case Scenario::spectrum:
        run_spectrum(ctx);
        break;
      case Scenario::saturation:
        run_saturation(ctx);
        break;
      case Scenario::switch_:
        run_switch(ctx);
        break;
      case Scenario::correlations:
        run_correlations(ctx);
        break;
      case Scenario::raman:
        run_raman(ctx);
        break;
      case Scenario::entangle:
        run_entangle(ctx);
        break;
      case Scenario::custom:
        run_custom(ctx);
        break;
    }
    manifest["status"] = "ok";
  } catch (const std::exception& e) {
    outcome.exit_code = kExitSolver;
    outcome.message = "scenario " + to_string(cfg.scenario) + ": " + e.what();
    manifest["status"] = "failed";
    manifest["error"] = {{"message", outcome.message}};
  }
  manifest["results"] = ctx.results;
  manifest["convergence"] = ctx.convergence;
  manifest["files"] = ctx.files;
  manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(outcome.manifest, manifest);
  return outcome;
}

namespace {

void report_violations(const ConfigError& e, std::ostream& err) {
  for (const auto& v : e.violations()) err << v.format(e.source()) << '\n';
}

}  // namespace

int run_command(const std::string& config_path, RunOptions opts, std::ostream& out, std::ostream& err) {
  ScenarioConfig cfg;
  try {
    cfg = parse_config(read_config_file(config_path), config_path);
  } catch (const ConfigError& e) {
    report_violations(e, err);
    return kExitConfig;
  }
  opts.config_source = config_path;
  const RunOutcome r = run_scenario(cfg, opts);
  if (r.exit_code != kExitOk) {
    err << "error: " << r.message << '\n';
    if (!r.manifest.empty() && fs::exists(r.manifest)) err << "manifest: " << r.manifest.string() << '\n';
    return r.exit_code;
  }
  out << "wrote " << r.directory.string() << '\n';
  return kExitOk;
}

int validate_command(const std::string& config_path, std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    text = read_config_file(config_path);
  } catch (const ConfigError& e) {
    report_violations(e, err);
    return kExitConfig;
  }
  const auto violations = validate_config(text);
  for (const auto& v : violations) err << v.format(config_path) << '\n';
  if (!violations.empty()) return kExitConfig;
  out << config_path << ": ok\n";
  return kExitOk;
}

int figures_command(RunOptions opts, std::ostream& out, std::ostream& err) {
  int status = kExitOk;
  for (const auto& [name, text] : bundled_configs()) {
    const std::string source = "bundled:" + name;
    ScenarioConfig cfg;
    try {
      cfg = parse_config(text, source);
    } catch (const ConfigError& e) {
      report_violations(e, err);
      return kExitConfig;
    }
    RunOptions o = opts;
    o.config_source = source;
    const RunOutcome r = run_scenario(cfg, o);
    if (r.exit_code != kExitOk) {
      err << "error: " << r.message << '\n';
      status = r.exit_code;
    } else {
      out << "wrote " << r.directory.string() << '\n';
    }
  }
  return status;
}

}  // namespace sivsim::cli
