#include <iostream>

#include <CLI11.hpp>

#include "sivsim_cli/runner.hpp"

int main(int argc, char** argv) {
  using namespace sivsim::cli;

  CLI::App app{"sivsim: SiV cavity and waveguide QED scenario runner"};
  app.set_version_flag("--version", SIVSIM_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  int workers = 0;
  std::uint64_t seed = 0;
  auto* workers_opt = app.add_option("--workers", workers, "worker threads (overrides solver.workers)")
                          ->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides solver.seed)");

  std::string config;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "run one scenario configuration");
  run->add_option("config", config, "YAML configuration or run manifest")->required();
  run->add_option("--out", out_dir, "output root (default: $SIVSIM_OUT or the working directory)");
  auto* validate = app.add_subcommand("validate", "check a configuration without running it");
  validate->add_option("config", config, "YAML configuration or run manifest")->required();
  auto* figures = app.add_subcommand("figures", "run every bundled scenario configuration");
  figures->add_option("--out", out_dir, "output root (default: $SIVSIM_OUT or the working directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  RunOptions opts;
  if (*workers_opt) opts.workers = workers;
  if (*seed_opt) opts.seed = seed;
  opts.output_root = out_dir.empty() ? default_output_root() : std::filesystem::path(out_dir);

  if (*run) return run_command(config, opts, std::cout, std::cerr);
  if (*validate) return validate_command(config, std::cout, std::cerr);
  return figures_command(opts, std::cout, std::cerr);
}
