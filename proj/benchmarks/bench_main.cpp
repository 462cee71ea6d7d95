#include <benchmark/benchmark.h>

#include <vector>

#include "sivsim/analysis.hpp"
#include "sivsim/dynamics.hpp"
#include "sivsim/siv_models.hpp"
#include "sivsim/trajectories.hpp"

using namespace sivsim;

namespace {

LindbladModel cavity(int cutoff, double flux) {
  CavityParams c;
  c.fock_cutoff = cutoff;
  DriveParams d;
  d.probe_flux = flux;
  return build_cavity_model({}, c, d);
}

std::vector<double> grid(double stop, double step) {
  std::vector<double> t;
  for (int i = 0; i * step <= stop + 1e-12; ++i) t.push_back(i * step);
  return t;
}

}  // namespace

// Dense QR while d^2 <= 1024 (cutoff <= 10), sparse LU beyond.
static void BM_SteadyState(benchmark::State& state) {
  const LindbladModel m = cavity(static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(steady_state(m));
  state.counters["dim"] = m.dim();
}
BENCHMARK(BM_SteadyState)->Arg(4)->Arg(6)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_Evolve(benchmark::State& state) {
  const LindbladModel m = cavity(static_cast<int>(state.range(0)), 1.0);
  const DensityState rho0 = steady_state(m);
  const DensityState start = conditional_state_after_click(rho0, Detector{m.collapse("T")});
  const auto t = grid(50.0, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(m, start, t));
}
BENCHMARK(BM_Evolve)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_Trajectories(benchmark::State& state) {
  const LindbladModel m = cavity(4, 1.0);
  const DensityState rho0 = steady_state(m);
  TrajectoryOptions opts;
  opts.record_channels = {"T"};
  const TrajectoryEngine engine(m, opts);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(engine.run(rho0, 100.0, n, 1));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Trajectories)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Histogram(benchmark::State& state) {
  const auto records = poisson_records({{"T", state.range(0) * 0.01}}, 100.0, 1000, 3);
  std::int64_t clicks = 0;
  for (const auto& r : records) clicks += static_cast<std::int64_t>(r.clicks.size());
  for (auto _ : state) {
    CoincidenceHistogram h(CoincidenceConfig{});
    for (const auto& r : records) h.add(r);
    benchmark::DoNotOptimize(h.result());
  }
  state.SetItemsProcessed(state.iterations() * clicks);
}
BENCHMARK(BM_Histogram)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
