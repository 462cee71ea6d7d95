#include "sivsim/trajectories.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "sivsim/errors.hpp"
#include "sivsim/rng.hpp"
#include "parallel.hpp"

namespace sivsim {

int DetectionRecord::channel_id(const std::string& label) const {
  if (!labels) return -1;
  const auto it = std::find(labels->begin(), labels->end(), label);
  return it == labels->end() ? -1 : static_cast<int>(it - labels->begin());
}

struct TrajectoryEngine::Impl {
  int levels = 0;
  double tick_ns = 0.0;
  std::vector<Matrix> props;  // props[k] spans 2^(levels-k) ticks
  std::vector<Matrix> jumps;  // sqrt(rate) * op
  std::vector<bool> recorded;
  std::shared_ptr<const std::vector<std::string>> labels;
  Matrix heff;
};

namespace {

struct Walker {
  Vector psi;
  std::int64_t tick = 0;
  double threshold = 0.0;
};

// Initial-state ensemble from the spectral decomposition of rho0.
struct InitialEnsemble {
  std::vector<double> cumulative;
  std::vector<Vector> states;

  explicit InitialEnsemble(const DensityState& rho0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho0.rho() + rho0.rho().adjoint()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double p = es.eigenvalues()(i);
      if (p <= 1e-14) continue;
      acc += p;
      cumulative.push_back(acc);
      states.push_back(es.eigenvectors().col(i));
    }
    if (states.empty()) throw InvalidStateError("initial state has no positive weight");
    for (auto& c : cumulative) c /= acc;
  }

  const Vector& draw(double u) const {
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), states.size() - 1);
    return states[idx];
  }
};

}  // namespace

TrajectoryEngine::TrajectoryEngine(const LindbladModel& model, TrajectoryOptions opts)
    : model_(model), opts_(std::move(opts)) {
  if (!(opts_.step_ns > 0.0)) throw ParameterError("trajectory step must be positive");
  if (opts_.refinement_levels < 1 || opts_.refinement_levels > 40)
    throw ParameterError("refinement_levels must lie in [1, 40]");
  if (opts_.workers < 1) throw ParameterError("workers must be >= 1");
  if (opts_.batch_size < 1) throw ParameterError("batch_size must be >= 1");

  auto impl = std::make_shared<Impl>();
  impl->levels = opts_.refinement_levels;
  impl->tick_ns = opts_.step_ns / std::ldexp(1.0, impl->levels);
  impl->heff = model_.effective_hamiltonian();
  for (int k = 0; k <= impl->levels; ++k) {
    const double dt = opts_.step_ns / std::ldexp(1.0, k);
    const Matrix gen = cplx(0.0, -dt) * impl->heff;
    impl->props.push_back(gen.exp());
  }
  auto labels = std::make_shared<std::vector<std::string>>();
  for (const auto& j : model_.jumps()) {
    impl->jumps.push_back(std::sqrt(j.rate) * j.op.matrix());
    labels->push_back(j.label);
    const bool keep = opts_.record_channels.empty() ||
                      std::find(opts_.record_channels.begin(), opts_.record_channels.end(), j.label) !=
                          opts_.record_channels.end();
    impl->recorded.push_back(keep);
  }
  for (const auto& want : opts_.record_channels)
    if (!model_.has_channel(want)) throw ParameterError("record channel '" + want + "' not in model");
  impl->labels = std::move(labels);
  impl_ = std::move(impl);
}

double TrajectoryEngine::resolution_ns() const noexcept { return impl_->tick_ns; }

namespace {

// Advances `w` toward `target` ticks. Returns true when the norm crosses the
// jump threshold first; w.tick is then the jump time and w.psi the
// (unnormalized) state at that time.
bool advance(const TrajectoryEngine::Impl& impl, Walker& w, std::int64_t target) {
  const int levels = impl.levels;
  Vector next;
  auto refine = [&](int from_level) {
    for (int j = from_level; j <= levels; ++j) {
      next.noalias() = impl.props[static_cast<std::size_t>(j)] * w.psi;
      if (next.squaredNorm() > w.threshold) {
        w.psi.swap(next);
        w.tick += std::int64_t{1} << (levels - j);
      }
    }
    // Norm is above threshold at w.tick and below one tick later.
    next.noalias() = impl.props[static_cast<std::size_t>(levels)] * w.psi;
    w.psi.swap(next);
    w.tick += 1;
    return true;
  };

  while (w.tick < target) {
    const std::int64_t remaining = target - w.tick;
    // Largest available sub-step not exceeding the remaining span.
    int level = 0;
    while (level < levels && (std::int64_t{1} << (levels - level)) > remaining) ++level;
    next.noalias() = impl.props[static_cast<std::size_t>(level)] * w.psi;
    if (next.squaredNorm() > w.threshold) {
      w.psi.swap(next);
      w.tick += std::int64_t{1} << (levels - level);
    } else {
      if (level == levels) {
        w.psi.swap(next);
        w.tick += 1;
        return true;
      }
      return refine(level + 1);
    }
  }
  return false;
}

// Applies a jump at the current time; returns the channel index.
int jump(const TrajectoryEngine::Impl& impl, Walker& w, RandomStream& rng) {
  std::vector<double> weights(impl.jumps.size());
  double total = 0.0;
  for (std::size_t k = 0; k < impl.jumps.size(); ++k) {
    weights[k] = (impl.jumps[k] * w.psi).squaredNorm();
    total += weights[k];
  }
  if (!(total > 0.0)) throw NormUnderflowError("trajectory norm decayed but no jump channel has weight");
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t chosen = impl.jumps.size() - 1;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc && weights[k] > 0.0) {
      chosen = k;
      break;
    }
  }
  Vector psi = impl.jumps[chosen] * w.psi;
  const double n = psi.norm();
  if (!(n > 0.0)) throw NormUnderflowError("post-jump state has zero norm");
  w.psi = psi / n;
  w.threshold = rng.uniform();
  return static_cast<int>(chosen);
}

DetectionRecord run_single(const TrajectoryEngine::Impl& impl, const InitialEnsemble& init, double duration,
                           std::int64_t id, std::uint64_t seed) {
  RandomStream rng(seed, static_cast<std::uint64_t>(id));
  Walker w;
  w.psi = init.draw(rng.uniform());
  w.threshold = rng.uniform();
  const std::int64_t end = std::llround(duration / impl.tick_ns);

  DetectionRecord rec;
  rec.duration_ns = duration;
  rec.trajectory_id = id;
  rec.seed = seed;
  rec.labels = impl.labels;
  while (advance(impl, w, end)) {
    const double t = static_cast<double>(w.tick) * impl.tick_ns;
    const int ch = jump(impl, w, rng);
    if (impl.recorded[static_cast<std::size_t>(ch)] && t <= duration) rec.clicks.push_back({t, ch});
  }
  return rec;
}

}  // namespace

void TrajectoryEngine::run(const DensityState& rho0, double duration_ns, int n_traj, std::uint64_t seed,
                           const std::function<void(DetectionRecord&&)>& sink) const {
  if (!(rho0.space() == model_.space())) throw DimensionError("trajectories: initial state space differs");
  if (n_traj < 1) throw ParameterError("n_traj must be >= 1");
  if (!(duration_ns > 0.0)) throw ParameterError("duration must be positive");
  const InitialEnsemble init(rho0);
  for (int b0 = 0; b0 < n_traj; b0 += opts_.batch_size) {
    const int count = std::min(opts_.batch_size, n_traj - b0);
    std::vector<DetectionRecord> batch(static_cast<std::size_t>(count));
    detail::parallel_for(opts_.workers, count, [&](int i) {
      batch[static_cast<std::size_t>(i)] = run_single(*impl_, init, duration_ns, b0 + i, seed);
    });
    for (auto& r : batch) sink(std::move(r));
  }
}

std::vector<DetectionRecord> TrajectoryEngine::run(const DensityState& rho0, double duration_ns, int n_traj,
                                                   std::uint64_t seed) const {
  std::vector<DetectionRecord> out;
  out.reserve(static_cast<std::size_t>(std::max(n_traj, 0)));
  run(rho0, duration_ns, n_traj, seed, [&](DetectionRecord&& r) { out.push_back(std::move(r)); });
  return out;
}

ObservableSamples TrajectoryEngine::sample(const DensityState& rho0, std::span<const double> t_grid,
                                           std::span<const Operator> observables, int n_traj,
                                           std::uint64_t seed) const {
  if (n_traj < 2) throw ParameterError("sampling needs at least two trajectories");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] >= t_grid[i - 1])) throw ParameterError("sample grid must be non-decreasing");
  const InitialEnsemble init(rho0);
  const std::size_t nt = t_grid.size();
  const std::size_t no = observables.size();

  // Per-trajectory values, then reduced in id order for determinism.
  std::vector<std::vector<double>> values(static_cast<std::size_t>(n_traj), std::vector<double>(nt * no));
  detail::parallel_for(opts_.workers, n_traj, [&](int id) {
    RandomStream rng(seed, static_cast<std::uint64_t>(id));
    Walker w;
    w.psi = init.draw(rng.uniform());
    w.threshold = rng.uniform();
    auto& row = values[static_cast<std::size_t>(id)];
    for (std::size_t i = 0; i < nt; ++i) {
      const std::int64_t target = std::llround(t_grid[i] / impl_->tick_ns);
      while (advance(*impl_, w, target)) jump(*impl_, w, rng);
      const double nrm = w.psi.squaredNorm();
      for (std::size_t k = 0; k < no; ++k)
        row[k * nt + i] = (w.psi.dot(observables[k].matrix() * w.psi)).real() / nrm;
    }
  });

  ObservableSamples out;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  out.mean.assign(no, std::vector<double>(nt, 0.0));
  out.std_error.assign(no, std::vector<double>(nt, 0.0));
  for (std::size_t k = 0; k < no; ++k)
    for (std::size_t i = 0; i < nt; ++i) {
      double s = 0.0, s2 = 0.0;
      for (const auto& row : values) {
        const double v = row[k * nt + i];
        s += v;
        s2 += v * v;
      }
      const double n = static_cast<double>(n_traj);
      const double mean = s / n;
      const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
      out.mean[k][i] = mean;
      out.std_error[k][i] = std::sqrt(var / n);
    }
  return out;
}

Vector TrajectoryEngine::no_jump_state(const Vector& psi0, double t_ns) const {
  if (psi0.size() != model_.dim()) throw DimensionError("no_jump_state: vector length differs from model");
  const Matrix gen = cplx(0.0, -t_ns) * impl_->heff;
  Vector psi = gen.exp() * psi0;
  const double n = psi.norm();
  if (!(n > 0.0)) throw NormUnderflowError("no-jump state underflow");
  return psi / n;
}

std::vector<DetectionRecord> run_trajectories(const LindbladModel& model, const DensityState& rho0,
                                              double duration_ns, int n_traj, std::uint64_t seed,
                                              const TrajectoryOptions& opts) {
  return TrajectoryEngine(model, opts).run(rho0, duration_ns, n_traj, seed);
}

}  // namespace sivsim
