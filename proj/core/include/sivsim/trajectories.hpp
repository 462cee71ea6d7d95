#pragma once

// Monte-Carlo wavefunction unraveling of a LindbladModel. Each trajectory
// produces a DetectionRecord: the time-ordered list of jumps (clicks) with
// the channel that fired.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sivsim/hilbert.hpp"
#include "sivsim/lindblad.hpp"

namespace sivsim {

struct Click {
  double time_ns;
  int channel;  // index into DetectionRecord::labels
};

struct DetectionRecord {
  std::vector<Click> clicks;
  double duration_ns = 0.0;
  std::int64_t trajectory_id = 0;
  std::uint64_t seed = 0;
  std::shared_ptr<const std::vector<std::string>> labels;

  const std::string& label(const Click& c) const { return (*labels)[static_cast<std::size_t>(c.channel)]; }
  /// Index of `label` in labels, or -1 when the channel is absent.
  int channel_id(const std::string& label) const;
};

struct TrajectoryOptions {
  /// Coarse propagation step; the jump time is refined by halving it
  /// `refinement_levels` times.
  double step_ns = 0.25;
  int refinement_levels = 18;
  int workers = 1;
  /// Channels written into records; empty keeps every channel.
  std::vector<std::string> record_channels;
  /// Trajectories per deterministic batch handed to the sink.
  int batch_size = 512;
};

struct ObservableSamples {
  std::vector<double> t_grid;
  /// mean[k][i]: ensemble average of observable k at t_grid[i].
  std::vector<std::vector<double>> mean;
  std::vector<std::vector<double>> std_error;
};

class TrajectoryEngine {
 public:
  explicit TrajectoryEngine(const LindbladModel& model, TrajectoryOptions opts = {});

  std::vector<DetectionRecord> run(const DensityState& rho0, double duration_ns, int n_traj,
                                   std::uint64_t seed) const;

  /// Streams records to `sink` in trajectory-id order, batch by batch, so
  /// memory stays bounded for large ensembles.
  void run(const DensityState& rho0, double duration_ns, int n_traj, std::uint64_t seed,
           const std::function<void(DetectionRecord&&)>& sink) const;

  /// Ensemble averages of Hermitian observables along unraveled trajectories.
  ObservableSamples sample(const DensityState& rho0, std::span<const double> t_grid,
                           std::span<const Operator> observables, int n_traj, std::uint64_t seed) const;

  /// Normalized no-jump evolution exp(-i H_eff t) psi0 / norm.
  Vector no_jump_state(const Vector& psi0, double t_ns) const;

  double resolution_ns() const noexcept;
  const LindbladModel& model() const noexcept { return model_; }

  struct Impl;  // opaque; defined in the implementation file

 private:
  LindbladModel model_;
  TrajectoryOptions opts_;
  std::shared_ptr<const Impl> impl_;
};

std::vector<DetectionRecord> run_trajectories(const LindbladModel& model, const DensityState& rho0,
                                              double duration_ns, int n_traj, std::uint64_t seed,
                                              const TrajectoryOptions& opts = {});

}  // namespace sivsim
