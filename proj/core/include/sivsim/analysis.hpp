#pragma once

// Coincidence histograms from detection records, and entanglement figures
// of merit for the two-emitter orbital state.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sivsim/dynamics.hpp"
#include "sivsim/hilbert.hpp"
#include "sivsim/lindblad.hpp"
#include "sivsim/siv_models.hpp"
#include "sivsim/trajectories.hpp"

namespace sivsim {

// ---------------------------------------------------------------- coincidences

struct CoincidenceConfig {
  double bin_width_ns = 0.2;
  double max_tau_ns = 50.0;
  std::string channel_a = "T";
  std::string channel_b = "T";
  /// |tau| window whose mean rate defines g2 = 1; defaults to [max_tau/2, max_tau].
  double norm_lo_ns = 25.0;
  double norm_hi_ns = 50.0;

  void validate() const;
  /// Default normalization window for the current max_tau.
  CoincidenceConfig& with_default_window();
};

/// Streaming accumulator of a-then-b delays, tau = t_b - t_a, in bins
/// centred on multiples of bin_width. Counts are integers, so merging
/// partial histograms is exact in any order.
class CoincidenceHistogram {
 public:
  explicit CoincidenceHistogram(CoincidenceConfig cfg);

  void add(const DetectionRecord& record);
  void merge(const CoincidenceHistogram& other);

  /// Normalized by the exposure-corrected plateau rate; Poisson errors.
  CorrelationResult result() const;

  const CoincidenceConfig& config() const noexcept { return cfg_; }
  std::span<const std::int64_t> counts() const noexcept { return counts_; }
  /// Bin centres (ns).
  std::vector<double> centers() const;
  std::int64_t records() const noexcept { return records_; }

 private:
  CoincidenceConfig cfg_;
  int half_bins_;
  std::vector<std::int64_t> counts_;
  // Exposure per bin: sum over records of the mean of (duration - |tau|) over the bin.
  std::vector<double> exposure_;
  std::int64_t records_ = 0;
  bool channels_seen_ = false;
};

CorrelationResult g2_from_records(std::span<const DetectionRecord> records, const CoincidenceConfig& cfg,
                                  int workers = 1);

/// Exposure-weighted bin averages of a model curve on the histogram bins,
/// normalized over the same plateau window; the oracle for histogram checks.
CorrelationResult bin_model_curve(const CorrelationResult& fine_curve, const CoincidenceConfig& cfg,
                                  double duration_ns);

/// Independent Poisson click streams with the given rates (1/ns) per channel.
std::vector<DetectionRecord> poisson_records(const std::map<std::string, double>& rates, double duration_ns,
                                             int n_records, std::uint64_t seed);

/// Adds uncorrelated Poisson background clicks (rates in 1/ns) to existing
/// records, keeping each record time-ordered.
void add_background(std::vector<DetectionRecord>& records, const std::map<std::string, double>& rates,
                    std::uint64_t seed);

// ---------------------------------------------------------------- entanglement

/// J rho J^dag / Tr(...) summed over the detector's collapse operators.
DensityState conditional_state_after_click(const DensityState& rho, const Detector& detector);

/// Click on a labelled channel of `model`, starting from its steady state.
DensityState conditional_state_after_click(const LindbladModel& model, const std::string& channel,
                                           const SolverOptions& opts = {});

/// Projects a two-emitter {c,u,e}^2 state onto {c,u}^2 and renormalizes.
/// Qubit basis: 0 = |c>, 1 = |u>.
DensityState restrict_to_orbitals(const DensityState& state);

/// Keeps only the span{|cu>, |uc>} block of a two-qubit orbital state.
DensityState restrict_to_single_excitation(const DensityState& qubits);

/// |B(phi)> = (|cu> + e^{i phi} |uc>) / sqrt(2) on the orbital qubits.
Vector bell_state(double phi);
Vector dark_state(double phi);

double fidelity_bell(const DensityState& qubits, double phi);

/// Wootters concurrence of a two-qubit state.
double concurrence(const DensityState& qubits);

/// Lower bound on the single-excitation fidelity from the zero-delay
/// correlations of indistinguishable and distinguishable emitters.
double fidelity_bound_from_g2(double g2_ind_0, double g2_dist_0);

struct EntanglementReport {
  double fidelity = 0.0;              // single-excitation (coincidence-conditioned) fidelity
  double fidelity_orbital = 0.0;      // fidelity of the full orbital conditional state
  double fidelity_lower_bound = 0.0;  // from g2_ind(0), g2_dist(0)
  double concurrence = 0.0;           // of the orbital conditional state
  double herald_rate_per_s = 0.0;
  double g2_ind_0 = 0.0;
  double g2_dist_0 = 0.0;
  DensityState conditional_state;  // orbital qubits
};

/// Steady-state heralding with identical emitters; compares the conditional
/// state with the estimate obtained from the two g2 measurements.
EntanglementReport entanglement_report(const SivParams& siv, const WaveguideParams& wg,
                                       const SolverOptions& opts = {});

}  // namespace sivsim
