#pragma once

// Physical parameter records and model builders for a three-level SiV
// center {|c>, |u>, |e>} coupled to a nanophotonic cavity or a shared
// waveguide, plus the scenario drivers built on them.
//
// Parameter records hold ordinary frequencies in GHz, times in ns and
// temperatures in K. Builders convert to angular units (rad/ns).

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sivsim/dynamics.hpp"
#include "sivsim/hilbert.hpp"
#include "sivsim/lindblad.hpp"

namespace sivsim {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Emitter levels; the integer value is the basis index on the emitter factor.
enum class Level : int { c = 0, u = 1, e = 2 };

struct SivParams {
  double gamma = 0.30;              // GHz, |c>-|e> linewidth with the cavity detuned
  double orbital_splitting = 64.0;  // GHz, nu_uc
  double tau0 = 10.0;               // ns, thermal depolarization time
  double temperature = 4.0;         // K
  double branching_ce = 0.9;        // fraction of |e> decay into |c>
  double dephasing = 0.2;           // GHz, pure dephasing of the optical coherence
  double nonradiative_fraction = 0.0;

  void validate() const;
};

struct CavityParams {
  double g = 2.1;                   // GHz
  double kappa = 57.0;              // GHz
  double kappa_wg_fraction = 0.85;  // share of kappa into the two waveguide ports
  double detuning_cavity = 0.0;     // GHz, cavity minus emitter
  int fock_cutoff = 4;

  void validate() const;
};

struct GatePulse {
  Level target = Level::u;  // state the pulse pumps into
  double duration_ns = 30.0;
  double strength = 1.0;  // GHz, Rabi frequency of the pump
};

struct DriveParams {
  double probe_freq = 0.0;   // GHz, probe minus nu_0
  double probe_flux = 0.01;  // photons/ns at the cavity input
  double detuning = 0.0;     // GHz, single-photon detuning Delta of a free-space Raman drive
  double rabi = 0.1;         // GHz, Rabi frequency of the free-space drive on |u>-|e>
  std::optional<GatePulse> gate;

  void validate() const;
};

struct WaveguideParams {
  double gamma_1d = 0.02;  // GHz, |e> -> |c> decay rate into the waveguide
  double phase_phi = 0.0;
  double delta_rel = 0.0;  // GHz, Raman frequency of emitter 2 minus emitter 1
  DriveParams drive1{.detuning = 3.0, .rabi = 0.1, .gate = {}};
  DriveParams drive2{.detuning = 3.0, .rabi = 0.1, .gate = {}};
  double collection_efficiency = 1.0;
  /// Share of the waveguide decay that interferes collectively (1: ideal
  /// indistinguishable photons, 0: fully distinguishable).
  double indistinguishability = 1.0;

  void validate() const;
};

/// 4 g^2 / (kappa gamma).
double cooperativity(double g, double kappa, double gamma);

/// Thermal orbital rates (1/ns): up + down = 1/tau0, up/down = exp(-h nu_uc / k_B T).
struct ThermalRates {
  double up;
  double down;
};
ThermalRates thermal_rates(const SivParams& siv);

/// exp(-h nu / k_B T) for nu in GHz and T in K.
double boltzmann_factor(double nu_ghz, double temperature_k);

// ---------------------------------------------------------------- cavity

/// Operators on the emitter (x) Fock space used by cavity scenarios.
struct CavityOperators {
  HilbertSpace space;
  Operator a;         // cavity annihilation
  Operator sigma_ce;  // |c><e|
  Operator sigma_ue;  // |u><e|
  Operator proj_c;
  Operator proj_u;
  Operator proj_e;
};
CavityOperators cavity_operators(int fock_cutoff);

/// Probe-frame model: space {c,u,e} (x) Fock(cutoff). Channels: T (waveguide
/// output port), L (input port and intrinsic loss), S (radiative |e>->|c>
/// outside the cavity), NR, U (|e>->|u>), D (dephasing), up, down.
LindbladModel build_cavity_model(const SivParams& siv, const CavityParams& cav, const DriveParams& drive);

/// Time-independent model during a gate pulse (probe off), in a frame
/// resonant with the pumped transition.
LindbladModel build_gate_model(const SivParams& siv, const CavityParams& cav, const GatePulse& gate);

struct TransmissionSpectrum {
  std::vector<double> freq_ghz;
  std::vector<double> transmission;  // relative to the g = 0 cavity
  std::vector<double> fluorescence;  // photons/ns in channel S
  double extinction = 0.0;           // 1 - min(transmission)
};

struct SweepOptions {
  SolverOptions solver;
  int workers = 1;
};

/// Relative transmission and fluorescence at one probe frequency.
struct ProbePoint {
  double transmission;
  double fluorescence;
};
ProbePoint probe_response(const SivParams& siv, const CavityParams& cav, const DriveParams& drive,
                          const SolverOptions& opts = {});

TransmissionSpectrum transmission_spectrum(const SivParams& siv, const CavityParams& cav, double flux,
                                           std::span<const double> freq_grid, const SweepOptions& opts = {});

/// Weak-probe extinction 1 - min T_rel, with the minimum located near resonance.
double extinction(const SivParams& siv, const CavityParams& cav, double flux, const SolverOptions& opts = {});

/// FWHM (GHz) of the fluorescence line versus probe frequency.
double fluorescence_linewidth(const SivParams& siv, const CavityParams& cav, double flux,
                              const SolverOptions& opts = {});

struct SaturationSweep {
  std::vector<double> flux;
  std::vector<double> extinction;
  std::vector<double> linewidth_ghz;
};
SaturationSweep saturation_sweep(const SivParams& siv, const CavityParams& cav, std::span<const double> flux_grid,
                                 const SweepOptions& opts = {});

struct SwitchResult {
  std::vector<double> t_ns;  // time after the end of the gate pulse
  std::vector<double> transmission;
  std::vector<double> fluorescence;
  double transmission_steady = 0.0;
  double fluorescence_steady = 0.0;
  double tau_transmission_ns = 0.0;  // fitted exponential relaxation
  double tau_fluorescence_ns = 0.0;
  /// Orbital transient: value minus steady state at the first sample after
  /// the 2 ns optical transient. Positive means increased.
  double transmission_transient = 0.0;
  double fluorescence_transient = 0.0;
  std::vector<DensityState> states;  // full states on t_ns, probe frame
};

/// Steady state under the probe, then the gate pulse, then relaxation under
/// the probe, sampled on t_grid (starting at 0 = end of gate).
SwitchResult switch_dynamics(const SivParams& siv, const CavityParams& cav, const DriveParams& drive,
                             std::span<const double> t_grid, const SolverOptions& opts = {});

/// Fits y(t) = y_inf + A exp(-t / tau) with y_inf fixed, over t >= t_min.
double fit_relaxation_time(std::span<const double> t, std::span<const double> y, double y_inf, double t_min);

struct ConvergenceCheck {
  int cutoff = 0;
  int doubled_cutoff = 0;
  double max_relative_change = 0.0;
  bool passed = false;
};

/// Recomputes the steady-state observables and g2_TT(0) with the Fock cutoff doubled.
ConvergenceCheck fock_convergence(const SivParams& siv, const CavityParams& cav, const DriveParams& drive,
                                  double tolerance = 1e-6, const SolverOptions& opts = {});

// ---------------------------------------------------------------- waveguide

/// Single emitter: space {c,u,e}; two emitters: {c,u,e} (x) {c,u,e}.
/// Waveguide channels: W (collective), or W1/W2 (separate) when the Raman
/// frequencies differ or photons are partially distinguishable. Local
/// channels carry the emitter index as suffix (S1, U1, D1, up1, down1, ...).
LindbladModel build_waveguide_model(const SivParams& siv1, const std::optional<SivParams>& siv2,
                                    const WaveguideParams& wg);

/// Every waveguide channel of a model, i.e. the photodetector on the waveguide.
Detector waveguide_detector(const LindbladModel& model);

/// |c><e| on emitter k (1 or 2) of a waveguide model space.
Operator emitter_lowering(const HilbertSpace& space, int k);
Operator emitter_operator(const HilbertSpace& space, int k, const Operator& single);

struct BeatResult {
  std::vector<double> tau;
  std::vector<double> g2;            // baseline + interference
  std::vector<double> baseline;      // distinguishable part
  std::vector<double> interference;  // 2 Re(phase * cross) / flux^2
  /// cos^2 of half the beat phase: (1 + Re(phase * cross) / |cross|) / 2.
  /// It is the factor the interference carries for a coherence phase-shifted
  /// by 2 pi delta tau, free of the optical ringing in |cross|.
  std::vector<double> fringe;
};

/// Conditional second-photon rate after a waveguide click, normalized to the
/// squared mean flux, for two emitters whose Raman lines differ by
/// delta_rel. A Gaussian spread sigma (GHz) of delta_rel is averaged
/// analytically. Both emitters use `siv`.
BeatResult entangled_state_beat(const SivParams& siv, const WaveguideParams& wg, std::span<const double> tau_grid,
                                double sigma_delta_ghz = 0.0, const SolverOptions& opts = {});

/// Components of the beat for an explicit model: baseline Tr[N e^{L tau} A]
/// and cross term Tr[C e^{L tau} B^dag], both divided by flux^2.
struct BeatTerms {
  std::vector<double> tau;
  std::vector<double> baseline;
  std::vector<cplx> cross;
};
BeatTerms beat_terms(const LindbladModel& model, std::span<const double> tau_grid, const SolverOptions& opts = {});

/// Gaussian width of delta_rel whose interference envelope falls to 1/2 at t_half.
double sigma_delta_for_half_width(double t_half_ns);

/// First zero of the fringe for tau > 0, i.e. its first local minimum
/// refined by parabolic interpolation.
double first_beat_zero(const BeatResult& beat);

struct RamanSpectrum {
  std::vector<double> freq_ghz;  // relative to nu_ec
  std::vector<double> power;
};

/// Single emitter under a free-space Raman drive of detuning Delta.
RamanSpectrum raman_spectrum(const SivParams& siv, const DriveParams& drive, std::span<const double> freq_grid,
                             double filter_fwhm_ghz = 0.0, const SolverOptions& opts = {});

struct PeakFit {
  double center_ghz;  // relative to nu_ec
  double fwhm_ghz;
  double height;
};
/// Locates the Raman line near nu_ec - Delta and measures its width.
PeakFit raman_peak(const SivParams& siv, const DriveParams& drive, double filter_fwhm_ghz = 0.0,
                   const SolverOptions& opts = {});

}  // namespace sivsim
