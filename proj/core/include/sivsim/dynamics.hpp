#pragma once

// Master-equation evolution, steady states, two-time correlations by
// quantum regression, and emission spectra.
//
// Units: time in ns, Hamiltonians and rates in rad/ns (angular), spectra
// and filter widths in ordinary GHz.

#include <span>
#include <string>
#include <vector>

#include "sivsim/hilbert.hpp"
#include "sivsim/lindblad.hpp"

namespace sivsim {

struct SolverOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  /// Trace drift beyond this raises IntegrationError; states are never renormalized.
  double trace_guard = 1e-6;
  double initial_step = 1e-4;
  /// Relative pivot threshold for the steady-state kernel (rank) test.
  double kernel_tol = 1e-10;
  /// Largest Liouvillian dimension (d^2) solved with dense QR.
  int dense_limit = 1024;
};

/// Integrates d(rho)/dt = L rho onto `t_grid` (increasing, starting at 0).
std::vector<DensityState> evolve(const LindbladModel& model, const DensityState& rho0,
                                 std::span<const double> t_grid, const SolverOptions& opts = {});

/// Propagates an arbitrary operator (not necessarily a state) with the same
/// generator; used for regression of off-diagonal sources. No trace guard.
std::vector<Matrix> propagate(const SparseMatrix& liouv, const Matrix& x0, std::span<const double> t_grid,
                              const SolverOptions& opts = {});

DensityState steady_state(const LindbladModel& model, const SolverOptions& opts = {});

struct CorrelationResult {
  std::vector<double> tau;  // ns
  std::vector<double> g2;
  std::vector<double> std_error;
  /// Uncorrelated reference level used to normalize (model: <A><B>; records: plateau rate).
  double normalization = 1.0;

  /// Gaussian timing-jitter convolution (sigma in ns); renormalized at the grid edges.
  CorrelationResult with_jitter(double sigma_ns) const;
};

/// A detector is the set of collapse operators whose clicks it cannot tell apart.
using Detector = std::vector<Operator>;

/// g2_ab(tau) = sum <A_i^dag(0) B_j^dag(tau) B_j(tau) A_i(0)> / (<A^dag A><B^dag B>);
/// negative tau swaps the roles of the two detectors.
CorrelationResult correlate_g2(const LindbladModel& model, const DensityState& steady, const Detector& a,
                               const Detector& b, std::span<const double> tau_grid,
                               const SolverOptions& opts = {});
CorrelationResult correlate_g2(const LindbladModel& model, const Operator& a, const Operator& b,
                               std::span<const double> tau_grid, const SolverOptions& opts = {});
CorrelationResult correlate_g2(const LindbladModel& model, const std::vector<std::string>& channels_a,
                               const std::vector<std::string>& channels_b, std::span<const double> tau_grid,
                               const SolverOptions& opts = {});

/// Steady-state fourth moment sum <A_i^dag B_j^dag B_j A_i> / (<A^dag A><B^dag B>).
double g2_zero_direct(const DensityState& steady, const Detector& a, const Detector& b);

/// Photon flux sum_i <A_i^dag A_i>.
double flux(const DensityState& state, const Detector& detector);

/// Incoherent emission spectrum of `dipole`, evaluated through the exact
/// resolvent of the Liouvillian. A Lorentzian filter of FWHM f (GHz)
/// convolves the spectrum; f = 0 is the bare spectrum.
class SpectrumEvaluator {
 public:
  SpectrumEvaluator(const LindbladModel& model, const DensityState& steady, const Operator& dipole);

  /// S(nu) for nu in GHz relative to the frame frequency.
  double operator()(double nu_ghz, double filter_fwhm_ghz = 0.0) const;
  /// |<dipole>|^2: weight of the elastic (delta-function) component.
  double coherent_weight() const noexcept { return coherent_weight_; }
  double incoherent_flux() const noexcept { return incoherent_flux_; }

 private:
  Matrix liouv_;
  Matrix regularizer_;
  Vector source_;
  Vector observable_;
  double coherent_weight_;
  double incoherent_flux_;
};

struct Spectrum {
  std::vector<double> freq_ghz;
  std::vector<double> power;
  double filter_fwhm_ghz = 0.0;
  double coherent_weight = 0.0;
};

Spectrum emission_spectrum(const LindbladModel& model, const Operator& dipole, std::span<const double> freq_grid,
                           double filter_fwhm_ghz, const SolverOptions& opts = {});

}  // namespace sivsim
