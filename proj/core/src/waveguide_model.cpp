#include <algorithm>
#include <cmath>
#include <numbers>

#include "peaks.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/siv_models.hpp"

namespace sivsim {

namespace {

// Local channels of emitter k. The waveguide share gamma_1d of the |e> -> |c>
// decay is handled by the caller.
void local_jumps(std::vector<JumpChannel>& out, const SivParams& siv, double gamma_1d, const HilbertSpace& space,
                 int k) {
  const ThermalRates th = thermal_rates(siv);
  const double ge = kTwoPi * siv.gamma - th.up;
  if (ge < 0.0) throw ParameterError("gamma is smaller than the thermal escape rate from |c>");
  const double radiative_c = ge * siv.branching_ce;
  const double wg = kTwoPi * gamma_1d;
  const double free_space = radiative_c * (1.0 - siv.nonradiative_fraction) - wg;
  if (free_space < -1e-12 * radiative_c)
    throw ParameterError("gamma_1d exceeds the radiative |e> -> |c> rate of emitter " + std::to_string(k));
  const std::string sfx = std::to_string(k);
  auto on = [&](int row, int col) { return emitter_operator(space, k, ops::transition(3, row, col)); };
  out.push_back({on(0, 2), std::max(free_space, 0.0), "S" + sfx});
  out.push_back({on(0, 2), radiative_c * siv.nonradiative_fraction, "NR" + sfx});
  out.push_back({on(1, 2), ge * (1.0 - siv.branching_ce), "U" + sfx});
  out.push_back({on(2, 2), kTwoPi * siv.dephasing, "D" + sfx});
  out.push_back({on(1, 0), th.up, "up" + sfx});
  out.push_back({on(0, 1), th.down, "down" + sfx});
}

// Emitter k in the frame of emitter 1's Raman line: |c> at 0, |u> at
// 2 pi delta_k, |e> at 2 pi (Delta_k + delta_k), Raman drive on |u>-|e>.
Operator emitter_hamiltonian(const HilbertSpace& space, int k, const DriveParams& drive, double delta_k) {
  auto on = [&](const Operator& single) { return emitter_operator(space, k, single); };
  const Operator pu = on(ops::projector(3, 1));
  const Operator pe = on(ops::projector(3, 2));
  const Operator eu = on(ops::transition(3, 2, 1));
  return pu * cplx(kTwoPi * delta_k) + pe * cplx(kTwoPi * (drive.detuning + delta_k)) +
         (eu + eu.dagger()) * cplx(0.5 * kTwoPi * drive.rabi);
}

}  // namespace

Operator emitter_operator(const HilbertSpace& space, int k, const Operator& single) {
  if (k < 1 || k > space.num_subsystems()) throw DimensionError("emitter index out of range");
  return embed(single, k - 1, space);
}

Operator emitter_lowering(const HilbertSpace& space, int k) {
  return emitter_operator(space, k, ops::transition(3, 0, 2));
}

LindbladModel build_waveguide_model(const SivParams& siv1, const std::optional<SivParams>& siv2,
                                    const WaveguideParams& wg) {
  siv1.validate();
  if (siv2) siv2->validate();
  wg.validate();
  const double g1d = kTwoPi * wg.gamma_1d;
  if (!siv2) {
    HilbertSpace space({3});
    std::vector<JumpChannel> jumps{{emitter_lowering(space, 1), g1d, "W"}};
    local_jumps(jumps, siv1, wg.gamma_1d, space, 1);
    return LindbladModel(emitter_hamiltonian(space, 1, wg.drive1, 0.0), std::move(jumps));
  }

  HilbertSpace space({3, 3});
  const Operator s1 = emitter_lowering(space, 1);
  const Operator s2 = emitter_lowering(space, 2);
  // Photons from lines that differ in frequency are told apart by the
  // time-averaged detection, so only equal lines interfere.
  const double eta = wg.delta_rel == 0.0 ? wg.indistinguishability : 0.0;
  std::vector<JumpChannel> jumps;
  if (eta > 0.0) jumps.push_back({s1 + s2 * std::polar(1.0, wg.phase_phi), eta * g1d, "W"});
  if (eta < 1.0) {
    jumps.push_back({s1, (1.0 - eta) * g1d, "W1"});
    jumps.push_back({s2, (1.0 - eta) * g1d, "W2"});
  }
  local_jumps(jumps, siv1, wg.gamma_1d, space, 1);
  local_jumps(jumps, *siv2, wg.gamma_1d, space, 2);
  Operator h = emitter_hamiltonian(space, 1, wg.drive1, 0.0) + emitter_hamiltonian(space, 2, wg.drive2, wg.delta_rel);
  return LindbladModel(std::move(h), std::move(jumps));
}

Detector waveguide_detector(const LindbladModel& model) {
  Detector out;
  for (const char* label : {"W", "W1", "W2"})
    if (model.has_channel(label)) out.push_back(model.collapse(label));
  if (out.empty()) throw ParameterError("model has no waveguide channel");
  return out;
}

BeatTerms beat_terms(const LindbladModel& model, std::span<const double> tau_grid, const SolverOptions& opts) {
  if (model.space().num_subsystems() != 2) throw DimensionError("beat_terms needs a two-emitter model");
  for (std::size_t i = 0; i < tau_grid.size(); ++i)
    if (tau_grid[i] < 0.0 || (i > 0 && !(tau_grid[i] > tau_grid[i - 1])))
      throw ParameterError("beat tau grid must be non-negative and increasing");
  const DensityState ss = steady_state(model, opts);
  const Matrix& rho = ss.rho();
  const Matrix s1 = emitter_lowering(model.space(), 1).matrix();
  const Matrix s2 = emitter_lowering(model.space(), 2).matrix();
  const Matrix number = s1.adjoint() * s1 + s2.adjoint() * s2;
  const Matrix cross_obs = s1.adjoint() * s2;
  const double n = (number * rho).trace().real();
  if (!(n > 0.0)) throw ZeroFluxError("W");

  std::vector<double> grid{0.0};
  for (double t : tau_grid)
    if (t > 0.0) grid.push_back(t);
  const SparseMatrix l = liouvillian(model);
  const auto pop = propagate(l, s1 * rho * s1.adjoint() + s2 * rho * s2.adjoint(), grid, opts);
  const auto coh = propagate(l, s1 * rho * s2.adjoint(), grid, opts);

  BeatTerms out;
  const std::size_t offset = tau_grid.empty() || tau_grid.front() > 0.0 ? 1 : 0;
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    const std::size_t k = i + offset;
    out.tau.push_back(tau_grid[i]);
    out.baseline.push_back((number * pop[k]).trace().real() / (n * n));
    out.cross.push_back((cross_obs * coh[k]).trace() / (n * n));
  }
  return out;
}

BeatResult entangled_state_beat(const SivParams& siv, const WaveguideParams& wg, std::span<const double> tau_grid,
                                double sigma_delta_ghz, const SolverOptions& opts) {
  if (sigma_delta_ghz < 0.0) throw ParameterError("sigma_delta must be >= 0");
  // Equal Raman lines with separate channels; the relative frequency enters
  // only as the phase of the cross term.
  WaveguideParams secular = wg;
  secular.delta_rel = 0.0;
  secular.indistinguishability = 0.0;
  const LindbladModel model = build_waveguide_model(siv, siv, secular);
  const BeatTerms terms = beat_terms(model, tau_grid, opts);

  BeatResult out;
  out.tau = terms.tau;
  for (std::size_t i = 0; i < terms.tau.size(); ++i) {
    const double tau = terms.tau[i];
    const double envelope = std::exp(-2.0 * std::numbers::pi * std::numbers::pi * sigma_delta_ghz *
                                     sigma_delta_ghz * tau * tau);
    const cplx phase = std::polar(1.0, -kTwoPi * wg.delta_rel * tau);
    const double inter = 2.0 * (phase * terms.cross[i]).real() * envelope;
    out.baseline.push_back(terms.baseline[i]);
    out.interference.push_back(inter);
    out.g2.push_back(terms.baseline[i] + inter);
    const double mag = std::abs(terms.cross[i]);
    out.fringe.push_back(mag > 0.0 ? 0.5 * (1.0 + (phase * terms.cross[i]).real() / mag) : 0.0);
  }
  return out;
}

double sigma_delta_for_half_width(double t_half_ns) {
  if (!(t_half_ns > 0.0)) throw ParameterError("half width must be > 0");
  return std::sqrt(std::numbers::ln2 / 2.0) / (std::numbers::pi * t_half_ns);
}

double first_beat_zero(const BeatResult& beat) {
  const auto& t = beat.tau;
  const auto& y = beat.fringe;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (t[i] <= 0.0) continue;
    if (y[i] < y[i - 1] && y[i] <= y[i + 1]) {
      // Vertex of the parabola through the three points.
      const double x0 = t[i - 1], x1 = t[i], x2 = t[i + 1];
      const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
      const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
      const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
      return den == 0.0 ? x1 : x1 - 0.5 * num / den;
    }
  }
  throw Error("no beat zero inside the tau grid");
}

namespace {

LindbladModel raman_model(const SivParams& siv, const DriveParams& drive) {
  WaveguideParams wg;
  wg.gamma_1d = 0.0;
  wg.drive1 = drive;
  return build_waveguide_model(siv, std::nullopt, wg);
}

}  // namespace

RamanSpectrum raman_spectrum(const SivParams& siv, const DriveParams& drive, std::span<const double> freq_grid,
                             double filter_fwhm_ghz, const SolverOptions& opts) {
  const LindbladModel model = raman_model(siv, drive);
  const DensityState ss = steady_state(model, opts);
  const SpectrumEvaluator eval(model, ss, emitter_lowering(model.space(), 1));
  RamanSpectrum out;
  for (double nu : freq_grid) {
    out.freq_ghz.push_back(nu);
    // The model frame sits at the Raman line, nu_ec - Delta.
    out.power.push_back(eval(nu + drive.detuning, filter_fwhm_ghz));
  }
  return out;
}

PeakFit raman_peak(const SivParams& siv, const DriveParams& drive, double filter_fwhm_ghz,
                   const SolverOptions& opts) {
  const LindbladModel model = raman_model(siv, drive);
  const DensityState ss = steady_state(model, opts);
  const SpectrumEvaluator eval(model, ss, emitter_lowering(model.space(), 1));
  auto s = [&](double nu_frame) { return eval(nu_frame, filter_fwhm_ghz); };
  // The line is at most ~0.1 GHz from the frame origin (light shift) and
  // tens of MHz wide.
  const detail::Peak p = detail::find_peak(s, -0.1, 0.1, 401, 1e-3);
  return {p.x - drive.detuning, p.fwhm(), p.height};
}

}  // namespace sivsim
