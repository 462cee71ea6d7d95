#include <algorithm>
#include <cmath>

#include "parallel.hpp"
#include "peaks.hpp"
#include "sivsim/errors.hpp"
#include "sivsim/siv_models.hpp"

namespace sivsim {

namespace {

constexpr int kEmitter = 0;
constexpr int kMode = 1;

// Total |e> decay rate such that the detuned linewidth equals gamma
// (the thermal |c> -> |u> escape also broadens the |c>-|e> line).
double excited_decay(const SivParams& siv, const ThermalRates& th) {
  const double rate = kTwoPi * siv.gamma - th.up;
  if (rate < 0.0) throw ParameterError("gamma is smaller than the thermal escape rate from |c>");
  return rate;
}

std::vector<JumpChannel> cavity_jumps(const SivParams& siv, const CavityParams& cav, const CavityOperators& o) {
  const ThermalRates th = thermal_rates(siv);
  const double ge = excited_decay(siv, th);
  const double kappa = kTwoPi * cav.kappa;
  const double port = 0.5 * kappa * cav.kappa_wg_fraction;
  const auto& space = o.space;
  const Operator up = embed(ops::transition(3, 1, 0), kEmitter, space);
  const Operator down = embed(ops::transition(3, 0, 1), kEmitter, space);
  const double radiative_c = ge * siv.branching_ce;
  return {
      {o.a, port, "T"},
      {o.a, kappa * (1.0 - cav.kappa_wg_fraction) + port, "L"},
      {o.sigma_ce, radiative_c * (1.0 - siv.nonradiative_fraction), "S"},
      {o.sigma_ce, radiative_c * siv.nonradiative_fraction, "NR"},
      {o.sigma_ue, ge * (1.0 - siv.branching_ce), "U"},
      {o.proj_e, kTwoPi * siv.dephasing, "D"},
      {up, th.up, "up"},
      {down, th.down, "down"},
  };
}

Operator jaynes_cummings(const CavityParams& cav, const CavityOperators& o) {
  return (o.a.dagger() * o.sigma_ce + o.sigma_ce.dagger() * o.a) * cplx(kTwoPi * cav.g);
}

// Probe-independent cavity reference (g = 0) output flux.
double reference_photons(const SivParams& siv, const CavityParams& cav, const DriveParams& drive,
                         const SolverOptions& opts) {
  CavityParams bare = cav;
  bare.g = 0.0;
  const LindbladModel m = build_cavity_model(siv, bare, drive);
  const DensityState ss = steady_state(m, opts);
  const CavityOperators o = cavity_operators(cav.fock_cutoff);
  return expectation(ss, o.a.dagger() * o.a).real();
}

// Observables compared in the Fock-cutoff convergence check.
std::vector<double> observables(const SivParams& siv, const CavityParams& cav, const DriveParams& drive,
                                const SolverOptions& opts) {
  const LindbladModel m = build_cavity_model(siv, cav, drive);
  const DensityState ss = steady_state(m, opts);
  const CavityOperators o = cavity_operators(cav.fock_cutoff);
  const double n = expectation(ss, o.a.dagger() * o.a).real();
  const double n_ref = reference_photons(siv, cav, drive, opts);
  std::vector<double> out{n / n_ref, flux(ss, {m.collapse("S")}), n, expectation(ss, o.proj_c).real(),
                          expectation(ss, o.proj_u).real(), expectation(ss, o.proj_e).real()};
  // Photon statistics need more Fock states than populations do.
  const Detector t{m.collapse("T")};
  if (flux(ss, t) > 0.0) out.push_back(g2_zero_direct(ss, t, t));
  return out;
}

}  // namespace

CavityOperators cavity_operators(int fock_cutoff) {
  if (fock_cutoff < 2) throw ParameterError("fock_cutoff must be >= 2");
  HilbertSpace space({3, fock_cutoff});
  return {space,
          embed(ops::destroy(fock_cutoff), kMode, space),
          embed(ops::transition(3, 0, 2), kEmitter, space),
          embed(ops::transition(3, 1, 2), kEmitter, space),
          embed(ops::projector(3, 0), kEmitter, space),
          embed(ops::projector(3, 1), kEmitter, space),
          embed(ops::projector(3, 2), kEmitter, space)};
}

LindbladModel build_cavity_model(const SivParams& siv, const CavityParams& cav, const DriveParams& drive) {
  siv.validate();
  cav.validate();
  drive.validate();
  const CavityOperators o = cavity_operators(cav.fock_cutoff);
  const Operator n = o.a.dagger() * o.a;
  // Frame rotating at the probe frequency on |e> and the cavity mode.
  const double nu = kTwoPi * drive.probe_freq;
  const double port = 0.5 * kTwoPi * cav.kappa * cav.kappa_wg_fraction;
  const double amplitude = std::sqrt(port * drive.probe_flux);
  Operator h = o.proj_u * cplx(kTwoPi * siv.orbital_splitting) + o.proj_e * cplx(-nu) +
               n * cplx(kTwoPi * cav.detuning_cavity - nu) + jaynes_cummings(cav, o) +
               (o.a + o.a.dagger()) * cplx(amplitude);
  return LindbladModel(std::move(h), cavity_jumps(siv, cav, o));
}

LindbladModel build_gate_model(const SivParams& siv, const CavityParams& cav, const GatePulse& gate) {
  siv.validate();
  cav.validate();
  const CavityOperators o = cavity_operators(cav.fock_cutoff);
  const double omega = kTwoPi * gate.strength;
  // Frame: |e> and photons at the bare |e> frequency; |u> rotates with the
  // pump when it drives |u>-|e>, otherwise it keeps its 64 GHz offset.
  Operator h = o.a.dagger() * o.a * cplx(kTwoPi * cav.detuning_cavity) + jaynes_cummings(cav, o);
  if (gate.target == Level::u) {
    h += o.proj_u * cplx(kTwoPi * siv.orbital_splitting);
    h += (o.sigma_ce + o.sigma_ce.dagger()) * cplx(0.5 * omega);
  } else if (gate.target == Level::c) {
    h += (o.sigma_ue + o.sigma_ue.dagger()) * cplx(0.5 * omega);
  } else {
    throw ParameterError("gate target must be u or c");
  }
  return LindbladModel(std::move(h), cavity_jumps(siv, cav, o));
}

ProbePoint probe_response(const SivParams& siv, const CavityParams& cav, const DriveParams& drive,
                          const SolverOptions& opts) {
  const LindbladModel m = build_cavity_model(siv, cav, drive);
  const DensityState ss = steady_state(m, opts);
  const CavityOperators o = cavity_operators(cav.fock_cutoff);
  const double n = expectation(ss, o.a.dagger() * o.a).real();
  const double n_ref = reference_photons(siv, cav, drive, opts);
  if (!(n_ref > 0.0)) throw ZeroFluxError("T");
  return {n / n_ref, flux(ss, {m.collapse("S")})};
}

TransmissionSpectrum transmission_spectrum(const SivParams& siv, const CavityParams& cav, double flux_in,
                                           std::span<const double> freq_grid, const SweepOptions& opts) {
  TransmissionSpectrum out;
  out.freq_ghz.assign(freq_grid.begin(), freq_grid.end());
  out.transmission.resize(freq_grid.size());
  out.fluorescence.resize(freq_grid.size());
  detail::parallel_for(opts.workers, static_cast<int>(freq_grid.size()), [&](int i) {
    DriveParams d;
    d.probe_freq = freq_grid[static_cast<std::size_t>(i)];
    d.probe_flux = flux_in;
    const ProbePoint p = probe_response(siv, cav, d, opts.solver);
    out.transmission[static_cast<std::size_t>(i)] = p.transmission;
    out.fluorescence[static_cast<std::size_t>(i)] = p.fluorescence;
  });
  if (!out.transmission.empty())
    out.extinction = 1.0 - *std::min_element(out.transmission.begin(), out.transmission.end());
  return out;
}

double extinction(const SivParams& siv, const CavityParams& cav, double flux_in, const SolverOptions& opts) {
  auto neg_t = [&](double nu) {
    DriveParams d;
    d.probe_freq = nu;
    d.probe_flux = flux_in;
    return -probe_response(siv, cav, d, opts).transmission;
  };
  const auto [nu, neg_min] = detail::locate_max(neg_t, -1.0, 1.0, 21);
  (void)nu;
  return 1.0 + neg_min;
}

double fluorescence_linewidth(const SivParams& siv, const CavityParams& cav, double flux_in,
                              const SolverOptions& opts) {
  auto fl = [&](double nu) {
    DriveParams d;
    d.probe_freq = nu;
    d.probe_flux = flux_in;
    return probe_response(siv, cav, d, opts).fluorescence;
  };
  return detail::find_peak(fl, -1.0, 1.0, 21, 0.1).fwhm();
}

SaturationSweep saturation_sweep(const SivParams& siv, const CavityParams& cav, std::span<const double> flux_grid,
                                 const SweepOptions& opts) {
  for (std::size_t i = 1; i < flux_grid.size(); ++i)
    if (!(flux_grid[i] > flux_grid[i - 1])) throw ParameterError("flux grid must be increasing");
  SaturationSweep out;
  out.flux.assign(flux_grid.begin(), flux_grid.end());
  out.extinction.resize(flux_grid.size());
  out.linewidth_ghz.resize(flux_grid.size());
  detail::parallel_for(opts.workers, static_cast<int>(flux_grid.size()), [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    out.extinction[k] = extinction(siv, cav, flux_grid[k], opts.solver);
    out.linewidth_ghz[k] = fluorescence_linewidth(siv, cav, flux_grid[k], opts.solver);
  });
  return out;
}

double fit_relaxation_time(std::span<const double> t, std::span<const double> y, double y_inf, double t_min) {
  if (t.size() != y.size()) throw DimensionError("fit: t and y lengths differ");
  double peak = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= t_min) peak = std::max(peak, std::abs(y[i] - y_inf));
  if (!(peak > 0.0)) throw ParameterError("fit: no deviation from the asymptote");
  // Weighted log-linear least squares while the deviation keeps its sign.
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  int sign = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min) continue;
    const double d = y[i] - y_inf;
    if (std::abs(d) < 1e-3 * peak) break;
    const int s = d > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) break;
    const double w = d * d;
    const double l = std::log(std::abs(d));
    sw += w;
    sx += w * t[i];
    sy += w * l;
    sxx += w * t[i] * t[i];
    sxy += w * t[i] * l;
  }
  const double den = sw * sxx - sx * sx;
  if (!(den > 0.0)) throw ParameterError("fit: fewer than two usable points");
  const double slope = (sw * sxy - sx * sy) / den;
  if (!(slope < 0.0)) throw ParameterError("fit: deviation does not decay");
  return -1.0 / slope;
}

SwitchResult switch_dynamics(const SivParams& siv, const CavityParams& cav, const DriveParams& drive,
                             std::span<const double> t_grid, const SolverOptions& opts) {
  if (!drive.gate) throw ParameterError("switch_dynamics needs a gate pulse");
  const GatePulse& gate = *drive.gate;
  const LindbladModel probe = build_cavity_model(siv, cav, drive);
  const LindbladModel pump = build_gate_model(siv, cav, gate);
  const CavityOperators o = cavity_operators(cav.fock_cutoff);
  const Operator number = o.a.dagger() * o.a;

  const DensityState ss = steady_state(probe, opts);
  const double t_gate = gate.duration_ns;
  const std::vector<double> gate_grid{0.0, t_gate};
  const DensityState after_gate = evolve(pump, ss, gate_grid, opts).back();

  // Both frames coincide at the start of the gate; at its end they differ by
  // a diagonal phase generated by the frame-frequency difference.
  const double d_exc = -kTwoPi * drive.probe_freq;
  const double d_u = gate.target == Level::c ? kTwoPi * siv.orbital_splitting : 0.0;
  const Matrix n_exc = (o.proj_e + number).matrix();
  Vector phase(probe.dim());
  for (int i = 0; i < probe.dim(); ++i) {
    const double theta = (d_exc * n_exc(i, i).real() + d_u * o.proj_u.matrix()(i, i).real()) * t_gate;
    phase(i) = std::polar(1.0, -theta);
  }
  Matrix rho = phase.asDiagonal() * after_gate.rho() * phase.conjugate().asDiagonal();
  const DensityState start(probe.space(), std::move(rho), Validation::kSkip);

  SwitchResult out;
  out.t_ns.assign(t_grid.begin(), t_grid.end());
  out.states = evolve(probe, start, t_grid, opts);
  const double n_ref = reference_photons(siv, cav, drive, opts);
  const Operator s = probe.collapse("S");
  for (const auto& st : out.states) {
    out.transmission.push_back(expectation(st, number).real() / n_ref);
    out.fluorescence.push_back(flux(st, {s}));
  }
  out.transmission_steady = expectation(ss, number).real() / n_ref;
  out.fluorescence_steady = flux(ss, {s});
  constexpr double kSkipOptical = 2.0;  // ns; excludes the fast optical transient
  const auto settled = std::lower_bound(out.t_ns.begin(), out.t_ns.end(), kSkipOptical);
  if (settled == out.t_ns.end()) throw ParameterError("switch time grid must extend beyond 2 ns");
  const auto k = static_cast<std::size_t>(settled - out.t_ns.begin());
  out.transmission_transient = out.transmission[k] - out.transmission_steady;
  out.fluorescence_transient = out.fluorescence[k] - out.fluorescence_steady;
  out.tau_transmission_ns = fit_relaxation_time(out.t_ns, out.transmission, out.transmission_steady, kSkipOptical);
  out.tau_fluorescence_ns = fit_relaxation_time(out.t_ns, out.fluorescence, out.fluorescence_steady, kSkipOptical);
  return out;
}

ConvergenceCheck fock_convergence(const SivParams& siv, const CavityParams& cav, const DriveParams& drive,
                                  double tolerance, const SolverOptions& opts) {
  CavityParams doubled = cav;
  doubled.fock_cutoff = 2 * cav.fock_cutoff;
  const auto a = observables(siv, cav, drive, opts);
  const auto b = observables(siv, doubled, drive, opts);
  ConvergenceCheck out{cav.fock_cutoff, doubled.fock_cutoff, 0.0, false};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(b[i]), 1e-300);
    out.max_relative_change = std::max(out.max_relative_change, std::abs(a[i] - b[i]) / scale);
  }
  out.passed = out.max_relative_change < tolerance;
  return out;
}

}  // namespace sivsim
