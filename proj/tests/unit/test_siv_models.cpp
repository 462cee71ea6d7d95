#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sivsim/errors.hpp"
#include "sivsim/siv_models.hpp"

using namespace sivsim;

namespace {

// exp(-h nu / k_B T) from CODATA constants.
double boltzmann_oracle(double nu_ghz, double t_k) {
  constexpr double h = 6.62607015e-34, kb = 1.380649e-23;
  return std::exp(-h * nu_ghz * 1e9 / (kb * t_k));
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

}  // namespace

TEST(Cooperativity, ClosedForm) {
  EXPECT_NEAR(cooperativity(2.1, 57.0, 0.30), 4.0 * 2.1 * 2.1 / (57.0 * 0.30), 1e-12);
  EXPECT_DOUBLE_EQ(cooperativity(0.0, 57.0, 0.3), 0.0);
  EXPECT_NEAR(cooperativity(1.0, 4.0, 1.0), 1.0, 1e-15);
}

TEST(Params, ValidationRejectsOutOfDomain) {
  SivParams s;
  s.branching_ce = 0.0;
  EXPECT_THROW(s.validate(), ParameterError);
  s = {};
  s.temperature = -1.0;
  EXPECT_THROW(s.validate(), ParameterError);
  CavityParams c;
  c.fock_cutoff = 1;
  EXPECT_THROW(c.validate(), ParameterError);
  c = {};
  c.kappa_wg_fraction = 1.5;
  EXPECT_THROW(c.validate(), ParameterError);
  WaveguideParams w;
  w.collection_efficiency = 1.2;
  EXPECT_THROW(w.validate(), ParameterError);
  w = {};
  w.gamma_1d = -0.1;
  EXPECT_THROW(w.validate(), ParameterError);
}

TEST(Thermal, DetailedBalanceByConstruction) {
  const SivParams s;
  const ThermalRates r = thermal_rates(s);
  EXPECT_NEAR(r.up / r.down, boltzmann_oracle(64.0, 4.0), 1e-12);
  EXPECT_NEAR(r.up + r.down, 1.0 / s.tau0, 1e-12);
  EXPECT_NEAR(boltzmann_factor(64.0, 4.0), boltzmann_oracle(64.0, 4.0), 1e-12);
}

TEST(Thermal, SteadyOrbitalPopulationsMatchBoltzmann) {
  const SivParams s;
  CavityParams c;
  DriveParams d;
  d.probe_flux = 0.0;
  const LindbladModel m = build_cavity_model(s, c, d);
  const DensityState ss = steady_state(m);
  const CavityOperators o = cavity_operators(c.fock_cutoff);
  const double b = boltzmann_oracle(64.0, 4.0);
  EXPECT_NEAR(expectation(ss, o.proj_c).real(), 1.0 / (1.0 + b), 1e-9);
  EXPECT_NEAR(expectation(ss, o.proj_u).real(), b / (1.0 + b), 1e-9);
  EXPECT_NEAR(1.0 / (1.0 + b), 0.683, 1e-3);
}

TEST(CavityModel, SpaceAndChannels) {
  const LindbladModel m = build_cavity_model({}, {}, {});
  EXPECT_EQ(m.space(), HilbertSpace({3, 4}));
  for (const char* ch : {"T", "L", "S", "U", "D", "up", "down"}) EXPECT_TRUE(m.has_channel(ch)) << ch;
  EXPECT_TRUE(m.hamiltonian().is_hermitian());
}

TEST(CavityModel, UncoupledTransmissionIsFlat) {
  CavityParams c;
  c.g = 0.0;
  const auto f = linspace(-2.0, 2.0, 9);
  const auto spec = transmission_spectrum({}, c, 0.01, f);
  for (double t : spec.transmission) EXPECT_NEAR(t, 1.0, 1e-9);
}

TEST(CavityModel, TwoLevelReductionMatchesInputOutputOracle) {
  SivParams s;
  s.branching_ce = 1.0;
  s.dephasing = 0.0;
  s.temperature = 0.05;  // |u> thermally empty
  const double c = cooperativity(2.1, 57.0, 0.30);
  EXPECT_NEAR(extinction(s, {}, 0.001), 1.0 - 1.0 / ((1.0 + c) * (1.0 + c)), 0.005);
}

TEST(CavityModel, DetunedCavityLinewidthIsBare) {
  SivParams s;
  s.dephasing = 0.1;
  CavityParams c;
  c.detuning_cavity = 1000.0;
  EXPECT_NEAR(fluorescence_linewidth(s, c, 0.001), s.gamma + s.dephasing, 0.01 * (s.gamma + s.dephasing));
}

TEST(CavityModel, PurcellBroadeningMatchesCoupledModeEigenvalue) {
  // Weak-drive linewidth of the emitter-cavity pair: slow eigenvalue of the
  // linear coupled-mode matrix [[-kappa/2, -i g], [-i g, -gamma/2]].
  SivParams s;
  s.dephasing = 0.0;
  const CavityParams c;
  const double a = (c.kappa + s.gamma) / 4.0, b = (c.kappa - s.gamma) / 4.0;
  const double oracle_on = 2.0 * (a - std::sqrt(b * b - c.g * c.g));
  const double on = fluorescence_linewidth(s, c, 0.0005);
  CavityParams off = c;
  off.detuning_cavity = 1000.0;
  const double bare = fluorescence_linewidth(s, off, 0.0005);
  EXPECT_NEAR(bare, s.gamma, 0.002 * s.gamma);
  EXPECT_NEAR(on, oracle_on, 0.002 * oracle_on);
  EXPECT_NEAR(on, 0.607, 0.006);
}

TEST(Saturation, ExtinctionFallsAndLinewidthGrows) {
  const std::vector<double> flux{0.001, 0.1, 1.0, 10.0};
  const auto sweep = saturation_sweep({}, {}, flux);
  for (std::size_t i = 1; i < flux.size(); ++i) {
    EXPECT_LE(sweep.extinction[i], sweep.extinction[i - 1] + 1e-9);
    EXPECT_GE(sweep.linewidth_ghz[i], sweep.linewidth_ghz[i - 1] - 1e-9);
  }
  EXPECT_LT(sweep.extinction.back(), 0.5 * sweep.extinction.front());
  EXPECT_NEAR(sweep.extinction.front(), extinction({}, {}, 0.001), 1e-9);
}

TEST(Saturation, ResponseIsSmoothNearResonance) {
  // This detuning once produced a spurious steady state from the dense solver.
  DriveParams d;
  d.probe_flux = 1.0;
  std::vector<double> fl;
  for (double f : {-1e-5, -4.3775162281315027e-06, 0.0}) {
    d.probe_freq = f;
    fl.push_back(probe_response({}, {}, d).fluorescence);
  }
  EXPECT_NEAR(fl[1], fl[0], 1e-4);
  EXPECT_NEAR(fl[1], fl[2], 1e-4);
}

TEST(Switch, FitRecoversSyntheticTimeConstant) {
  std::vector<double> t, y;
  for (int i = 0; i <= 240; ++i) {
    t.push_back(0.25 * i);
    y.push_back(0.4 + 0.2 * std::exp(-t.back() / 9.3));
  }
  EXPECT_NEAR(fit_relaxation_time(t, y, 0.4, 2.0), 9.3, 1e-6);
}

TEST(Switch, GridMustExtendPastOpticalTransient) {
  DriveParams d;
  d.gate = GatePulse{};
  const std::vector<double> t{0.0, 0.5, 1.0};
  EXPECT_THROW(switch_dynamics({}, {}, d, t), ParameterError);
}

TEST(FockConvergence, WeakDriveConverges) {
  const auto check = fock_convergence({}, {}, {});
  EXPECT_EQ(check.doubled_cutoff, 2 * check.cutoff);
  EXPECT_TRUE(check.passed) << check.max_relative_change;
}

TEST(FockConvergence, StrongDriveFlagsPhotonStatistics) {
  DriveParams d;
  d.probe_flux = 1.0;
  EXPECT_FALSE(fock_convergence({}, {}, d).passed);  // g2_TT(0) moves by ~3e-5
  CavityParams c;
  c.fock_cutoff = 6;
  EXPECT_TRUE(fock_convergence({}, c, d).passed);
}

TEST(Waveguide, SingleEmitterIsAntibunched) {
  SivParams s;
  s.dephasing = 0.0;
  const LindbladModel m = build_waveguide_model(s, std::nullopt, {});
  EXPECT_EQ(m.space(), HilbertSpace({3}));
  const DensityState ss = steady_state(m);
  const Detector d = waveguide_detector(m);
  EXPECT_LE(g2_zero_direct(ss, d, d), 1e-6);
}

TEST(Waveguide, InterferenceBoundsAcrossIndistinguishability) {
  SivParams s;
  s.dephasing = 0.0;
  double prev = 0.0;
  for (double eta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    WaveguideParams w;
    w.indistinguishability = eta;
    const LindbladModel m = build_waveguide_model(s, s, w);
    const Detector d = waveguide_detector(m);
    const double g = g2_zero_direct(steady_state(m), d, d);
    EXPECT_GE(g, 0.5 - 0.01) << "eta=" << eta;
    EXPECT_LE(g, 1.0 + 0.01) << "eta=" << eta;
    EXPECT_GT(g, prev - 1e-12);
    prev = g;
  }
}

TEST(Waveguide, SeparateChannelsWhenFrequenciesDiffer) {
  WaveguideParams w;
  EXPECT_TRUE(build_waveguide_model({}, SivParams{}, w).has_channel("W"));
  w.delta_rel = 0.2;
  const LindbladModel m = build_waveguide_model({}, SivParams{}, w);
  EXPECT_TRUE(m.has_channel("W1"));
  EXPECT_TRUE(m.has_channel("W2"));
  EXPECT_FALSE(m.has_channel("W"));
  EXPECT_TRUE(m.has_channel("S1"));
  EXPECT_TRUE(m.has_channel("down2"));
}

TEST(Waveguide, EmitterSwapWithConjugatePhaseIsSymmetric) {
  SivParams a;
  a.dephasing = 0.05;
  SivParams b = a;
  b.gamma = 0.35;
  b.tau0 = 8.0;
  WaveguideParams w;
  w.phase_phi = 0.7;
  w.drive2.rabi = 0.15;
  w.drive2.detuning = 2.5;
  WaveguideParams swapped = w;
  swapped.phase_phi = -0.7;
  std::swap(swapped.drive1, swapped.drive2);
  const LindbladModel m1 = build_waveguide_model(a, b, w);
  const LindbladModel m2 = build_waveguide_model(b, a, swapped);
  const DensityState s1 = steady_state(m1), s2 = steady_state(m2);
  const Detector d1 = waveguide_detector(m1), d2 = waveguide_detector(m2);
  EXPECT_NEAR(flux(s1, d1), flux(s2, d2), 1e-12);
  const std::vector<double> tau{0.0, 0.5, 2.0, 5.0};
  const auto g1 = correlate_g2(m1, s1, d1, d1, tau);
  const auto g2 = correlate_g2(m2, s2, d2, d2, tau);
  for (std::size_t i = 0; i < tau.size(); ++i) EXPECT_NEAR(g1.g2[i], g2.g2[i], 1e-8);
}

TEST(Beat, NoOscillationWithoutFrequencyDifference) {
  SivParams s;
  WaveguideParams w;
  const auto tau = linspace(0.0, 5.0, 51);
  const BeatResult r = entangled_state_beat(s, w, tau);
  for (double f : r.fringe) EXPECT_NEAR(f, 1.0, 1e-9);
  EXPECT_THROW(first_beat_zero(r), Error);
}

TEST(Beat, FringeZeroAtHalfPeriod) {
  SivParams s;
  WaveguideParams w;
  w.delta_rel = 0.2;
  const auto tau = linspace(0.0, 6.0, 301);
  const BeatResult r = entangled_state_beat(s, w, tau);
  EXPECT_NEAR(first_beat_zero(r), 1.0 / (2.0 * 0.2), 0.1);
  for (std::size_t i = 0; i < tau.size(); ++i) EXPECT_NEAR(r.g2[i], r.baseline[i] + r.interference[i], 1e-12);
}

TEST(Beat, HalfWidthSigma) {
  const double t = 2.5;
  const double sigma = sigma_delta_for_half_width(t);
  EXPECT_NEAR(std::exp(-2.0 * std::numbers::pi * std::numbers::pi * sigma * sigma * t * t), 0.5, 1e-12);
}

TEST(Raman, SpontaneousAndRamanLines) {
  DriveParams d;
  d.detuning = 3.0;
  d.rabi = 0.1;
  const auto f = linspace(-3.5, 0.5, 801);
  const RamanSpectrum sp = raman_spectrum({}, d, f);
  auto local_peak = [&](double lo, double hi) {
    std::size_t best = 0;
    double pmax = -1.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i] >= lo && f[i] <= hi && sp.power[i] > pmax) {
        pmax = sp.power[i];
        best = i;
      }
    return f[best];
  };
  EXPECT_NEAR(local_peak(-3.3, -2.7), -3.0, 0.01);
  EXPECT_NEAR(local_peak(-0.3, 0.3), 0.0, 0.01);
  const PeakFit p = raman_peak({}, d);
  EXPECT_NEAR(p.center_ghz, -3.0, 0.03);
  EXPECT_GT(p.fwhm_ghz, 0.0);
}
