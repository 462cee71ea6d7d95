#include <cmath>
#include <string>

#include "sivsim/errors.hpp"
#include "sivsim/siv_models.hpp"

namespace sivsim {

namespace {

constexpr double kPlanck = 6.62607015e-34;    // J s
constexpr double kBoltzmann = 1.380649e-23;  // J / K

void require(bool ok, const std::string& what) {
  if (!ok) throw ParameterError(what);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void SivParams::validate() const {
  require(finite_nonneg(gamma), "gamma must be >= 0");
  require(finite_nonneg(orbital_splitting), "orbital_splitting must be >= 0");
  require(std::isfinite(tau0) && tau0 > 0.0, "tau0 must be > 0");
  require(std::isfinite(temperature) && temperature > 0.0, "temperature must be > 0");
  require(branching_ce > 0.0 && branching_ce <= 1.0, "branching_ce must lie in (0, 1]");
  require(finite_nonneg(dephasing), "dephasing must be >= 0");
  require(nonradiative_fraction >= 0.0 && nonradiative_fraction <= 1.0, "nonradiative_fraction must lie in [0, 1]");
}

void CavityParams::validate() const {
  require(finite_nonneg(g), "g must be >= 0");
  require(finite_nonneg(kappa), "kappa must be >= 0");
  require(kappa_wg_fraction >= 0.0 && kappa_wg_fraction <= 1.0, "kappa_wg_fraction must lie in [0, 1]");
  require(std::isfinite(detuning_cavity), "detuning_cavity must be finite");
  require(fock_cutoff >= 2, "fock_cutoff must be >= 2");
}

void DriveParams::validate() const {
  require(std::isfinite(probe_freq), "probe_freq must be finite");
  require(finite_nonneg(probe_flux), "probe_flux must be >= 0");
  require(std::isfinite(detuning), "detuning must be finite");
  require(finite_nonneg(rabi), "rabi must be >= 0");
  if (gate) {
    require(std::isfinite(gate->duration_ns) && gate->duration_ns > 0.0, "gate duration must be > 0");
    require(finite_nonneg(gate->strength), "gate strength must be >= 0");
    require(gate->target == Level::u || gate->target == Level::c, "gate target must be u or c");
  }
}

void WaveguideParams::validate() const {
  require(finite_nonneg(gamma_1d), "gamma_1d must be >= 0");
  require(std::isfinite(phase_phi), "phase_phi must be finite");
  require(std::isfinite(delta_rel), "delta_rel must be finite");
  require(collection_efficiency >= 0.0 && collection_efficiency <= 1.0, "collection_efficiency must lie in [0, 1]");
  require(indistinguishability >= 0.0 && indistinguishability <= 1.0, "indistinguishability must lie in [0, 1]");
  drive1.validate();
  drive2.validate();
}

double cooperativity(double g, double kappa, double gamma) {
  if (!(kappa > 0.0) || !(gamma > 0.0)) throw ParameterError("cooperativity needs kappa > 0 and gamma > 0");
  return 4.0 * g * g / (kappa * gamma);
}

double boltzmann_factor(double nu_ghz, double temperature_k) {
  if (!(temperature_k > 0.0)) throw ParameterError("temperature must be > 0");
  return std::exp(-kPlanck * nu_ghz * 1e9 / (kBoltzmann * temperature_k));
}

ThermalRates thermal_rates(const SivParams& siv) {
  siv.validate();
  const double r = boltzmann_factor(siv.orbital_splitting, siv.temperature);
  const double down = 1.0 / (siv.tau0 * (1.0 + r));
  return {down * r, down};
}

}  // namespace sivsim
