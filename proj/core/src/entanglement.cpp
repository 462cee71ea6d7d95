#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "sivsim/analysis.hpp"
#include "sivsim/errors.hpp"

namespace sivsim {

namespace {

const HilbertSpace& qubit_pair() {
  static const HilbertSpace space({2, 2});
  return space;
}

void require_qubits(const DensityState& s, const char* who) {
  if (!(s.space() == qubit_pair())) throw DimensionError(std::string(who) + " needs a two-qubit [2,2] state");
}

DensityState normalized(const HilbertSpace& space, Matrix m, const char* who) {
  m = 0.5 * (m + m.adjoint());
  const double tr = m.trace().real();
  if (!(tr > 0.0)) throw InvalidStateError(std::string(who) + ": projected state has zero weight");
  return DensityState(space, m / tr);
}

}  // namespace

DensityState conditional_state_after_click(const DensityState& rho, const Detector& detector) {
  if (detector.empty()) throw ParameterError("empty detector");
  Matrix m = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& j : detector) {
    if (!(j.space() == rho.space())) throw DimensionError("detector operator on a different space");
    m += j.matrix() * rho.rho() * j.matrix().adjoint();
  }
  const double tr = m.trace().real();
  if (!(tr > 1e-300)) throw ZeroFluxError();
  return normalized(rho.space(), std::move(m), "conditional state");
}

DensityState conditional_state_after_click(const LindbladModel& model, const std::string& channel,
                                           const SolverOptions& opts) {
  const DensityState ss = steady_state(model, opts);
  try {
    return conditional_state_after_click(ss, Detector{model.collapse(channel)});
  } catch (const ZeroFluxError&) {
    throw ZeroFluxError(channel);
  }
}

DensityState restrict_to_orbitals(const DensityState& state) {
  if (!(state.space() == HilbertSpace({3, 3})))
    throw DimensionError("restrict_to_orbitals needs a two-emitter [3,3] state");
  Matrix q(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) q(a, b) = state.rho()(3 * (a / 2) + a % 2, 3 * (b / 2) + b % 2);
  return normalized(qubit_pair(), std::move(q), "orbital restriction");
}

DensityState restrict_to_single_excitation(const DensityState& qubits) {
  require_qubits(qubits, "restrict_to_single_excitation");
  Matrix q = Matrix::Zero(4, 4);
  q.block(1, 1, 2, 2) = qubits.rho().block(1, 1, 2, 2);
  return normalized(qubit_pair(), std::move(q), "single-excitation restriction");
}

Vector bell_state(double phi) {
  Vector v = Vector::Zero(4);
  v(1) = std::numbers::sqrt2 / 2.0;
  v(2) = std::polar(std::numbers::sqrt2 / 2.0, phi);
  return v;
}

Vector dark_state(double phi) {
  Vector v = bell_state(phi);
  v(2) = -v(2);
  return v;
}

double fidelity_bell(const DensityState& qubits, double phi) {
  require_qubits(qubits, "fidelity_bell");
  const Vector b = bell_state(phi);
  return std::clamp(b.dot(qubits.rho() * b).real(), 0.0, 1.0);
}

double concurrence(const DensityState& qubits) {
  require_qubits(qubits, "concurrence");
  const Matrix& rho = qubits.rho();
  const Matrix yy = tensor(ops::sigma_y(), ops::sigma_y()).matrix();
  // lambda_i are the singular values of sqrt(rho) sqrt(rho~), rho~ = Y rho* Y.
  // Eigenvalues at rounding level are zeroed first: their square roots would
  // otherwise leak ~1e-8 into the lambdas of pure states.
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = ev(i) > 1e-14 ? std::sqrt(ev(i)) : 0.0;
  const Matrix root = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  const Matrix a = root * yy * root.conjugate() * yy;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
  std::vector<double> lam(sv.data(), sv.data() + sv.size());
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

double fidelity_bound_from_g2(double g2_ind_0, double g2_dist_0) {
  if (!(g2_dist_0 > 0.0)) throw ParameterError("fidelity bound needs a positive distinguishable baseline");
  // <J^dag J> on the conditional state is 2F; the distinguishable baseline
  // corresponds to F = 1/2.
  return g2_ind_0 / (2.0 * g2_dist_0);
}

EntanglementReport entanglement_report(const SivParams& siv, const WaveguideParams& wg, const SolverOptions& opts) {
  WaveguideParams ind = wg;
  ind.delta_rel = 0.0;
  WaveguideParams dist = ind;
  dist.indistinguishability = 0.0;

  const LindbladModel m_ind = build_waveguide_model(siv, siv, ind);
  const LindbladModel m_dist = build_waveguide_model(siv, siv, dist);
  const DensityState ss_ind = steady_state(m_ind, opts);
  const DensityState ss_dist = steady_state(m_dist, opts);
  const Detector det_ind = waveguide_detector(m_ind);
  const Detector det_dist = waveguide_detector(m_dist);

  const DensityState cond = conditional_state_after_click(ss_ind, det_ind);
  const DensityState qubits = restrict_to_orbitals(cond);
  EntanglementReport r{.conditional_state = qubits};
  r.fidelity_orbital = fidelity_bell(qubits, wg.phase_phi);
  r.fidelity = fidelity_bell(restrict_to_single_excitation(qubits), wg.phase_phi);
  r.concurrence = concurrence(qubits);
  r.g2_ind_0 = g2_zero_direct(ss_ind, det_ind, det_ind);
  r.g2_dist_0 = g2_zero_direct(ss_dist, det_dist, det_dist);
  r.fidelity_lower_bound = fidelity_bound_from_g2(r.g2_ind_0, r.g2_dist_0);
  r.herald_rate_per_s = wg.collection_efficiency * flux(ss_ind, det_ind) * 1e9;
  return r;
}

}  // namespace sivsim
