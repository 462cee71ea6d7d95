#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include <Eigen/LU>

#include "sivsim/dynamics.hpp"
#include "sivsim/errors.hpp"

namespace sivsim {

namespace {

Matrix jump_sum(const Detector& det, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& a : det) out += a.matrix() * rho * a.matrix().adjoint();
  return out;
}

Matrix number_sum(const Detector& det, int dim) {
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& a : det) out += a.matrix().adjoint() * a.matrix();
  return out;
}

double trace_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().cwiseProduct(b)).sum().real();
}

// Conditional detector-b intensity after a detector-a click, at each |tau| in `taus`.
std::vector<double> regress(const SparseMatrix& l, const Matrix& rho, const Detector& first,
                            const Detector& second, double first_flux, double second_flux,
                            std::span<const double> taus, const SolverOptions& opts) {
  const Matrix cond = jump_sum(first, rho) / first_flux;
  const Matrix nb = number_sum(second, static_cast<int>(rho.rows()));
  const auto states = propagate(l, cond, taus, opts);
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(trace_product(nb, s) / second_flux);
  return out;
}

}  // namespace

double flux(const DensityState& state, const Detector& detector) {
  return trace_product(number_sum(detector, state.dim()), state.rho());
}

double g2_zero_direct(const DensityState& steady, const Detector& a, const Detector& b) {
  const double na = flux(steady, a);
  const double nb = flux(steady, b);
  if (!(na > 0.0) || !(nb > 0.0)) throw ZeroFluxError();
  double num = 0.0;
  for (const auto& ai : a)
    for (const auto& bj : b) {
      const Matrix m = ai.matrix().adjoint() * bj.matrix().adjoint() * bj.matrix() * ai.matrix();
      num += trace_product(m, steady.rho());
    }
  return num / (na * nb);
}

CorrelationResult correlate_g2(const LindbladModel& model, const DensityState& steady, const Detector& a,
                               const Detector& b, std::span<const double> tau_grid, const SolverOptions& opts) {
  if (a.empty() || b.empty()) throw ParameterError("correlate_g2: empty detector");
  for (const auto* det : {&a, &b})
    for (const auto& op : *det)
      if (!(op.space() == model.space())) throw DimensionError("correlate_g2: detector operator on wrong space");

  const double na = flux(steady, a);
  const double nb = flux(steady, b);
  const double floor = 1e-300;
  if (!(na > floor) || !(nb > floor)) throw ZeroFluxError();

  std::vector<double> pos{0.0};
  std::vector<double> neg{0.0};
  for (double t : tau_grid) {
    if (t > 0.0) pos.push_back(t);
    if (t < 0.0) neg.push_back(-t);
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  neg.erase(std::unique(neg.begin(), neg.end()), neg.end());

  const SparseMatrix l = liouvillian(model);
  // The two branches are independent initial conditions.
  auto neg_future = std::async(neg.size() > 1 ? std::launch::async : std::launch::deferred,
                               [&] { return regress(l, steady.rho(), b, a, nb, na, neg, opts); });
  const auto pos_vals = regress(l, steady.rho(), a, b, na, nb, pos, opts);
  const auto neg_vals = neg_future.get();

  auto lookup = [](const std::vector<double>& grid, const std::vector<double>& vals, double t) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), t);
    return vals[static_cast<std::size_t>(it - grid.begin())];
  };

  CorrelationResult out;
  out.normalization = na * nb;
  for (double t : tau_grid) {
    out.tau.push_back(t);
    out.g2.push_back(t >= 0.0 ? lookup(pos, pos_vals, t) : lookup(neg, neg_vals, -t));
    out.std_error.push_back(0.0);
  }
  return out;
}

CorrelationResult correlate_g2(const LindbladModel& model, const Operator& a, const Operator& b,
                               std::span<const double> tau_grid, const SolverOptions& opts) {
  const DensityState ss = steady_state(model, opts);
  return correlate_g2(model, ss, Detector{a}, Detector{b}, tau_grid, opts);
}

CorrelationResult correlate_g2(const LindbladModel& model, const std::vector<std::string>& channels_a,
                               const std::vector<std::string>& channels_b, std::span<const double> tau_grid,
                               const SolverOptions& opts) {
  const DensityState ss = steady_state(model, opts);
  return correlate_g2(model, ss, model.collapses(channels_a), model.collapses(channels_b), tau_grid, opts);
}

CorrelationResult CorrelationResult::with_jitter(double sigma_ns) const {
  if (sigma_ns < 0.0) throw ParameterError("jitter width must be non-negative");
  if (sigma_ns == 0.0 || tau.size() < 2) return *this;
  const std::size_t n = tau.size();
  // Trapezoid weights on a possibly non-uniform grid.
  std::vector<double> w(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = 0.5 * (tau[k + 1] - tau[k]);
    w[k] += h;
    w[k + 1] += h;
  }
  CorrelationResult out = *this;
  for (std::size_t i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0, var = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double z = (tau[k] - tau[i]) / sigma_ns;
      if (std::abs(z) > 8.0) continue;
      const double kern = std::exp(-0.5 * z * z) * w[k];
      num += kern * g2[k];
      var += kern * kern * std_error[k] * std_error[k];
      den += kern;
    }
    out.g2[i] = num / den;
    out.std_error[i] = std::sqrt(var) / den;
  }
  return out;
}

SpectrumEvaluator::SpectrumEvaluator(const LindbladModel& model, const DensityState& steady,
                                     const Operator& dipole) {
  if (!(dipole.space() == model.space())) throw DimensionError("dipole lives on a different space");
  const int d = model.dim();
  const Matrix& rho = steady.rho();
  const cplx mean = expectation(steady, dipole);
  const double total = trace_product(dipole.matrix().adjoint() * dipole.matrix(), rho);
  coherent_weight_ = std::norm(mean);
  incoherent_flux_ = total - coherent_weight_;
  if (!(total > 1e-300)) throw ZeroFluxError("dipole");

  liouv_ = liouvillian_dense(model);
  Matrix id = Matrix::Identity(d, d);
  regularizer_ = vec(rho) * vec(id).adjoint();
  source_ = vec(dipole.matrix() * rho - mean * rho);
  observable_ = vec(dipole.matrix());
}

double SpectrumEvaluator::operator()(double nu_ghz, double filter_fwhm_ghz) const {
  const double omega = 2.0 * std::numbers::pi * nu_ghz;
  const double damp = std::numbers::pi * filter_fwhm_ghz;
  Matrix m = -liouv_ + regularizer_;
  m.diagonal().array() += cplx(damp, omega);
  const Vector y = m.partialPivLu().solve(source_);
  return observable_.dot(y).real();
}

Spectrum emission_spectrum(const LindbladModel& model, const Operator& dipole, std::span<const double> freq_grid,
                           double filter_fwhm_ghz, const SolverOptions& opts) {
  if (filter_fwhm_ghz < 0.0) throw ParameterError("filter width must be non-negative");
  const DensityState ss = steady_state(model, opts);
  const SpectrumEvaluator eval(model, ss, dipole);
  Spectrum out;
  out.filter_fwhm_ghz = filter_fwhm_ghz;
  out.coherent_weight = eval.coherent_weight();
  for (double nu : freq_grid) {
    out.freq_ghz.push_back(nu);
    out.power.push_back(eval(nu, filter_fwhm_ghz));
  }
  return out;
}

}  // namespace sivsim
