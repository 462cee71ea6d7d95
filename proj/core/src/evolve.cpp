#include <algorithm>
#include <cmath>

#include "sivsim/dynamics.hpp"
#include "sivsim/errors.hpp"

namespace sivsim {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (error weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct TraceCheck {
  bool enabled = false;
  int dim = 0;
  cplx expected{1.0, 0.0};
  double guard = 1e-6;
};

cplx vec_trace(const Vector& y, int dim) {
  cplx tr = 0.0;
  for (int i = 0; i < dim; ++i) tr += y(i + i * dim);
  return tr;
}

// Integrates y' = L y, emitting y at every grid time. t_grid[0] must be 0.
std::vector<Vector> dopri5(const SparseMatrix& l, Vector y, std::span<const double> t_grid,
                           const SolverOptions& opts, const TraceCheck& check) {
  std::vector<Vector> out;
  out.reserve(t_grid.size());
  if (t_grid.empty()) return out;
  if (t_grid.front() != 0.0) throw ParameterError("time grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw ParameterError("time grid must be strictly increasing");

  out.push_back(y);
  double t = 0.0;
  double h = opts.initial_step;
  Vector k1 = l * y;
  Vector k2, k3, k4, k5, k6, k7, ytmp, ynew, err;

  for (std::size_t gi = 1; gi < t_grid.size(); ++gi) {
    const double target = t_grid[gi];
    while (t < target) {
      bool last = false;
      double step = h;
      if (t + step >= target) {
        step = target - t;
        last = true;
      }
      if (step < 1e-13 * std::max(1.0, std::abs(t)))
        throw IntegrationError("step size underflow", t);

      ytmp = y + step * a21 * k1;
      k2 = l * ytmp;
      ytmp = y + step * (a31 * k1 + a32 * k2);
      k3 = l * ytmp;
      ytmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
      k4 = l * ytmp;
      ytmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      k5 = l * ytmp;
      ytmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      k6 = l * ytmp;
      ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = l * ynew;
      err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double en = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale = opts.atol + opts.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
        en = std::max(en, std::abs(err(i)) / scale);
      }
      if (!std::isfinite(en)) throw IntegrationError("non-finite error estimate", t);

      if (en <= 1.0) {
        t = last ? target : t + step;
        y.swap(ynew);
        k1.swap(k7);
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        // A step clipped to the grid does not shrink the running step size.
        if (!last || fac < 1.0) h = step * fac;
        if (last) h = std::max(h, step);
      } else {
        h = step * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 1.0);
      }
    }
    if (check.enabled) {
      const cplx tr = vec_trace(y, check.dim);
      if (std::abs(tr - check.expected) > check.guard) throw IntegrationError("trace drift beyond guard", t);
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace

std::vector<DensityState> evolve(const LindbladModel& model, const DensityState& rho0,
                                 std::span<const double> t_grid, const SolverOptions& opts) {
  if (!(rho0.space() == model.space())) throw DimensionError("evolve: initial state space differs from model");
  const SparseMatrix l = liouvillian(model);
  TraceCheck check{true, model.dim(), rho0.rho().trace(), opts.trace_guard};
  const auto ys = dopri5(l, vec(rho0.rho()), t_grid, opts, check);
  std::vector<DensityState> out;
  out.reserve(ys.size());
  for (const auto& y : ys) out.emplace_back(model.space(), unvec(y, model.dim()), Validation::kSkip);
  return out;
}

std::vector<Matrix> propagate(const SparseMatrix& liouv, const Matrix& x0, std::span<const double> t_grid,
                              const SolverOptions& opts) {
  const int d = static_cast<int>(x0.rows());
  if (liouv.rows() != d * d) throw DimensionError("propagate: Liouvillian and operator dimensions differ");
  const auto ys = dopri5(liouv, vec(x0), t_grid, opts, TraceCheck{});
  std::vector<Matrix> out;
  out.reserve(ys.size());
  for (const auto& y : ys) out.push_back(unvec(y, d));
  return out;
}

}  // namespace sivsim
