#include <algorithm>
#include <string>

#include <Eigen/QR>
#include <Eigen/SparseLU>

#include "sivsim/dynamics.hpp"
#include "sivsim/errors.hpp"

namespace sivsim {

namespace {

constexpr double kResidualTol = 1e-10;

DensityState finish(const LindbladModel& model, const Vector& x) {
  const int d = model.dim();
  Matrix rho = unvec(x, d);
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace();
  return DensityState(model.space(), std::move(rho), Validation::kSkip);
}

DensityState solve_dense(const LindbladModel& model, const SparseMatrix& l, const SolverOptions& opts) {
  const int d = model.dim();
  const int n = d * d;
  // Augmented system [L; tr] x = [0; 1].
  Matrix aug = Matrix::Zero(n + 1, n);
  aug.topRows(n) = Matrix(l);
  for (int i = 0; i < d; ++i) aug(n, i + i * d) = 1.0;

  // Rank-revealing QR: BDCSVD in Eigen 3.4 occasionally returns inaccurate
  // factorizations of these non-normal systems.
  Eigen::ColPivHouseholderQR<Matrix> qr(aug);
  qr.setThreshold(opts.kernel_tol);
  const auto nullity = static_cast<int>(n - qr.rank());
  if (nullity > 0)
    throw SteadyStateError("Liouvillian kernel is degenerate: dimension " + std::to_string(nullity + 1),
                           nullity + 1);

  Vector rhs = Vector::Zero(n + 1);
  rhs(n) = 1.0;
  return finish(model, qr.solve(rhs));
}

DensityState solve_sparse(const LindbladModel& model, const SparseMatrix& l) {
  const int d = model.dim();
  const int n = d * d;
  // Replace row 0 (the <0|.|0> equation, redundant given trace conservation)
  // with the trace functional.
  SparseMatrix m = l;
  m.prune([](Eigen::Index row, Eigen::Index, const cplx&) { return row != 0; });
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(m.nonZeros() + d));
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < d; ++i) trip.emplace_back(0, i + i * d, 1.0);
  SparseMatrix a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  a.makeCompressed();

  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw SteadyStateError("Liouvillian kernel is degenerate: dimension >= 2 (sparse factorization singular)", 2);
  Vector rhs = Vector::Zero(n);
  rhs(0) = 1.0;
  Vector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw SteadyStateError("Liouvillian kernel is degenerate: dimension >= 2 (sparse solve failed)", 2);
  return finish(model, x);
}

}  // namespace

DensityState steady_state(const LindbladModel& model, const SolverOptions& opts) {
  const SparseMatrix l = liouvillian(model);
  const int n = model.dim() * model.dim();
  DensityState rho = n <= opts.dense_limit ? solve_dense(model, l, opts) : solve_sparse(model, l);
  // Post-condition: the returned state is stationary.
  const double residual = (l * vec(rho.rho())).cwiseAbs().maxCoeff();
  if (!(residual <= kResidualTol))
    throw SteadyStateError("steady-state residual " + std::to_string(residual) + " exceeds tolerance", 0);
  return rho;
}

}  // namespace sivsim
