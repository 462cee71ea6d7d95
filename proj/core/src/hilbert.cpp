#include "sivsim/hilbert.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Eigenvalues>

#include "sivsim/errors.hpp"

namespace sivsim {

HilbertSpace::HilbertSpace(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DimensionError("HilbertSpace needs at least one subsystem");
  for (int d : dims_) {
    if (d < 2) throw DimensionError("subsystem dimension must be >= 2, got " + std::to_string(d));
    total_ *= d;
  }
}

int HilbertSpace::dim(int subsystem) const {
  if (subsystem < 0 || subsystem >= num_subsystems())
    throw DimensionError("subsystem index " + std::to_string(subsystem) + " out of range");
  return dims_[static_cast<std::size_t>(subsystem)];
}

int HilbertSpace::index(std::span<const int> digits) const {
  if (digits.size() != dims_.size()) throw DimensionError("digit count does not match subsystem count");
  int idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= dims_[k]) throw DimensionError("basis digit out of range");
    idx = idx * dims_[k] + digits[k];
  }
  return idx;
}

std::vector<int> HilbertSpace::digits(int index) const {
  if (index < 0 || index >= total_) throw DimensionError("basis index out of range");
  std::vector<int> out(dims_.size());
  for (std::size_t k = dims_.size(); k-- > 0;) {
    out[k] = index % dims_[k];
    index /= dims_[k];
  }
  return out;
}

HilbertSpace HilbertSpace::concat(const HilbertSpace& other) const {
  std::vector<int> d = dims_;
  d.insert(d.end(), other.dims_.begin(), other.dims_.end());
  return HilbertSpace(std::move(d));
}

Operator::Operator(HilbertSpace space, Matrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
  const int n = space_.total_dim();
  if (matrix_.rows() != n || matrix_.cols() != n)
    throw DimensionError("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                         std::to_string(matrix_.cols()) + " but space dimension is " + std::to_string(n));
}

Operator Operator::identity(const HilbertSpace& space) {
  return Operator(space, Matrix::Identity(space.total_dim(), space.total_dim()));
}

Operator Operator::zero(const HilbertSpace& space) {
  return Operator(space, Matrix::Zero(space.total_dim(), space.total_dim()));
}

Operator Operator::dagger() const { return Operator(space_, matrix_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator& Operator::operator+=(const Operator& rhs) {
  if (!(space_ == rhs.space_)) throw DimensionError("operator sum across different spaces");
  matrix_ += rhs.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  if (!(space_ == rhs.space_)) throw DimensionError("operator difference across different spaces");
  matrix_ -= rhs.matrix_;
  return *this;
}

Operator& Operator::operator*=(cplx scale) {
  matrix_ *= scale;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  if (!(lhs.space() == rhs.space())) throw DimensionError("operator product across different spaces");
  return Operator(lhs.space(), lhs.matrix() * rhs.matrix());
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Operator tensor(const Operator& a, const Operator& b) {
  return Operator(a.space().concat(b.space()), kron(a.matrix(), b.matrix()));
}

Operator embed(const Operator& op, int target, const HilbertSpace& space) {
  if (target < 0 || target >= space.num_subsystems())
    throw DimensionError("embed target " + std::to_string(target) + " out of range");
  if (op.dim() != space.dim(target))
    throw DimensionError("embed: operator dimension " + std::to_string(op.dim()) +
                         " does not match factor " + std::to_string(target) + " of dimension " +
                         std::to_string(space.dim(target)));
  int left = 1;
  int right = 1;
  for (int k = 0; k < target; ++k) left *= space.dim(k);
  for (int k = target + 1; k < space.num_subsystems(); ++k) right *= space.dim(k);
  Matrix m = kron(kron(Matrix::Identity(left, left), op.matrix()), Matrix::Identity(right, right));
  return Operator(space, std::move(m));
}

DensityState::DensityState(HilbertSpace space, Matrix rho, Validation validation)
    : space_(std::move(space)), rho_(std::move(rho)) {
  const int n = space_.total_dim();
  if (rho_.rows() != n || rho_.cols() != n) throw DimensionError("density matrix shape does not match space");
  if (validation == Validation::kCheck) validate();
}

DensityState DensityState::pure(const HilbertSpace& space, const Vector& psi) {
  if (psi.size() != space.total_dim()) throw DimensionError("state vector length does not match space");
  const double norm = psi.norm();
  if (norm == 0.0) throw InvalidStateError("zero state vector");
  Vector v = psi / norm;
  return DensityState(space, v * v.adjoint());
}

DensityState DensityState::basis(const HilbertSpace& space, int index) {
  Vector psi = Vector::Zero(space.total_dim());
  psi(index) = 1.0;
  return pure(space, psi);
}

DensityState DensityState::maximally_mixed(const HilbertSpace& space) {
  const int n = space.total_dim();
  return DensityState(space, Matrix::Identity(n, n) / static_cast<double>(n));
}

double DensityState::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_ + rho_.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityState::validate(double trace_tol, double herm_tol, double eig_tol) const {
  const cplx tr = rho_.trace();
  if (std::abs(tr - 1.0) > trace_tol)
    throw InvalidStateError("trace(rho) = " + std::to_string(tr.real()) + " deviates from 1");
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol) throw InvalidStateError("rho is not Hermitian (max deviation " + std::to_string(herm) + ")");
  const double lmin = min_eigenvalue();
  if (lmin < -eig_tol) throw InvalidStateError("rho has negative eigenvalue " + std::to_string(lmin));
}

DensityState partial_trace(const DensityState& state, std::span<const int> keep) {
  const HilbertSpace& space = state.space();
  if (keep.empty()) throw DimensionError("partial_trace: keep set is empty");
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
    throw DimensionError("partial_trace: duplicate subsystem index");
  for (int k : kept)
    if (k < 0 || k >= space.num_subsystems()) throw DimensionError("partial_trace: subsystem index out of range");

  std::vector<int> kept_dims;
  std::vector<bool> is_kept(static_cast<std::size_t>(space.num_subsystems()), false);
  for (int k : kept) {
    kept_dims.push_back(space.dim(k));
    is_kept[static_cast<std::size_t>(k)] = true;
  }
  HilbertSpace reduced(kept_dims);
  Matrix out = Matrix::Zero(reduced.total_dim(), reduced.total_dim());

  const int n = space.total_dim();
  std::vector<std::vector<int>> dig(static_cast<std::size_t>(n));
  std::vector<int> red_index(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    dig[static_cast<std::size_t>(i)] = space.digits(i);
    std::vector<int> rd;
    for (int k : kept) rd.push_back(dig[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
    red_index[static_cast<std::size_t>(i)] = reduced.index(rd);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      bool traced_match = true;
      for (int k = 0; k < space.num_subsystems() && traced_match; ++k)
        if (!is_kept[static_cast<std::size_t>(k)] &&
            dig[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] !=
                dig[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)])
          traced_match = false;
      if (traced_match)
        out(red_index[static_cast<std::size_t>(i)], red_index[static_cast<std::size_t>(j)]) += state.rho()(i, j);
    }
  }
  return DensityState(reduced, std::move(out), Validation::kSkip);
}

cplx expectation(const DensityState& state, const Operator& op) {
  if (!(state.space() == op.space())) throw DimensionError("expectation: state and operator spaces differ");
  // Tr(rho A) = sum_ij rho_ij A_ji
  return (state.rho().transpose().cwiseProduct(op.matrix())).sum();
}

namespace ops {

Operator transition(int dim, int row, int col) {
  Matrix m = Matrix::Zero(dim, dim);
  m(row, col) = 1.0;
  return Operator(HilbertSpace({dim}), std::move(m));
}

Operator projector(int dim, int level) { return transition(dim, level, level); }

Operator identity(int dim) { return Operator::identity(HilbertSpace({dim})); }

Operator destroy(int cutoff) {
  Matrix m = Matrix::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Operator(HilbertSpace({cutoff}), std::move(m));
}

Operator sigma_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return Operator(HilbertSpace({2}), std::move(m));
}

Operator sigma_y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return Operator(HilbertSpace({2}), std::move(m));
}

Operator sigma_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return Operator(HilbertSpace({2}), std::move(m));
}

}  // namespace ops

}  // namespace sivsim
