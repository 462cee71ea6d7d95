#pragma once

// Dense operator algebra on small composite Hilbert spaces.
//
// Basis ordering is row-major over subsystems: the leftmost factor is the
// most significant digit, index = i0*d1*d2*... + i1*d2*... + ...

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sivsim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<int> dims);

  std::span<const int> dims() const noexcept { return dims_; }
  int dim(int subsystem) const;
  int num_subsystems() const noexcept { return static_cast<int>(dims_.size()); }
  int total_dim() const noexcept { return total_; }

  /// Flat basis index of a product basis state.
  int index(std::span<const int> digits) const;
  /// Per-subsystem digits of a flat basis index.
  std::vector<int> digits(int index) const;

  HilbertSpace concat(const HilbertSpace& other) const;

  friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

 private:
  std::vector<int> dims_;
  int total_ = 1;
};

class Operator {
 public:
  Operator(HilbertSpace space, Matrix matrix);

  static Operator identity(const HilbertSpace& space);
  static Operator zero(const HilbertSpace& space);

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  int dim() const noexcept { return space_.total_dim(); }

  Operator dagger() const;
  bool is_hermitian(double tol = 1e-10) const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(cplx scale);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, cplx scale) { return lhs *= scale; }
  friend Operator operator*(cplx scale, Operator rhs) { return rhs *= scale; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

/// Kronecker product; the result space concatenates a's and b's dims.
Operator tensor(const Operator& a, const Operator& b);

/// Places `op` on factor `target` of `space`, identity elsewhere.
Operator embed(const Operator& op, int target, const HilbertSpace& space);

enum class Validation { kCheck, kSkip };

/// Density matrix with trace, Hermiticity and positivity invariants.
/// Validation is on by default; hot loops construct with Validation::kSkip.
class DensityState {
 public:
  DensityState(HilbertSpace space, Matrix rho, Validation validation = Validation::kCheck);

  static DensityState pure(const HilbertSpace& space, const Vector& psi);
  static DensityState basis(const HilbertSpace& space, int index);
  static DensityState maximally_mixed(const HilbertSpace& space);

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& rho() const noexcept { return rho_; }
  int dim() const noexcept { return space_.total_dim(); }

  /// Throws InvalidStateError naming the first violated invariant.
  void validate(double trace_tol = 1e-9, double herm_tol = 1e-10, double eig_tol = 1e-8) const;

  double min_eigenvalue() const;

 private:
  HilbertSpace space_;
  Matrix rho_;
};

/// Reduces to the factors listed in `keep` (in ascending order of index).
DensityState partial_trace(const DensityState& state, std::span<const int> keep);

/// Tr(rho * op).
cplx expectation(const DensityState& state, const Operator& op);

namespace ops {

/// |row><col| on a single d-level factor.
Operator transition(int dim, int row, int col);
Operator projector(int dim, int level);
Operator identity(int dim);
/// Truncated bosonic annihilation operator on Fock states 0..cutoff-1.
Operator destroy(int cutoff);
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();

}  // namespace ops

}  // namespace sivsim
