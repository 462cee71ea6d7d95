#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Sparse>

#include "sivsim/hilbert.hpp"

namespace sivsim {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// One dissipation channel: collapse operator sqrt(rate) * op.
struct JumpChannel {
  Operator op;
  double rate;  // 1/ns
  std::string label;
};

/// Hamiltonian (rad/ns) plus labelled jump channels.
class LindbladModel {
 public:
  LindbladModel(Operator hamiltonian, std::vector<JumpChannel> jumps);

  const HilbertSpace& space() const noexcept { return hamiltonian_.space(); }
  int dim() const noexcept { return hamiltonian_.dim(); }
  const Operator& hamiltonian() const noexcept { return hamiltonian_; }
  std::span<const JumpChannel> jumps() const noexcept { return jumps_; }

  bool has_channel(std::string_view label) const;
  int channel_index(std::string_view label) const;
  const JumpChannel& channel(std::string_view label) const;
  /// sqrt(rate) * op for a labelled channel.
  Operator collapse(std::string_view label) const;
  std::vector<Operator> collapses(std::span<const std::string> labels) const;

  /// H - (i/2) sum_k rate_k L_k^dag L_k.
  Matrix effective_hamiltonian() const;

 private:
  Operator hamiltonian_;
  std::vector<JumpChannel> jumps_;
};

/// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int dim);

SparseMatrix liouvillian(const LindbladModel& model);
Matrix liouvillian_dense(const LindbladModel& model);

/// Applies the Lindblad generator directly to a matrix.
Matrix apply_lindbladian(const LindbladModel& model, const Matrix& rho);

}  // namespace sivsim
