#include "sivsim/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sivsim/errors.hpp"

namespace sivsim {

LindbladModel::LindbladModel(Operator hamiltonian, std::vector<JumpChannel> jumps)
    : hamiltonian_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
  if (!hamiltonian_.is_hermitian(1e-10)) throw ParameterError("Hamiltonian is not Hermitian");
  std::set<std::string> seen;
  for (const auto& j : jumps_) {
    if (!(j.op.space() == space())) throw DimensionError("jump '" + j.label + "' lives on a different space");
    if (!(j.rate >= 0.0) || !std::isfinite(j.rate))
      throw ParameterError("jump '" + j.label + "' has negative or non-finite rate");
    if (!seen.insert(j.label).second) throw ParameterError("duplicate channel label '" + j.label + "'");
  }
}

bool LindbladModel::has_channel(std::string_view label) const {
  return std::any_of(jumps_.begin(), jumps_.end(), [&](const JumpChannel& j) { return j.label == label; });
}

int LindbladModel::channel_index(std::string_view label) const {
  for (std::size_t k = 0; k < jumps_.size(); ++k)
    if (jumps_[k].label == label) return static_cast<int>(k);
  throw ParameterError("unknown channel '" + std::string(label) + "'");
}

const JumpChannel& LindbladModel::channel(std::string_view label) const {
  return jumps_[static_cast<std::size_t>(channel_index(label))];
}

Operator LindbladModel::collapse(std::string_view label) const {
  const auto& j = channel(label);
  return j.op * cplx(std::sqrt(j.rate), 0.0);
}

std::vector<Operator> LindbladModel::collapses(std::span<const std::string> labels) const {
  std::vector<Operator> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(collapse(l));
  return out;
}

Matrix LindbladModel::effective_hamiltonian() const {
  Matrix h = hamiltonian_.matrix();
  for (const auto& j : jumps_) h -= cplx(0.0, 0.5 * j.rate) * (j.op.matrix().adjoint() * j.op.matrix());
  return h;
}

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, int dim) { return Eigen::Map<const Matrix>(v.data(), dim, dim); }

namespace {

using Triplet = Eigen::Triplet<cplx>;

// Appends scale * (A kron B) to the triplet list, skipping zeros.
void add_kron(std::vector<Triplet>& out, const Matrix& a, const Matrix& b, cplx scale) {
  const Eigen::Index nb = b.rows();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx(0.0)) continue;
      for (Eigen::Index k = 0; k < nb; ++k)
        for (Eigen::Index l = 0; l < nb; ++l) {
          const cplx bkl = b(k, l);
          if (bkl == cplx(0.0)) continue;
          out.emplace_back(static_cast<int>(i * nb + k), static_cast<int>(j * nb + l), scale * aij * bkl);
        }
    }
}

}  // namespace

SparseMatrix liouvillian(const LindbladModel& model) {
  const int d = model.dim();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix heff = model.effective_hamiltonian();
  std::vector<Triplet> trip;
  // -i Heff rho + i rho Heff^dag
  add_kron(trip, id, heff, cplx(0.0, -1.0));
  add_kron(trip, heff.conjugate(), id, cplx(0.0, 1.0));
  for (const auto& j : model.jumps()) {
    if (j.rate == 0.0) continue;
    add_kron(trip, j.op.matrix().conjugate(), j.op.matrix(), j.rate);
  }
  SparseMatrix l(d * d, d * d);
  l.setFromTriplets(trip.begin(), trip.end());
  l.prune(cplx(0.0), 0.0);
  l.makeCompressed();
  return l;
}

Matrix liouvillian_dense(const LindbladModel& model) { return Matrix(liouvillian(model)); }

Matrix apply_lindbladian(const LindbladModel& model, const Matrix& rho) {
  const Matrix heff = model.effective_hamiltonian();
  const cplx mi(0.0, -1.0);
  Matrix out = mi * (heff * rho) - mi * (rho * heff.adjoint());
  for (const auto& j : model.jumps()) out += j.rate * (j.op.matrix() * rho * j.op.matrix().adjoint());
  return out;
}

}  // namespace sivsim
