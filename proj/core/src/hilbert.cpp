// Copyright 2026 The multiphonon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "multiphonon/hilbert.hpp"

#include <cmath>
#include <string>

namespace mph {

void HilbertSpace::validate() const {
  if (spin_dim < 1 || spin_dim > 3)
    throw std::invalid_argument("HilbertSpace: spin_dim must be 1, 2 or 3, got " +
                                std::to_string(spin_dim));
  if (fock_cutoff < 2)
    throw std::invalid_argument("HilbertSpace: fock_cutoff must be >= 2, got " +
                                std::to_string(fock_cutoff));
}

Operator::Operator(HilbertSpace space, Matrix matrix)
    : space_(space), matrix_(std::move(matrix)) {
  space_.validate();
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim())
    throw std::invalid_argument("Operator: matrix is " + std::to_string(matrix_.rows()) +
                                "x" + std::to_string(matrix_.cols()) +
                                " but space dimension is " + std::to_string(space_.dim()));
}

double Operator::hermiticity_defect() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

Complex Operator::expectation(const QuantumState& state) const {
  return mph::expectation(*this, state);
}

Operator Operator::operator*(const Operator& rhs) const {
  if (!(space_ == rhs.space_))
    throw std::invalid_argument("Operator product: space mismatch");
  return {space_, matrix_ * rhs.matrix_};
}

Operator Operator::operator+(const Operator& rhs) const {
  if (!(space_ == rhs.space_))
    throw std::invalid_argument("Operator sum: space mismatch");
  return {space_, matrix_ + rhs.matrix_};
}

Operator Operator::operator-(const Operator& rhs) const {
  if (!(space_ == rhs.space_))
    throw std::invalid_argument("Operator difference: space mismatch");
  return {space_, matrix_ - rhs.matrix_};
}

QuantumState QuantumState::pure(HilbertSpace space, Vector psi) {
  space.validate();
  if (psi.size() != space.dim())
    throw std::invalid_argument("QuantumState::pure: vector size mismatch");
  const double norm = psi.norm();
  if (std::abs(norm - 1.0) > 1e-10)
    throw std::invalid_argument("QuantumState::pure: norm is " + std::to_string(norm) +
                                ", expected 1");
  QuantumState s(space);
  s.pure_ = std::move(psi);
  return s;
}

QuantumState QuantumState::density(HilbertSpace space, Matrix rho) {
  space.validate();
  if (rho.rows() != space.dim() || rho.cols() != space.dim())
    throw std::invalid_argument("QuantumState::density: matrix size mismatch");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("QuantumState::density: matrix not Hermitian");
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > 1e-10)
    throw std::invalid_argument("QuantumState::density: trace is " + std::to_string(tr));
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("QuantumState::density: negative eigenvalue " +
                                std::to_string(es.eigenvalues().minCoeff()));
  QuantumState s(space);
  s.rho_ = std::move(rho);
  return s;
}

const Vector& QuantumState::vector() const {
  if (!pure_) throw std::logic_error("QuantumState::vector: state is not pure");
  return *pure_;
}

Matrix QuantumState::density_matrix() const {
  if (pure_) return (*pure_) * pure_->adjoint();
  return rho_;
}

namespace {

Matrix fock_factor(FockOp kind, int N) {
  Matrix m = Matrix::Zero(N, N);
  switch (kind) {
    case FockOp::Annihilate:
      for (int n = 1; n < N; ++n) m(n - 1, n) = std::sqrt(double(n));
      break;
    case FockOp::Create:
      for (int n = 1; n < N; ++n) m(n, n - 1) = std::sqrt(double(n));
      break;
    case FockOp::Number:
      for (int n = 0; n < N; ++n) m(n, n) = double(n);
      break;
    case FockOp::Parity:
      for (int n = 0; n < N; ++n) m(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
      break;
  }
  return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Operator fock_op(FockOp kind, const HilbertSpace& space) {
  space.validate();
  return {space, kron(Matrix::Identity(space.spin_dim, space.spin_dim),
                      fock_factor(kind, space.fock_cutoff))};
}

Operator spin_op(SpinOp kind, const HilbertSpace& space) {
  space.validate();
  const int s = space.spin_dim;
  Matrix m = Matrix::Zero(s, s);
  switch (kind) {
    case SpinOp::Sz:
    case SpinOp::Sx:
      if (s != 3)
        throw std::invalid_argument("spin_op: Sz/Sx require spin_dim 3, got " +
                                    std::to_string(s));
      if (kind == SpinOp::Sz) {
        m(0, 0) = 1.0;
        m(2, 2) = -1.0;
      } else {
        const double r = 1.0 / std::sqrt(2.0);
        m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = r;
      }
      break;
    case SpinOp::SigmaMinus:
    case SpinOp::SigmaZ:
      if (s != 2)
        throw std::invalid_argument("spin_op: sigma ops require spin_dim 2, got " +
                                    std::to_string(s));
      if (kind == SpinOp::SigmaMinus) {
        m(1, 0) = 1.0;  // |dn><up|
      } else {
        m(0, 0) = 1.0;
        m(1, 1) = -1.0;
      }
      break;
  }
  return {space, kron(m, Matrix::Identity(space.fock_cutoff, space.fock_cutoff))};
}

Operator spin_projector(int i, int j, const HilbertSpace& space) {
  space.validate();
  if (i < 0 || i >= space.spin_dim || j < 0 || j >= space.spin_dim)
    throw std::invalid_argument("spin_projector: index out of range");
  Matrix m = Matrix::Zero(space.spin_dim, space.spin_dim);
  m(i, j) = 1.0;
  return {space, kron(m, Matrix::Identity(space.fock_cutoff, space.fock_cutoff))};
}

Operator identity(const HilbertSpace& space) {
  space.validate();
  return {space, Matrix::Identity(space.dim(), space.dim())};
}

Operator tensor(const Matrix& spin_part, const Matrix& fock_part,
                const HilbertSpace& space) {
  space.validate();
  if (spin_part.rows() != space.spin_dim || spin_part.cols() != space.spin_dim)
    throw std::invalid_argument("tensor: spin factor dimension mismatch");
  if (fock_part.rows() != space.fock_cutoff || fock_part.cols() != space.fock_cutoff)
    throw std::invalid_argument("tensor: fock factor dimension mismatch");
  return {space, kron(spin_part, fock_part)};
}

QuantumState basis_state(int spin_index, int n, const HilbertSpace& space) {
  space.validate();
  if (spin_index < 0 || spin_index >= space.spin_dim)
    throw std::invalid_argument("basis_state: spin index out of range");
  if (n < 0 || n >= space.fock_cutoff)
    throw std::invalid_argument("basis_state: phonon number out of range");
  Vector v = Vector::Zero(space.dim());
  v(space.index(spin_index, n)) = 1.0;
  return QuantumState::pure(space, std::move(v));
}

int required_fock_cutoff(Complex beta) {
  const double b2 = std::norm(beta);
  return int(std::ceil(b2 + 6.0 * std::sqrt(b2 + 1.0))) + 1;
}

int default_fock_cutoff(int n_target, double beta_abs) {
  const int from_n = 4 * n_target + 5;
  const int from_beta = beta_abs > 0.0 ? required_fock_cutoff(Complex(beta_abs, 0.0)) : 2;
  return std::max(from_n, from_beta);
}

namespace {

// Coherent amplitudes on the Fock factor, renormalized after truncation.
Vector coherent_amplitudes(Complex beta, int N) {
  Vector c(N);
  c(0) = std::exp(-0.5 * std::norm(beta));
  for (int n = 1; n < N; ++n) c(n) = c(n - 1) * beta / std::sqrt(double(n));
  c /= c.norm();
  return c;
}

Vector embed_fock(const Vector& phonon, const HilbertSpace& space, int spin_index) {
  if (spin_index < 0 || spin_index >= space.spin_dim)
    throw std::invalid_argument("spin index out of range");
  Vector v = Vector::Zero(space.dim());
  v.segment(spin_index * space.fock_cutoff, space.fock_cutoff) = phonon;
  return v;
}

}  // namespace

QuantumState coherent_state(Complex beta, const HilbertSpace& space, int spin_index) {
  space.validate();
  const double b2 = std::norm(beta);
  if (b2 + 6.0 * std::sqrt(b2 + 1.0) >= space.fock_cutoff)
    throw std::invalid_argument(
        "coherent_state: fock_cutoff " + std::to_string(space.fock_cutoff) +
        " too small for |beta|=" + std::to_string(std::abs(beta)) +
        ", need at least " + std::to_string(required_fock_cutoff(beta)));
  return QuantumState::pure(space, embed_fock(coherent_amplitudes(beta, space.fock_cutoff),
                                              space, spin_index));
}

QuantumState cat_state(Complex beta, CatParity parity, const HilbertSpace& space,
                       int spin_index) {
  space.validate();
  const double b2 = std::norm(beta);
  if (b2 + 6.0 * std::sqrt(b2 + 1.0) >= space.fock_cutoff)
    throw std::invalid_argument(
        "cat_state: fock_cutoff " + std::to_string(space.fock_cutoff) +
        " too small for |beta|=" + std::to_string(std::abs(beta)) +
        ", need at least " + std::to_string(required_fock_cutoff(beta)));
  if (parity == CatParity::Odd && beta == Complex(0.0, 0.0))
    throw std::invalid_argument("cat_state: odd cat with beta=0 is the null state");
  const int N = space.fock_cutoff;
  Vector cp = coherent_amplitudes(beta, N);
  Vector cm = coherent_amplitudes(-beta, N);
  Vector v = (parity == CatParity::Even) ? Vector(cp + cm) : Vector(cp - cm);
  v /= v.norm();
  return QuantumState::pure(space, embed_fock(v, space, spin_index));
}

Complex expectation(const Operator& op, const QuantumState& state) {
  if (!(op.space() == state.space()))
    throw std::invalid_argument("expectation: operator and state space mismatch");
  if (state.is_pure()) {
    const Vector& psi = state.vector();
    return psi.dot(op.matrix() * psi);
  }
  return (op.matrix() * state.density_matrix()).trace();
}

}  // namespace mph
