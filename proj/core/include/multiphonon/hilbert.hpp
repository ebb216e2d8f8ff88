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

#pragma once

#include <complex>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

namespace mph {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Truncated spin (x) Fock product space. The spin factor always comes first:
/// basis index = spin_index * fock_cutoff + phonon_number.
struct HilbertSpace {
  int spin_dim = 2;     // 1 (bosonic mode only), 2 (effective qubit), 3 (ground triplet)
  int fock_cutoff = 2;  // Fock states |0..N-1| retained

  int dim() const { return spin_dim * fock_cutoff; }
  void validate() const;
  int index(int spin_index, int phonon_number) const {
    return spin_index * fock_cutoff + phonon_number;
  }
  friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;
};

class QuantumState;

/// A complex matrix acting on a HilbertSpace. Immutable after construction.
class Operator {
 public:
  Operator(HilbertSpace space, Matrix matrix);

  const HilbertSpace& space() const { return space_; }
  const Matrix& matrix() const { return matrix_; }

  Operator adjoint() const { return {space_, matrix_.adjoint()}; }
  /// max |M - M^dag| entrywise.
  double hermiticity_defect() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() < tol; }

  Complex expectation(const QuantumState& state) const;

  Operator operator*(const Operator& rhs) const;
  Operator operator+(const Operator& rhs) const;
  Operator operator-(const Operator& rhs) const;
  friend Operator operator*(Complex c, const Operator& op) {
    return {op.space_, c * op.matrix_};
  }
  friend Operator operator*(double c, const Operator& op) {
    return {op.space_, c * op.matrix_};
  }

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

/// Pure vector or density matrix on a HilbertSpace.
class QuantumState {
 public:
  static QuantumState pure(HilbertSpace space, Vector psi);
  static QuantumState density(HilbertSpace space, Matrix rho);

  const HilbertSpace& space() const { return space_; }
  bool is_pure() const { return pure_.has_value(); }
  const Vector& vector() const;
  /// Density matrix view; materializes |psi><psi| for pure states.
  Matrix density_matrix() const;

 private:
  QuantumState(HilbertSpace space) : space_(space) {}
  HilbertSpace space_;
  std::optional<Vector> pure_;
  Matrix rho_;
};

enum class FockOp { Annihilate, Create, Number, Parity };
enum class SpinOp { Sz, Sx, SigmaMinus, SigmaZ };
enum class CatParity { Even, Odd };

/// Fock-factor operator tensored with identity on the spin factor.
/// create/annihilate use the hard-cutoff convention: a^dag |N-1> = 0.
Operator fock_op(FockOp kind, const HilbertSpace& space);

/// Spin-factor operator tensored with identity on the Fock factor.
/// Sz/Sx need spin_dim 3 (basis |+1>,|0>,|-1>); Sigma* need spin_dim 2
/// (basis |up>=0, |dn>=1, sigma_minus = |dn><up|).
Operator spin_op(SpinOp kind, const HilbertSpace& space);

/// |i><j| on the spin factor, identity on the Fock factor.
Operator spin_projector(int i, int j, const HilbertSpace& space);

Operator identity(const HilbertSpace& space);

/// Kronecker product, spin factor first. Factor dimensions must match the space.
Operator tensor(const Matrix& spin_part, const Matrix& fock_part,
                const HilbertSpace& space);

/// |spin_index> (x) |n>.
QuantumState basis_state(int spin_index, int n, const HilbertSpace& space);

/// Truncated coherent state on the Fock factor (spin factor in |spin_index>),
/// renormalized. Requires |beta|^2 + 6 sqrt(|beta|^2 + 1) < fock_cutoff.
QuantumState coherent_state(Complex beta, const HilbertSpace& space, int spin_index = 0);

/// Normalized |beta> +- |-beta>. Odd cat with beta=0 is the null state (error).
QuantumState cat_state(Complex beta, CatParity parity, const HilbertSpace& space,
                       int spin_index = 0);

/// Smallest cutoff accepted by coherent_state for this amplitude.
int required_fock_cutoff(Complex beta);

/// Default cutoff rule N = max(4 n_target + 5, required_fock_cutoff(beta)).
int default_fock_cutoff(int n_target, double beta_abs = 0.0);

Complex expectation(const Operator& op, const QuantumState& state);

}  // namespace mph
