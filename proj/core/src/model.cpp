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

#include "multiphonon/model.hpp"

#include <cmath>

#include "multiphonon/perturbation.hpp"

namespace mph {

namespace {

void require_qubit(const HilbertSpace& space, const char* who) {
  if (space.spin_dim != 2)
    throw std::invalid_argument(std::string(who) + ": requires spin_dim 2, got " +
                                std::to_string(space.spin_dim));
}

Matrix fock_power(const Matrix& a, int n) {
  Matrix out = Matrix::Identity(a.rows(), a.cols());
  for (int k = 0; k < n; ++k) out = (out * a).eval();
  return out;
}

}  // namespace

std::vector<std::string> validity_warnings(const MollowParams& p) {
  std::vector<std::string> w;
  if (p.lambda <= 0.0) w.push_back("lambda should be > 0");
  if (p.Omega != 0.0 && p.Omega < 5.0 * p.lambda)
    w.push_back("strong-driving hierarchy Omega >> lambda is marginal (Omega = " +
                std::to_string(p.Omega / p.lambda) + " lambda)");
  if (p.Omega_x != 0.0 && p.Delta < 5.0 * p.Omega_x)
    w.push_back("large-detuning hierarchy Delta >> Omega_x is marginal (Delta = " +
                std::to_string(p.Delta / p.Omega_x) + " Omega_x)");
  return w;
}

DressedStates dressed_states(double Delta, double Omega_x) {
  if (Delta == 0.0 && Omega_x == 0.0)
    throw std::invalid_argument("dressed_states: Delta and Omega_x both zero");
  DressedStates out;
  out.theta = 0.5 * std::atan2(2.0 * std::sqrt(2.0) * Omega_x, Delta);
  const double root = std::sqrt(Delta * Delta + 8.0 * Omega_x * Omega_x);
  out.omega_d = Delta;
  out.omega_e = 0.5 * (Delta + root);
  out.omega_g = 0.5 * (Delta - root);
  out.omega_bd = out.omega_e - out.omega_d;
  out.omega_bd_approx = (Delta != 0.0) ? 2.0 * Omega_x * Omega_x / Delta : 0.0;
  out.omega_dg = out.omega_d - out.omega_g;
  out.omega_eg = out.omega_e - out.omega_g;

  const double c = std::cos(out.theta), s = std::sin(out.theta);
  const double r = 1.0 / std::sqrt(2.0);
  // basis (|+1>,|0>,|-1>)
  out.b << r, 0.0, r;
  out.d << r, 0.0, -r;
  out.g = Eigen::Vector3cd(0.0, c, 0.0) - s * out.b;
  out.e = Eigen::Vector3cd(0.0, s, 0.0) + c * out.b;
  return out;
}

DriftParams drift_shift(double Delta, double Omega_x, double delta_n) {
  if (Delta <= 0.0) throw std::invalid_argument("drift_shift: Delta must be > 0");

  auto splitting = [&](double dn) {
    // basis (|+1>,|0>,|-1>)
    Eigen::Matrix3d H;
    H << Delta + dn, Omega_x, 0.0,
         Omega_x, 0.0, Omega_x,
         0.0, Omega_x, Delta - dn;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Vector3d b(r, 0.0, r), d(r, 0.0, -r);
    int ib = 0, id = 0;
    double ob = -1.0, od = -1.0;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d v = es.eigenvectors().col(k);
      const double wb = b.dot(v) * b.dot(v);
      const double wd = d.dot(v) * d.dot(v);
      if (wb > ob) { ob = wb; ib = k; }
      if (wd > od) { od = wd; id = k; }
    }
    if (ob < 0.5 || od < 0.5)
      throw std::runtime_error(
          "drift_shift: bright/dark identification ambiguous (overlaps " +
          std::to_string(ob) + ", " + std::to_string(od) + ")");
    return es.eigenvalues()(ib) - es.eigenvalues()(id);
  };

  return {delta_n, splitting(delta_n) - splitting(0.0)};
}

Operator build_driven_jc(const MollowParams& p, const HilbertSpace& space) {
  require_qubit(space, "build_driven_jc");
  Operator a = fock_op(FockOp::Annihilate, space);
  Operator sm = spin_op(SpinOp::SigmaMinus, space);
  Operator H = p.Delta_a * fock_op(FockOp::Number, space) +
               p.lambda * (a * sm.adjoint() + a.adjoint() * sm) +
               p.Omega * (sm + sm.adjoint());
  return H;
}

Operator build_dressed_mollow(const MollowParams& p, const HilbertSpace& space) {
  require_qubit(space, "build_dressed_mollow");
  Operator a = fock_op(FockOp::Annihilate, space);
  Operator sm = spin_op(SpinOp::SigmaMinus, space);
  Operator sz = spin_op(SpinOp::SigmaZ, space);
  Operator coupling = a.adjoint() * (sm - sm.adjoint() + sz);
  return p.Delta_a * fock_op(FockOp::Number, space) + p.Omega * sz +
         (0.5 * p.lambda) * (coupling + coupling.adjoint());
}

Operator build_effective_mollow(int n, const MollowParams& p, const HilbertSpace& space,
                                std::optional<double> rate_override) {
  require_qubit(space, "build_effective_mollow");
  if (n < 1) throw std::invalid_argument("build_effective_mollow: n must be >= 1");
  if (space.fock_cutoff <= 4 * n)
    throw std::invalid_argument("build_effective_mollow: fock_cutoff must exceed 4n = " +
                                std::to_string(4 * n));
  const double rate = rate_override ? *rate_override : mollow_rate(n, p.lambda, p.Omega).rate;
  Operator an = Operator(space, fock_power(fock_op(FockOp::Annihilate, space).matrix(), n));
  Operator sm = spin_op(SpinOp::SigmaMinus, space);
  return p.Delta_a * fock_op(FockOp::Number, space) +
         p.Omega * spin_op(SpinOp::SigmaZ, space) +
         rate * (an * sm.adjoint() + an.adjoint() * sm);
}

Operator build_ld_rotating(const LDParams& p, const HilbertSpace& space) {
  require_qubit(space, "build_ld_rotating");
  Operator a = fock_op(FockOp::Annihilate, space);
  Operator sm = spin_op(SpinOp::SigmaMinus, space);
  Operator sz = spin_op(SpinOp::SigmaZ, space);
  return (-0.5 * p.delta) * sz + p.omega_r * fock_op(FockOp::Number, space) +
         p.lambda * ((a + a.adjoint()) * sz) + p.Omega * (sm + sm.adjoint());
}

Operator build_ld_polaron(const LDParams& p, const HilbertSpace& space) {
  require_qubit(space, "build_ld_polaron");
  const Matrix D = displacement_matrix(Complex(p.eta(), 0.0), space.fock_cutoff);
  Matrix sp = Matrix::Zero(2, 2);
  sp(0, 1) = 1.0;  // |up><dn|
  Operator drive = tensor(sp, D, space);
  Operator H = (-0.5 * p.delta) * spin_op(SpinOp::SigmaZ, space) +
               p.omega_r * fock_op(FockOp::Number, space) +
               p.Omega * (drive + drive.adjoint()) -
               (p.lambda * p.lambda / p.omega_r) * identity(space);
  return H;
}

Operator build_ld_effective(int n, const LDParams& p, const HilbertSpace& space) {
  require_qubit(space, "build_ld_effective");
  if (n < 1) throw std::invalid_argument("build_ld_effective: n must be >= 1");
  if (std::abs(p.eta()) >= 1.0)
    throw std::invalid_argument("build_ld_effective: |eta| = " +
                                std::to_string(std::abs(p.eta())) + " must be < 1");
  const double rate = ld_rate(n, p.lambda, p.Omega, p.omega_r).rate;
  return (-0.5 * p.delta) * spin_op(SpinOp::SigmaZ, space) +
         p.omega_r * fock_op(FockOp::Number, space) +
         build_blue_sideband_interaction(n, rate, space);
}

Operator build_blue_sideband_interaction(int n, double rate, const HilbertSpace& space) {
  require_qubit(space, "build_blue_sideband_interaction");
  if (n < 1)
    throw std::invalid_argument("build_blue_sideband_interaction: n must be >= 1");
  Operator adn =
      Operator(space, fock_power(fock_op(FockOp::Create, space).matrix(), n));
  Operator sm = spin_op(SpinOp::SigmaMinus, space);
  return rate * (adn * sm.adjoint() + adn.adjoint() * sm);
}

Operator build_cat_interaction(double lambda2, double Omega0, const HilbertSpace& space) {
  require_qubit(space, "build_cat_interaction");
  Operator a = fock_op(FockOp::Annihilate, space);
  Operator a2 = a * a;
  Operator sm = spin_op(SpinOp::SigmaMinus, space);
  return lambda2 * (a2 * sm.adjoint() + a2.adjoint() * sm) +
         Omega0 * (sm + sm.adjoint());
}

Matrix displacement_matrix(Complex alpha, int fock_dim) {
  if (fock_dim < 2) throw std::invalid_argument("displacement_matrix: fock_dim < 2");
  // alpha a^dag - conj(alpha) a = -i G with G Hermitian; exponentiate by
  // diagonalizing G.
  Matrix a = Matrix::Zero(fock_dim, fock_dim);
  for (int n = 1; n < fock_dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  Matrix gen = alpha * a.adjoint() - std::conj(alpha) * a;
  Matrix G = Complex(0.0, 1.0) * gen;
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  Vector phase(fock_dim);
  for (int k = 0; k < fock_dim; ++k)
    phase(k) = std::exp(Complex(0.0, -es.eigenvalues()(k)));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace mph
