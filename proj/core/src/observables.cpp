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

#include "multiphonon/observables.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "multiphonon/model.hpp"

namespace mph {

Matrix reduced_phonon_density(const QuantumState& state) {
  const HilbertSpace& sp = state.space();
  const int N = sp.fock_cutoff;
  Matrix rho = state.density_matrix();
  Matrix out = Matrix::Zero(N, N);
  for (int s = 0; s < sp.spin_dim; ++s) out += rho.block(s * N, s * N, N, N);
  return out;
}

Eigen::VectorXd number_populations(const QuantumState& state) {
  return reduced_phonon_density(state).diagonal().real();
}

double phonon_parity(const QuantumState& state) {
  const Matrix rp = reduced_phonon_density(state);
  double out = 0.0;
  for (int n = 0; n < rp.rows(); ++n)
    out += (n % 2 == 0 ? 1.0 : -1.0) * rp(n, n).real();
  return out;
}

WignerGrid wigner(const QuantumState& state, const WignerGridSpec& spec, int threads) {
  if (spec.nx < 1 || spec.np < 1) throw std::invalid_argument("wigner: empty grid");
  const Matrix rho_ph = reduced_phonon_density(state);
  const int N = int(rho_ph.rows());

  WignerGrid out;
  out.x.setLinSpaced(spec.nx, spec.x_min, spec.x_max);
  out.p.setLinSpaced(spec.np, spec.p_min, spec.p_max);
  if (spec.nx == 1) out.x.setConstant(spec.x_min);
  if (spec.np == 1) out.p.setConstant(spec.p_min);
  out.values.resize(spec.nx, spec.np);

  const double corner = std::max(std::hypot(spec.x_min, spec.p_min),
                                 std::hypot(spec.x_max, spec.p_max)) / std::sqrt(2.0);
  out.truncation_warning = corner * corner + 6.0 * corner > double(N);

  // D(alpha) = e^{i phi n} D(|alpha|) e^{-i phi n}; diagonalize i(a^dag - a)
  // once, then each grid point costs two small products.
  Matrix a = Matrix::Zero(N, N);
  for (int n = 1; n < N; ++n) a(n - 1, n) = std::sqrt(double(n));
  Matrix G = Complex(0.0, 1.0) * (a.adjoint() - a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  const Matrix& V = es.eigenvectors();
  const Eigen::VectorXd ev = es.eigenvalues();
  Matrix parity = Matrix::Zero(N, N);
  for (int n = 0; n < N; ++n) parity(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  const Matrix P_tilde = V.adjoint() * parity * V;

  auto row_job = [&](int i) {
    const double x = out.x(i);
    for (int j = 0; j < spec.np; ++j) {
      const Complex alpha = Complex(x, out.p(j)) / std::sqrt(2.0);
      const double r = std::abs(alpha);
      const double phi = std::arg(alpha);
      Vector s(N);
      for (int k = 0; k < N; ++k) s(k) = std::exp(Complex(0.0, -r * ev(k)));
      // B = D(r) parity D(r)^dag in the eigenbasis of the generator
      const Vector sc = s.conjugate();
      Matrix B = V * (s.asDiagonal() * P_tilde * sc.asDiagonal()) * V.adjoint();
      // rotate rho by the phase of alpha instead of B
      Complex acc = 0.0;
      for (int m = 0; m < N; ++m)
        for (int n = 0; n < N; ++n)
          acc += std::exp(Complex(0.0, -phi * double(m - n))) * rho_ph(m, n) * B(n, m);
      out.values(i, j) = (2.0 / M_PI) * acc.real();
    }
  };

  if (threads <= 1 || spec.nx == 1) {
    for (int i = 0; i < spec.nx; ++i) row_job(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int nw = std::min(threads, spec.nx);
    pool.reserve(nw);
    for (int t = 0; t < nw; ++t)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < spec.nx; i = next.fetch_add(1)) row_job(i);
      });
    for (auto& th : pool) th.join();
  }
  return out;
}

double cat_fidelity(const QuantumState& state, Complex beta, CatParity parity) {
  const HilbertSpace& sp = state.space();
  HilbertSpace phonon_only{1, sp.fock_cutoff};
  const Vector cat = cat_state(beta, parity, phonon_only).vector();
  const Matrix rho_ph = reduced_phonon_density(state);
  return std::max(0.0, (cat.adjoint() * rho_ph * cat)(0, 0).real());
}

double dark_state_residual(const Operator& hamiltonian, const QuantumState& psi) {
  if (!psi.is_pure())
    throw std::invalid_argument("dark_state_residual: state must be pure");
  if (!(psi.space() == hamiltonian.space()))
    throw std::invalid_argument("dark_state_residual: space mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian.matrix(), Eigen::EigenvaluesOnly);
  const double hnorm = es.eigenvalues().cwiseAbs().maxCoeff();
  if (hnorm == 0.0) return 0.0;
  return (hamiltonian.matrix() * psi.vector()).norm() / hnorm;
}

CorrelationSeries g2_generalized(const LindbladModel& model, int n,
                                 const std::vector<double>& taus,
                                 const IntegratorOptions& opt,
                                 const SteadyStateOptions& ss_opt) {
  if (n < 1) throw std::invalid_argument("g2_generalized: n must be >= 1");
  if (taus.empty() || taus.front() != 0.0)
    throw std::invalid_argument("g2_generalized: tau grid must start at 0");

  const Matrix rho_ss = steady_state(model, ss_opt).density_matrix();
  Matrix an = fock_op(FockOp::Annihilate, model.space()).matrix();
  Matrix an_pow = Matrix::Identity(an.rows(), an.cols());
  for (int k = 0; k < n; ++k) an_pow = (an_pow * an).eval();
  const Matrix adn_an = an_pow.adjoint() * an_pow;

  const double denom = (adn_an * rho_ss).trace().real();
  if (denom < 1e-12)
    throw std::runtime_error("g2_generalized: <a^dag^n a^n>_ss = " +
                             std::to_string(denom) + " too small, correlation undefined");

  const Matrix B0 = an_pow * rho_ss * an_pow.adjoint();
  const auto Bs = propagate_matrix(model, B0, taus, opt, true);

  CorrelationSeries out;
  out.n = n;
  out.tau = taus;
  out.g.reserve(taus.size());
  for (const auto& B : Bs)
    out.g.push_back((adn_an * B).trace().real() / (denom * denom));
  out.g0 = out.g.front();
  return out;
}

}  // namespace mph
