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

#include "multiphonon/perturbation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mph {

RateResult mollow_rate(int n, double lambda, double Omega) {
  if (n < 1) throw std::invalid_argument("mollow_rate: n must be >= 1");
  if (Omega <= 0.0) throw std::invalid_argument("mollow_rate: Omega must be > 0");
  double fact = 1.0;
  for (int k = 2; k < n; ++k) fact *= k;  // (n-1)!
  const double sign = (n % 2 == 1) ? 1.0 : -1.0;
  const double rate = sign * std::pow(lambda, n) / (2.0 * fact * fact) *
                      std::pow(n * n / (4.0 * Omega), n - 1);
  return {n, rate, RateMethod::ClosedForm, 0};
}

RateResult resolvent_rate(int n, double lambda, double Omega, double /*Delta_a*/) {
  if (n < 1) throw std::invalid_argument("resolvent_rate: n must be >= 1");
  if (Omega <= 0.0) throw std::invalid_argument("resolvent_rate: Omega must be > 0");

  // Subspace basis |s,m>, s in {+,-} = {0,1}, m in 0..n; index = s*(n+1)+m.
  const int levels = n + 1;
  const int dim = 2 * levels;
  auto idx = [levels](int s, int m) { return s * levels + m; };

  // Perturbation V = (lambda/2)[a^dag(sm - sp + sz) + h.c.] restricted to the
  // subspace. Assembled from its raising action; the lowering part is V^T.
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(dim, dim);
  for (int m = 0; m + 1 <= n; ++m) {
    const double amp = 0.5 * lambda * std::sqrt(double(m + 1));
    V(idx(1, m + 1), idx(0, m)) += amp;   // a^dag sm : |+,m> -> |-,m+1>
    V(idx(0, m + 1), idx(1, m)) -= amp;   // -a^dag sp: |-,m> -> |+,m+1>
    V(idx(0, m + 1), idx(0, m)) += amp;   // a^dag sz on |+>
    V(idx(1, m + 1), idx(1, m)) -= amp;   // a^dag sz on |->
  }
  V = (V + V.transpose()).eval();

  // Unperturbed dressed energies at the resonance 2 Omega = n Delta_a.
  const double Da = 2.0 * Omega / n;
  const int i0 = idx(0, 0);  // |+,0>
  const int i1 = idx(1, n);  // |-,n>
  Eigen::VectorXd E(dim);
  for (int s = 0; s < 2; ++s)
    for (int m = 0; m <= n; ++m)
      E(idx(s, m)) = m * Da + (s == 0 ? Omega : -Omega);

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
  for (int q = 0; q < dim; ++q) {
    if (q == i0 || q == i1) continue;
    const double d = E(i0) - E(q);
    if (std::abs(d) < 1e-12 * std::max(1.0, Omega))
      throw std::runtime_error(
          "resolvent_rate: vanishing energy denominator at intermediate state |" +
          std::string(q / levels == 0 ? "+" : "-") + "," +
          std::to_string(q % levels) + ">");
    K(q, q) = 1.0 / d;
  }

  Eigen::MatrixXd M = V;
  for (int k = 1; k < n; ++k) M = (V * K * M).eval();

  double root_fact = 1.0;
  for (int k = 2; k <= n; ++k) root_fact *= k;
  root_fact = std::sqrt(root_fact);

  return {n, M(i0, i1) / root_fact, RateMethod::Resolvent, dim};
}

RateResult ld_rate(int n, double lambda, double Omega, double omega_r) {
  if (n < 1) throw std::invalid_argument("ld_rate: n must be >= 1");
  const double eta = 2.0 * lambda / omega_r;
  if (!(eta < 1.0) || eta <= 0.0)
    throw std::invalid_argument("ld_rate: requires 0 < 2 lambda / omega_r < 1, got " +
                                std::to_string(eta));
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  return {n, Omega / fact * std::pow(eta, n), RateMethod::ClosedForm, 0};
}

double mollow_energy_shift_scale(double lambda, double Omega) {
  if (Omega <= 0.0)
    throw std::invalid_argument("mollow_energy_shift_scale: Omega must be > 0");
  return lambda * lambda / (4.0 * Omega);
}

}  // namespace mph
