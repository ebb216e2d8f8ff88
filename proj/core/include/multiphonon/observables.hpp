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

#include <string>
#include <vector>

#include "multiphonon/dynamics.hpp"
#include "multiphonon/hilbert.hpp"

namespace mph {

/// Partial trace over the spin factor.
Matrix reduced_phonon_density(const QuantumState& state);

/// P(n) = <n| Tr_spin rho |n>.
Eigen::VectorXd number_populations(const QuantumState& state);

/// <(-1)^n> of the phonon mode.
double phonon_parity(const QuantumState& state);

struct WignerGridSpec {
  double x_min = -5, x_max = 5;
  double p_min = -5, p_max = 5;
  int nx = 101, np = 101;
};

/// Displaced-parity Wigner map, alpha = (x + i p)/sqrt(2), peak 2/pi.
struct WignerGrid {
  Eigen::VectorXd x, p;
  Eigen::MatrixXd values;        // nx x np
  bool truncation_warning = false;  // grid reaches beyond |a|^2 + 6|a| <= N
};

WignerGrid wigner(const QuantumState& state, const WignerGridSpec& spec, int threads = 1);

/// <cat(beta, parity)| rho |cat(beta, parity)>.
double cat_fidelity(const QuantumState& state, Complex beta, CatParity parity);

/// ||H psi|| / ||H||_op, dimensionless.
double dark_state_residual(const Operator& hamiltonian, const QuantumState& psi);

struct CorrelationSeries {
  int n = 0;
  std::vector<double> tau;
  std::vector<double> g;
  double g0 = 0.0;
};

/// Generalized n-phonon zero- and finite-delay correlation
///   g_n(tau) = <a^dag^n(0) a^dag^n(tau) a^n(tau) a^n(0)> / <a^dag^n a^n>_ss^2
/// evaluated on the steady state by quantum regression. Error when
/// <a^dag^n a^n>_ss < 1e-12.
CorrelationSeries g2_generalized(const LindbladModel& model, int n,
                                 const std::vector<double>& taus,
                                 const IntegratorOptions& opt = {},
                                 const SteadyStateOptions& ss_opt = {});

}  // namespace mph
