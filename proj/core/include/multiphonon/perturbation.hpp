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

namespace mph {

enum class RateMethod { ClosedForm, Resolvent };

/// Effective n-phonon coupling rate, in the same units as the inputs.
struct RateResult {
  int n = 0;
  double rate = 0.0;
  RateMethod method = RateMethod::ClosedForm;
  int subspace_dim = 0;  // resolvent only
};

/// Closed-form sideband rate of the strongly driven spin:
/// (-1)^(n-1) lambda^n / (2 ((n-1)!)^2) * (n^2 / (4 Omega))^(n-1).
RateResult mollow_rate(int n, double lambda, double Omega);

/// Same rate from the leading-order resolvent expansion P V (K V)^(n-1) P on
/// the subspace {|+-,m> : 0 <= m <= n}, divided by sqrt(n!). Propagator
/// energies are evaluated on resonance 2 Omega = n Delta_a regardless of the
/// Delta_a argument (which is echoed for context only).
RateResult resolvent_rate(int n, double lambda, double Omega, double Delta_a);

/// Weak-drive sideband rate (Omega / n!) (2 lambda / omega_r)^n.
RateResult ld_rate(int n, double lambda, double Omega, double omega_r);

/// Leading energy-shift scale lambda^2 / (4 Omega) of the dressed levels.
/// Diagnostic only; not folded into the rates.
double mollow_energy_shift_scale(double lambda, double Omega);

}  // namespace mph
