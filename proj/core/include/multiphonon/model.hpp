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

#include <optional>
#include <string>
#include <vector>

#include "multiphonon/hilbert.hpp"

namespace mph {

// All rates are angular frequencies in a single unit system (scenarios use
// units of the bare coupling lambda; SI conversion lives in device.hpp).

/// Parameters of the strongly driven (z-drive) chain.
struct MollowParams {
  double lambda = 1.0;   // spin-phonon coupling
  double Omega = 0.0;    // z-drive amplitude
  double Delta_a = 0.0;  // omega_r - omega_L
  double Omega_x = 0.0;  // x-drive (dressing) amplitude
  double Delta = 0.0;    // dressing detuning
  double omega_r = 0.0;  // resonator frequency
  double D = 0.0;        // zero-field splitting
  double delta_B = 0.0;  // static Zeeman splitting
};

/// Perturbative-validity advisories (empty when the hierarchy holds).
std::vector<std::string> validity_warnings(const MollowParams& p);

/// Parameters of the weak-drive (sideband-resolved) chain.
struct LDParams {
  double lambda = 0.0;
  double Omega = 0.0;
  double delta = 0.0;    // qubit-drive detuning (blue sideband: delta ~ +n omega_r)
  double omega_r = 1.0;
  double eta() const { return 2.0 * lambda / omega_r; }
};

/// Dressed states of the doubly x-driven spin-1, basis (|+1>,|0>,|-1>).
struct DressedStates {
  double theta = 0.0;        // tan(2 theta) = 2 sqrt(2) Omega_x / Delta
  double omega_d = 0.0, omega_e = 0.0, omega_g = 0.0;
  double omega_bd = 0.0;     // exact bright-dark splitting, omega_e - omega_d
  double omega_bd_approx = 0.0;  // large-detuning value 2 Omega_x^2 / Delta
  double omega_dg = 0.0, omega_eg = 0.0;
  Eigen::Vector3cd g, d, e, b;
};

DressedStates dressed_states(double Delta, double Omega_x);

/// Static-drift result: shift of the bright-dark splitting.
struct DriftParams {
  double delta_n = 0.0;
  double delta_omega_bd = 0.0;
};

/// Diagonalizes the 3x3 dressed-spin Hamiltonian with drift delta_n added to
/// the Zeeman term and returns omega_bd(delta_n) - omega_bd(0). The bright-
/// and dark-like eigenstates are identified by overlap (> 0.5 required).
DriftParams drift_shift(double Delta, double Omega_x, double delta_n);

/// H = Delta_a a^dag a + lambda (a sp + a^dag sm) + Omega (sm + sp).
Operator build_driven_jc(const MollowParams& p, const HilbertSpace& space);

/// Same model in the dressed |+-> basis:
/// H = Delta_a a^dag a + Omega sz + (lambda/2)[a^dag(sm - sp + sz) + h.c.].
Operator build_dressed_mollow(const MollowParams& p, const HilbertSpace& space);

/// n-phonon effective model H = Delta_a a^dag a + Omega sz
/// + rate (a^n sp + a^dag^n sm), rate from mollow_rate unless overridden.
/// Requires fock_cutoff > 4 n.
Operator build_effective_mollow(int n, const MollowParams& p, const HilbertSpace& space,
                                std::optional<double> rate_override = std::nullopt);

/// H = (-delta/2) sz + omega_r a^dag a + lambda (a + a^dag) sz + Omega (sm + sp).
Operator build_ld_rotating(const LDParams& p, const HilbertSpace& space);

/// Polaron image of build_ld_rotating:
/// H = (-delta/2) sz + omega_r a^dag a + Omega [e^{eta(a^dag - a)} sp + h.c.]
///     - (lambda^2/omega_r) I.
/// The scalar term completes the exact similarity transform so the two
/// builders are isospectral up to truncation.
Operator build_ld_polaron(const LDParams& p, const HilbertSpace& space);

/// Weak-drive n-phonon model (blue sideband):
/// H = (-delta/2) sz + omega_r a^dag a + (Omega/n!) eta^n (a^dag^n sp + a^n sm).
/// Requires |eta| < 1. Red sideband: negate delta and swap sm <-> sp.
Operator build_ld_effective(int n, const LDParams& p, const HilbertSpace& space);

/// Resonant interaction picture of the blue n-phonon sideband:
/// H = rate (a^dag^n sp + a^n sm).
Operator build_blue_sideband_interaction(int n, double rate, const HilbertSpace& space);

/// Two-phonon exchange plus sideband pumping:
/// H = lambda2 (a^2 sp + a^dag^2 sm) + Omega0 (sp + sm).
Operator build_cat_interaction(double lambda2, double Omega0, const HilbertSpace& space);

/// Displacement exponential exp(alpha a^dag - conj(alpha) a) on a Fock factor,
/// computed by unitary diagonalization of the truncated generator (exact up to
/// truncation).
Matrix displacement_matrix(Complex alpha, int fock_dim);

}  // namespace mph
