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

// CODATA 2018 values, pinned for reproducibility.
namespace constants {
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double k_B = 1.380649e-23;         // J/K
inline constexpr double mu_B = 9.2740100783e-24;    // J/T
}  // namespace constants

/// Cantilever-plus-spin device in SI units.
struct DeviceParams {
  double l = 0, w = 0, t = 0;  // cantilever dimensions (m)
  double E = 0;                // Young's modulus (Pa)
  double varrho = 0;           // mass density (kg/m^3)
  double G_m = 0;              // magnetic gradient (T/m)
  double h = 0;                // tip-spin distance (m)
  double T = 0;                // temperature (K)
  double g_s = 2.0;            // Lande factor

  void validate() const;
};

/// Fundamental bending-mode frequency 3.516 (t/l^2) sqrt(E / 12 varrho), rad/s.
double fundamental_frequency(const DeviceParams& d);

/// Effective mass varrho l w t / 4, kg.
double effective_mass(const DeviceParams& d);

/// Zero-point amplitude sqrt(hbar / (2 m_eff omega_r)), m.
double zero_point_amplitude(const DeviceParams& d);

/// Magnetic spin-phonon coupling g_s mu_B G_m a_0 / hbar, rad/s.
double magnetic_coupling(const DeviceParams& d);

/// Bose factor 1 / (exp(hbar omega_r / k_B T) - 1); 0 at T = 0.
double thermal_occupation(double omega_r, double T);

struct FeasibilityReport {
  double omega_r = 0;   // rad/s
  double m_eff = 0;     // kg
  double a0 = 0;        // m
  double lambda = 0;    // rad/s
  double n_th = 0;
};

FeasibilityReport feasibility(const DeviceParams& d);

/// Two-way conversion between SI angular frequencies and rates expressed in
/// units of the device coupling lambda.
struct UnitSystem {
  double lambda_si = 0;  // rad/s
  double to_lambda_units(double rate_si) const { return rate_si / lambda_si; }
  double to_si(double rate_lambda) const { return rate_lambda * lambda_si; }
};

UnitSystem unit_system(const DeviceParams& d);

}  // namespace mph
