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

#include "multiphonon/device.hpp"

#include <cmath>
#include <stdexcept>

namespace mph {

void DeviceParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0))
      throw std::invalid_argument(std::string("DeviceParams: ") + name + " must be > 0");
  };
  positive(l, "l");
  positive(w, "w");
  positive(t, "t");
  positive(E, "E");
  positive(varrho, "varrho");
  positive(g_s, "g_s");
  if (T < 0.0) throw std::invalid_argument("DeviceParams: T must be >= 0");
  if (G_m < 0.0) throw std::invalid_argument("DeviceParams: G_m must be >= 0");
}

double fundamental_frequency(const DeviceParams& d) {
  d.validate();
  return 3.516 * (d.t / (d.l * d.l)) * std::sqrt(d.E / (12.0 * d.varrho));
}

double effective_mass(const DeviceParams& d) {
  d.validate();
  return d.varrho * d.l * d.w * d.t / 4.0;
}

double zero_point_amplitude(const DeviceParams& d) {
  return std::sqrt(constants::hbar / (2.0 * effective_mass(d) * fundamental_frequency(d)));
}

double magnetic_coupling(const DeviceParams& d) {
  return d.g_s * constants::mu_B * d.G_m * zero_point_amplitude(d) / constants::hbar;
}

double thermal_occupation(double omega_r, double T) {
  if (omega_r <= 0.0)
    throw std::invalid_argument("thermal_occupation: omega_r must be > 0");
  if (T < 0.0) throw std::invalid_argument("thermal_occupation: T must be >= 0");
  if (T == 0.0) return 0.0;
  return 1.0 / std::expm1(constants::hbar * omega_r / (constants::k_B * T));
}

FeasibilityReport feasibility(const DeviceParams& d) {
  FeasibilityReport r;
  r.omega_r = fundamental_frequency(d);
  r.m_eff = effective_mass(d);
  r.a0 = zero_point_amplitude(d);
  r.lambda = magnetic_coupling(d);
  r.n_th = thermal_occupation(r.omega_r, d.T);
  return r;
}

UnitSystem unit_system(const DeviceParams& d) {
  const double lam = magnetic_coupling(d);
  if (!(lam > 0.0))
    throw std::invalid_argument("unit_system: device coupling is zero (G_m = 0?)");
  return {lam};
}

}  // namespace mph
