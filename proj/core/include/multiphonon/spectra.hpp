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

#include <functional>
#include <utility>
#include <vector>

#include "multiphonon/hilbert.hpp"

namespace mph {

/// Hamiltonian as a function of the swept parameter (drive strength, detuning, ...).
using HamiltonianBuilder = std::function<Operator(double)>;

/// Eigenvalue table of a Hermitian family over a parameter grid.
struct SpectrumSweep {
  std::vector<double> parameter;      // grid values
  Eigen::MatrixXd energies;           // row per grid point, sorted ascending
  int levels_kept = 0;
};

/// Dense eigenvalue sweep. keep_lowest < 0 keeps the full spectrum.
/// Points are independent and may be evaluated in parallel (threads > 1);
/// results do not depend on the evaluation order.
SpectrumSweep sweep(const HamiltonianBuilder& builder, std::pair<double, double> range,
                    int resolution, int keep_lowest = -1, int threads = 1);

struct CrossingReport {
  int n = 0;                 // phonon order of the tracked resonance
  double parameter_star = 0; // gap-minimizing parameter value
  double gap = 0;            // minimum splitting of the tracked pair
  double predicted = 0;      // externally supplied prediction (e.g. n Delta_a / 2)
};

/// Minimum splitting between the two eigenlevels tracked by maximal overlap
/// with the given bare pair, refined by golden-section search to tol_abs.
/// Errors if tracking is lost (combined overlap of a bare state on the tracked
/// 2d eigenspace < 0.3) or if the minimum sits at a range boundary.
CrossingReport find_crossing(const HamiltonianBuilder& builder, int n,
                             const QuantumState& bare_a, const QuantumState& bare_b,
                             std::pair<double, double> range, double tol_abs = 1e-4,
                             double predicted = 0.0, int scan_resolution = 101);

/// Splitting of the overlap-tracked pair at a single parameter value.
double tracked_gap(const HamiltonianBuilder& builder, double value,
                   const QuantumState& bare_a, const QuantumState& bare_b);

}  // namespace mph
