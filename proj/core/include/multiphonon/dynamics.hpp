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

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "multiphonon/hilbert.hpp"

namespace mph {

struct LindbladChannel {
  double rate = 0.0;       // non-negative
  Operator collapse;       // applied as rate * D[collapse]
};

/// Hamiltonian plus Lindblad channels, all on one space.
/// drho/dt = -i[H, rho] + sum_k rate_k (C rho C^dag - 1/2 {C^dag C, rho}).
class LindbladModel {
 public:
  LindbladModel(Operator hamiltonian, std::vector<LindbladChannel> channels);

  const Operator& hamiltonian() const { return hamiltonian_; }
  const std::vector<LindbladChannel>& channels() const { return channels_; }
  const HilbertSpace& space() const { return hamiltonian_.space(); }

 private:
  Operator hamiltonian_;
  std::vector<LindbladChannel> channels_;
};

struct DissipationParams {
  double gamma_s = 0.0;  // spin dephasing
  double gamma_m = 0.0;  // mechanical damping
  double n_th = 0.0;     // thermal occupation
  double Gamma_0 = 0.0;  // engineered spin decay
};

/// Channel sets of the three dissipative settings:
///   Cat:         gamma_s D[sz], (n_th+1) gamma_m D[a]            (cooled)
///   Fock:        gamma_s D[sz], n_th gamma_m D[a^dag], (n_th+1) gamma_m D[a]
///   Correlation: gamma_s D[sz], (n_th+1) gamma_m D[a], Gamma_0 D[sm]
enum class ModelVariant { Cat, Fock, Correlation };

LindbladModel make_model(const Operator& hamiltonian, const DissipationParams& d,
                         ModelVariant variant);

struct IntegratorOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_step = 0.0;  // 0: choose automatically
  double max_step = std::numeric_limits<double>::infinity();
};

/// Action of the Liouvillian on a matrix (not necessarily a state).
Matrix apply_liouvillian(const LindbladModel& model, const Matrix& rho);

/// Dense superoperator matrix of the Liouvillian (column-major vectorization).
Matrix liouvillian_matrix(const LindbladModel& model);

/// Propagates an arbitrary matrix under the Liouvillian, recording it at the
/// given times (times[0] is the initial time). No state validation; used both
/// by the master-equation front end and by regression-based correlations.
std::vector<Matrix> propagate_matrix(const LindbladModel& model, const Matrix& initial,
                                     const std::vector<double>& times,
                                     const IntegratorOptions& opt = {},
                                     bool hermitize_each_step = false);

struct EvolveOptions {
  IntegratorOptions integrator;
  bool store_states = false;
  bool check_positivity = true;   // eigenvalue check at recorded times
  double trace_tol = 1e-8;
  double positivity_floor = -1e-7;
};

struct EvolveResult {
  std::vector<double> times;
  Eigen::MatrixXd expectations;   // observables x times, Re<O>
  std::vector<Matrix> states;     // filled when store_states
  double max_trace_defect = 0.0;
  double min_eigenvalue = 0.0;
};

/// Master-equation evolution with trace/positivity monitoring. The density
/// matrix is re-symmetrized after every accepted step; |tr rho - 1| beyond
/// trace_tol aborts with the failing time in the message.
EvolveResult lindblad_evolve(const LindbladModel& model, const QuantumState& rho0,
                             const std::vector<double>& times,
                             const std::vector<Operator>& observables = {},
                             const EvolveOptions& opt = {});

struct SteadyStateOptions {
  int direct_dim_limit = 72;      // direct null-space solve up to this space dim
  double residual_tol = 1e-9;
  IntegratorOptions integrator;
  double max_propagation_time = 1e8;
};

struct SteadyStateResult {
  QuantumState state;
  double residual = 0.0;          // ||L(rho_ss)||_F
  bool via_propagation = false;
  std::string warning;            // non-empty when the direct solve was abandoned
};

/// Trace-normalized null vector of the vectorized Liouvillian, with long-time
/// propagation as fallback (degenerate null space or failed residual).
SteadyStateResult steady_state_full(const LindbladModel& model,
                                    const SteadyStateOptions& opt = {});
QuantumState steady_state(const LindbladModel& model, const SteadyStateOptions& opt = {});

struct JumpEvent {
  double time = 0.0;
  int channel = -1;
};

struct TrajectoryOptions {
  IntegratorOptions integrator;
  bool record_jump_states = false;  // normalized states just before/after each jump
  double bisect_rel_tol = 1e-3;     // jump-time precision, relative to the bracketing step
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<double> times;
  Eigen::MatrixXd expectations;     // observables x times, on the normalized state
  std::vector<JumpEvent> jumps;
  std::vector<Vector> states_before_jump;  // when record_jump_states
  std::vector<Vector> states_after_jump;
  Vector final_state;               // normalized
};

/// Photon-counting quantum-jump unraveling: non-Hermitian drift between jumps,
/// a jump fires when ||psi||^2 crosses a pre-drawn uniform threshold (crossing
/// time refined by bisection), channel chosen proportional to rate ||C psi||^2.
/// Fully deterministic for a fixed seed.
TrajectoryRecord mcwf_trajectory(const LindbladModel& model, const QuantumState& psi0,
                                 const std::vector<double>& times,
                                 const std::vector<Operator>& observables,
                                 std::uint64_t seed, const TrajectoryOptions& opt = {});

struct EnsembleResult {
  std::vector<double> times;
  Eigen::MatrixXd mean;        // observables x times
  Eigen::MatrixXd std_error;   // observables x times
  int n_traj = 0;
};

/// Averages mcwf trajectories with seeds seed0 .. seed0 + n_traj - 1.
/// Trajectories run in parallel; the reduction order is fixed, so results are
/// identical for any thread count.
EnsembleResult trajectory_ensemble(const LindbladModel& model, const QuantumState& psi0,
                                   const std::vector<double>& times,
                                   const std::vector<Operator>& observables, int n_traj,
                                   std::uint64_t seed0, int threads = 1,
                                   const TrajectoryOptions& opt = {});

}  // namespace mph
