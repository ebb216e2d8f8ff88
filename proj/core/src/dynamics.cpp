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

#include "multiphonon/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "rk45.hpp"

namespace mph {

namespace {

constexpr Complex kI{0.0, 1.0};

// Shared precomputation for both unravelings.
struct Engine {
  Matrix M;                   // -iH - 1/2 sum rate C^dag C  (drift generator)
  std::vector<double> rates;
  std::vector<Matrix> C;

  explicit Engine(const LindbladModel& model) {
    const int dim = model.space().dim();
    M = -kI * model.hamiltonian().matrix();
    for (const auto& ch : model.channels()) {
      rates.push_back(ch.rate);
      C.push_back(ch.collapse.matrix());
      M -= 0.5 * ch.rate * (C.back().adjoint() * C.back());
    }
    (void)dim;
  }

  // drho = M rho + rho M^dag + sum rate C rho C^dag
  void density_rhs(const Matrix& rho, Matrix& out) const {
    out = M * rho + rho * M.adjoint();
    for (size_t k = 0; k < C.size(); ++k)
      if (rates[k] != 0.0) out.noalias() += rates[k] * (C[k] * rho * C[k].adjoint());
  }

  // dpsi = (-iH - 1/2 sum rate C^dag C) psi
  void vector_rhs(const Vector& psi, Vector& out) const { out.noalias() = M * psi; }
};

std::vector<double> checked_times(const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("dynamics: empty time grid");
  for (size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1])
      throw std::invalid_argument("dynamics: times must be strictly increasing");
  return times;
}

}  // namespace

LindbladModel::LindbladModel(Operator hamiltonian, std::vector<LindbladChannel> channels)
    : hamiltonian_(std::move(hamiltonian)), channels_(std::move(channels)) {
  if (!hamiltonian_.is_hermitian(1e-10))
    throw std::invalid_argument("LindbladModel: Hamiltonian not Hermitian (defect " +
                                std::to_string(hamiltonian_.hermiticity_defect()) + ")");
  for (const auto& ch : channels_) {
    if (ch.rate < 0.0)
      throw std::invalid_argument("LindbladModel: negative channel rate " +
                                  std::to_string(ch.rate));
    if (!(ch.collapse.space() == hamiltonian_.space()))
      throw std::invalid_argument("LindbladModel: channel operator on a different space");
  }
}

LindbladModel make_model(const Operator& hamiltonian, const DissipationParams& d,
                         ModelVariant variant) {
  if (d.gamma_s < 0 || d.gamma_m < 0 || d.n_th < 0 || d.Gamma_0 < 0)
    throw std::invalid_argument("make_model: negative rate");
  const HilbertSpace& space = hamiltonian.space();
  Operator a = fock_op(FockOp::Annihilate, space);
  Operator sz = spin_op(SpinOp::SigmaZ, space);
  std::vector<LindbladChannel> ch;
  switch (variant) {
    case ModelVariant::Cat:
      ch.push_back({d.gamma_s, sz});
      ch.push_back({(d.n_th + 1.0) * d.gamma_m, a});
      break;
    case ModelVariant::Fock:
      ch.push_back({d.gamma_s, sz});
      ch.push_back({d.n_th * d.gamma_m, a.adjoint()});
      ch.push_back({(d.n_th + 1.0) * d.gamma_m, a});
      break;
    case ModelVariant::Correlation:
      ch.push_back({d.gamma_s, sz});
      ch.push_back({(d.n_th + 1.0) * d.gamma_m, a});
      ch.push_back({d.Gamma_0, spin_op(SpinOp::SigmaMinus, space)});
      break;
  }
  return {hamiltonian, std::move(ch)};
}

Matrix apply_liouvillian(const LindbladModel& model, const Matrix& rho) {
  Engine eng(model);
  Matrix out;
  eng.density_rhs(rho, out);
  return out;
}

Matrix liouvillian_matrix(const LindbladModel& model) {
  const int dim = model.space().dim();
  const int dim2 = dim * dim;
  Matrix Id = Matrix::Identity(dim, dim);
  auto kron = [dim](const Matrix& A, const Matrix& B) {
    Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
      for (int j = 0; j < A.cols(); ++j)
        out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
  };
  // column-major vec: vec(A rho B) = (B^T kron A) vec(rho)
  const Matrix& H = model.hamiltonian().matrix();
  Matrix L = -kI * (kron(Id, H) - kron(H.transpose(), Id));
  for (const auto& ch : model.channels()) {
    const Matrix& C = ch.collapse.matrix();
    Matrix CdC = C.adjoint() * C;
    L += ch.rate * (kron(C.conjugate(), C) - 0.5 * kron(Id, CdC) -
                    0.5 * kron(CdC.transpose(), Id));
  }
  (void)dim2;
  return L;
}

std::vector<Matrix> propagate_matrix(const LindbladModel& model, const Matrix& initial,
                                     const std::vector<double>& times,
                                     const IntegratorOptions& opt,
                                     bool hermitize_each_step) {
  const auto ts = checked_times(times);
  Engine eng(model);
  auto rhs = [&eng](double, const Matrix& y, Matrix& dy) { eng.density_rhs(y, dy); };
  detail::DormandPrince<Matrix, decltype(rhs)> stepper(rhs, opt);

  std::vector<Matrix> out;
  out.reserve(ts.size());
  out.push_back(initial);

  double t = ts.front();
  Matrix y = initial;
  Matrix k1;
  rhs(t, y, k1);
  double h = 0.0;
  auto on_accept = [&](double, Matrix& state) {
    if (hermitize_each_step) state = 0.5 * (state + state.adjoint()).eval();
  };
  for (size_t i = 1; i < ts.size(); ++i) {
    detail::integrate_to(stepper, t, y, k1, h, ts[i], on_accept);
    out.push_back(y);
  }
  return out;
}

EvolveResult lindblad_evolve(const LindbladModel& model, const QuantumState& rho0,
                             const std::vector<double>& times,
                             const std::vector<Operator>& observables,
                             const EvolveOptions& opt) {
  if (!(rho0.space() == model.space()))
    throw std::invalid_argument("lindblad_evolve: state space mismatch");
  const auto ts = checked_times(times);
  Engine eng(model);
  auto rhs = [&eng](double, const Matrix& y, Matrix& dy) { eng.density_rhs(y, dy); };
  detail::DormandPrince<Matrix, decltype(rhs)> stepper(rhs, opt.integrator);

  EvolveResult res;
  res.times = ts;
  res.expectations.resize(observables.size(), ts.size());
  if (opt.store_states) res.states.reserve(ts.size());
  res.min_eigenvalue = 0.0;

  double t = ts.front();
  Matrix y = rho0.density_matrix();
  Matrix k1;
  rhs(t, y, k1);
  double h = 0.0;

  auto record = [&](size_t i) {
    for (size_t o = 0; o < observables.size(); ++o)
      res.expectations(o, i) = (observables[o].matrix() * y).trace().real();
    if (opt.store_states) res.states.push_back(y);
    const double defect = std::abs(y.trace().real() - 1.0);
    res.max_trace_defect = std::max(res.max_trace_defect, defect);
    if (defect > opt.trace_tol)
      throw std::runtime_error("lindblad_evolve: trace defect " + std::to_string(defect) +
                               " beyond tolerance at t = " + std::to_string(ts[i]));
    if (opt.check_positivity) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(y, Eigen::EigenvaluesOnly);
      res.min_eigenvalue = std::min(res.min_eigenvalue, es.eigenvalues().minCoeff());
      if (res.min_eigenvalue < opt.positivity_floor)
        throw std::runtime_error("lindblad_evolve: positivity violated (min eigenvalue " +
                                 std::to_string(res.min_eigenvalue) + ") at t = " +
                                 std::to_string(ts[i]));
    }
  };

  auto on_accept = [&](double, Matrix& state) {
    state = 0.5 * (state + state.adjoint()).eval();
  };

  record(0);
  for (size_t i = 1; i < ts.size(); ++i) {
    detail::integrate_to(stepper, t, y, k1, h, ts[i], on_accept);
    record(i);
  }
  return res;
}

SteadyStateResult steady_state_full(const LindbladModel& model,
                                    const SteadyStateOptions& opt) {
  const int dim = model.space().dim();
  Engine eng(model);
  auto residual_of = [&](const Matrix& rho) {
    Matrix d;
    eng.density_rhs(rho, d);
    return d.norm();
  };

  auto finalize = [&](Matrix rho, bool via_prop, std::string warning) {
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();
    // clamp numerical noise on the spectrum floor
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    const double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < -1e-7)
      throw std::runtime_error("steady_state: solution not positive (min eigenvalue " +
                               std::to_string(min_ev) + ")");
    if (min_ev < 0.0) {
      Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
      rho = es.eigenvectors() * ev.asDiagonal().toDenseMatrix().cast<Complex>() *
            es.eigenvectors().adjoint();
      rho /= rho.trace().real();
    }
    SteadyStateResult out{QuantumState::density(model.space(), rho), residual_of(rho),
                          via_prop, std::move(warning)};
    return out;
  };

  std::string warning;
  if (dim <= opt.direct_dim_limit) {
    Matrix L = liouvillian_matrix(model);
    Matrix A = L;
    A.row(0).setZero();
    for (int i = 0; i < dim; ++i) A(0, i * dim + i) = 1.0;  // trace row
    Vector b = Vector::Zero(dim * dim);
    b(0) = 1.0;
    Eigen::PartialPivLU<Matrix> lu(A);
    Vector x = lu.solve(b);
    if (x.allFinite()) {
      Matrix rho = Eigen::Map<Matrix>(x.data(), dim, dim);
      rho = 0.5 * (rho + rho.adjoint()).eval();
      const double resid = residual_of(rho);
      if (resid < opt.residual_tol && std::abs(rho.trace().real() - 1.0) < 1e-6) {
        return finalize(std::move(rho), false, "");
      }
      warning = "direct null-space solve residual " + std::to_string(resid) +
                " (degenerate null space?); falling back to propagation";
    } else {
      warning = "direct null-space solve singular; falling back to propagation";
    }
  } else {
    warning = "dimension " + std::to_string(dim) + " beyond direct limit " +
              std::to_string(opt.direct_dim_limit) + "; using propagation";
  }

  // Long-time propagation fallback from the maximally mixed state.
  double slowest = std::numeric_limits<double>::infinity();
  for (const auto& ch : model.channels())
    if (ch.rate > 0.0) slowest = std::min(slowest, ch.rate);
  if (!std::isfinite(slowest))
    throw std::runtime_error("steady_state: no dissipative channel; cannot converge");
  Matrix rho = Matrix::Identity(dim, dim) / double(dim);
  double t_chunk = 10.0 / slowest, t_total = 0.0;
  while (t_total < opt.max_propagation_time) {
    auto states = propagate_matrix(model, rho, {0.0, t_chunk}, opt.integrator, true);
    rho = states.back();
    t_total += t_chunk;
    if (residual_of(rho) < opt.residual_tol) return finalize(std::move(rho), true, warning);
    t_chunk *= 2.0;
  }
  throw std::runtime_error("steady_state: no convergence after t = " +
                           std::to_string(t_total) +
                           " (residual " + std::to_string(residual_of(rho)) + ")");
}

QuantumState steady_state(const LindbladModel& model, const SteadyStateOptions& opt) {
  return steady_state_full(model, opt).state;
}

namespace {

// Uniform double in (0,1), built from the raw 64-bit stream so the sequence is
// identical across platforms.
double uniform_open(std::mt19937_64& rng) {
  return (double(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

TrajectoryRecord mcwf_trajectory(const LindbladModel& model, const QuantumState& psi0,
                                 const std::vector<double>& times,
                                 const std::vector<Operator>& observables,
                                 std::uint64_t seed, const TrajectoryOptions& opt) {
  if (!psi0.is_pure())
    throw std::invalid_argument("mcwf_trajectory: initial state must be pure");
  if (!(psi0.space() == model.space()))
    throw std::invalid_argument("mcwf_trajectory: state space mismatch");
  const auto ts = checked_times(times);

  Engine eng(model);
  auto rhs = [&eng](double, const Vector& y, Vector& dy) { eng.vector_rhs(y, dy); };
  detail::DormandPrince<Vector, decltype(rhs)> stepper(rhs, opt.integrator);

  std::mt19937_64 rng(seed);
  TrajectoryRecord rec;
  rec.seed = seed;
  rec.times = ts;
  rec.expectations.resize(observables.size(), ts.size());

  double t = ts.front();
  Vector psi = psi0.vector();
  Vector k1;
  rhs(t, psi, k1);
  double h = 0.0;
  double threshold = uniform_open(rng);

  auto record = [&](size_t i) {
    const double n2 = psi.squaredNorm();
    for (size_t o = 0; o < observables.size(); ++o)
      rec.expectations(o, i) = psi.dot(observables[o].matrix() * psi).real() / n2;
  };

  auto do_jump = [&](double t_jump) {
    const int nch = int(eng.C.size());
    std::vector<double> w(nch);
    double total = 0.0;
    for (int k = 0; k < nch; ++k) {
      w[k] = eng.rates[k] * (eng.C[k] * psi).squaredNorm();
      total += w[k];
    }
    if (total <= 0.0)
      throw std::runtime_error("mcwf_trajectory: norm threshold crossed with no active "
                               "channel at t = " + std::to_string(t_jump));
    const double u = uniform_open(rng) * total;
    int chosen = nch - 1;
    double acc = 0.0;
    for (int k = 0; k < nch; ++k) {
      acc += w[k];
      if (u <= acc) { chosen = k; break; }
    }
    if (opt.record_jump_states) rec.states_before_jump.push_back(psi.normalized());
    psi = (eng.C[chosen] * psi).eval();
    psi.normalize();
    if (opt.record_jump_states) rec.states_after_jump.push_back(psi);
    rec.jumps.push_back({t_jump, chosen});
    rhs(t_jump, psi, k1);
    threshold = uniform_open(rng);
  };

  // Advances to t_target, firing jumps at threshold crossings. The crossing
  // time inside an accepted step is bisected using fixed sub-steps from the
  // stored step-start state; their one-step error is below the accepted step's.
  auto advance = [&](double t_target) {
    int guard = 0;
    while (t < t_target) {
      if (++guard > 50'000'000)
        throw std::runtime_error("mcwf_trajectory: step guard tripped");
      double h_try = (h > 0) ? h : stepper.initial_step(t_target - t);
      h_try = std::min({h_try, t_target - t, opt.integrator.max_step});
      auto att = stepper.attempt(t, psi, k1, h_try);
      if (att.error > 1.0) {
        h = stepper.next_step(h_try, att.error);
        if (!(h > 1e-14 * std::max(1.0, std::abs(t))))
          throw std::runtime_error("mcwf_trajectory: integration failure at t = " +
                                   std::to_string(t));
        continue;
      }
      if (att.y5.squaredNorm() >= threshold) {
        t += h_try;
        psi = std::move(att.y5);
        k1 = std::move(att.k7);
        h = stepper.next_step(h_try, att.error);
        continue;
      }
      // norm^2 crossed the threshold inside (t, t + h_try]: bisect
      if (psi.squaredNorm() < 1e-28)
        throw std::runtime_error("mcwf_trajectory: norm underflow without crossing at t = " +
                                 std::to_string(t));
      double lo = 0.0, hi = h_try;
      Vector y_hi = att.y5;
      while (hi - lo > opt.bisect_rel_tol * h_try) {
        const double mid = 0.5 * (lo + hi);
        Vector y_mid = stepper.substep(t, psi, k1, mid);
        if (y_mid.squaredNorm() >= threshold) {
          lo = mid;
        } else {
          hi = mid;
          y_hi = std::move(y_mid);
        }
      }
      t += hi;
      psi = std::move(y_hi);
      do_jump(t);
    }
  };

  record(0);
  for (size_t i = 1; i < ts.size(); ++i) {
    advance(ts[i]);
    record(i);
  }
  rec.final_state = psi.normalized();
  return rec;
}

EnsembleResult trajectory_ensemble(const LindbladModel& model, const QuantumState& psi0,
                                   const std::vector<double>& times,
                                   const std::vector<Operator>& observables, int n_traj,
                                   std::uint64_t seed0, int threads,
                                   const TrajectoryOptions& opt) {
  if (n_traj < 1) throw std::invalid_argument("trajectory_ensemble: n_traj must be >= 1");
  const auto ts = checked_times(times);
  const size_t n_obs = observables.size();

  std::vector<Eigen::MatrixXd> per_traj(n_traj);
  auto work = [&](int k) {
    per_traj[k] =
        mcwf_trajectory(model, psi0, ts, observables, seed0 + std::uint64_t(k), opt)
            .expectations;
  };
  if (threads <= 1 || n_traj == 1) {
    for (int k = 0; k < n_traj; ++k) work(k);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int nw = std::min(threads, n_traj);
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w)
      pool.emplace_back([&] {
        for (int k = next.fetch_add(1); k < n_traj; k = next.fetch_add(1)) work(k);
      });
    for (auto& th : pool) th.join();
  }

  EnsembleResult out;
  out.times = ts;
  out.n_traj = n_traj;
  out.mean = Eigen::MatrixXd::Zero(n_obs, ts.size());
  out.std_error = Eigen::MatrixXd::Zero(n_obs, ts.size());
  for (int k = 0; k < n_traj; ++k) out.mean += per_traj[k];
  out.mean /= double(n_traj);
  if (n_traj > 1) {
    for (int k = 0; k < n_traj; ++k)
      out.std_error += (per_traj[k] - out.mean).cwiseAbs2();
    out.std_error =
        (out.std_error / double(n_traj) / double(n_traj - 1)).cwiseSqrt();
  }
  return out;
}

}  // namespace mph
