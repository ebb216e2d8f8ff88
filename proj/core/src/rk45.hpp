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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "multiphonon/dynamics.hpp"

namespace mph::detail {

// Dormand-Prince 5(4) with FSAL. State is any Eigen dense complex type.
template <class State, class Rhs>
class DormandPrince {
 public:
  DormandPrince(Rhs rhs, IntegratorOptions opt) : rhs_(std::move(rhs)), opt_(opt) {
    if (opt_.rel_tol <= 0 || opt_.abs_tol <= 0)
      throw std::invalid_argument("integrator tolerances must be positive");
  }

  struct Attempt {
    State y5;
    State k7;      // rhs at (t+h, y5); k1 of the next step when accepted
    double error;  // scaled max norm; accept when <= 1
  };

  // One embedded step from (t, y) with slope k1 = rhs(t, y).
  Attempt attempt(double t, const State& y, const State& k1, double h) const {
    State k2, k3, k4, k5, k6;
    stages(t, y, k1, h, k2, k3, k4, k5, k6);
    Attempt out;
    out.y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs_(t + h, out.y5, out.k7);
    // embedded error estimate
    State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * out.k7);
    double maxr = 0.0;
    const auto* ye = y.data();
    const auto* y5e = out.y5.data();
    const auto* ee = err.data();
    const auto n = y.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale =
          opt_.abs_tol + opt_.rel_tol * std::max(std::abs(ye[i]), std::abs(y5e[i]));
      maxr = std::max(maxr, std::abs(ee[i]) / scale);
    }
    out.error = maxr;
    return out;
  }

  // 5th-order solution at a fraction of a step, no error control. Used for
  // refining event times inside an already accepted step.
  State substep(double t, const State& y, const State& k1, double h) const {
    State k2, k3, k4, k5, k6;
    stages(t, y, k1, h, k2, k3, k4, k5, k6);
    return y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  }

  double initial_step(double span) const {
    return opt_.initial_step > 0 ? opt_.initial_step : span / 100.0;
  }

  double next_step(double h, double error) const {
    const double factor =
        error > 0 ? std::clamp(0.9 * std::pow(error, -0.2), 0.2, 5.0) : 5.0;
    return h * factor;
  }

  const IntegratorOptions& options() const { return opt_; }

 private:
  void stages(double t, const State& y, const State& k1, double h, State& k2, State& k3,
              State& k4, State& k5, State& k6) const {
    rhs_(t + c2 * h, y + h * (a21 * k1), k2);
    rhs_(t + c3 * h, y + h * (a31 * k1 + a32 * k2), k3);
    rhs_(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4);
    rhs_(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
    rhs_(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
  }

  Rhs rhs_;
  IntegratorOptions opt_;

  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
};

// Drives the stepper from (t, y) to exactly t_end. on_accept(t_new, y_ref) runs
// after every accepted step and may adjust y in place (e.g. re-symmetrization).
template <class State, class Rhs, class OnAccept>
void integrate_to(DormandPrince<State, Rhs>& stepper, double& t, State& y,
                  State& k1, double& h, double t_end, OnAccept&& on_accept) {
  const double span = t_end - t;
  if (span <= 0) return;
  if (h <= 0) h = stepper.initial_step(span);
  int rejects_in_row = 0;
  while (t < t_end) {
    h = std::min({h, t_end - t, stepper.options().max_step});
    auto att = stepper.attempt(t, y, k1, h);
    if (att.error <= 1.0) {
      t += h;
      y = std::move(att.y5);
      k1 = std::move(att.k7);
      on_accept(t, y);
      h = stepper.next_step(h, att.error);
      rejects_in_row = 0;
    } else {
      h = stepper.next_step(h, att.error);
      if (++rejects_in_row > 200 || !(h > 1e-14 * std::max(1.0, std::abs(t))))
        throw std::runtime_error("integrator failed to reach tolerance at t = " +
                                 std::to_string(t));
    }
  }
}

}  // namespace mph::detail
