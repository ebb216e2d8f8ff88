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

#include "multiphonon/spectra.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace mph {

namespace {

Eigen::VectorXd sorted_eigenvalues(const Operator& H) {
  if (!H.is_hermitian(1e-10))
    throw std::invalid_argument("spectra: builder returned a non-Hermitian operator (defect " +
                                std::to_string(H.hermiticity_defect()) + ")");
  Eigen::SelfAdjointEigenSolver<Matrix> es(H.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

struct TrackedPair {
  double gap;
  double coverage_a;  // weight of bare_a on the tracked 2d eigenspace
  double coverage_b;
};

TrackedPair tracked_pair(const Operator& H, const Vector& bare_a, const Vector& bare_b) {
  if (!H.is_hermitian(1e-10))
    throw std::invalid_argument("spectra: non-Hermitian operator in tracking");
  Eigen::SelfAdjointEigenSolver<Matrix> es(H.matrix());
  const int dim = int(H.matrix().rows());
  int best1 = 0, best2 = 1;
  double s1 = -1.0, s2 = -1.0;
  for (int k = 0; k < dim; ++k) {
    const auto v = es.eigenvectors().col(k);
    const double score = std::norm(v.dot(bare_a)) + std::norm(v.dot(bare_b));
    if (score > s1) {
      s2 = s1; best2 = best1;
      s1 = score; best1 = k;
    } else if (score > s2) {
      s2 = score; best2 = k;
    }
  }
  double cov_a = 0.0, cov_b = 0.0;
  for (int k : {best1, best2}) {
    const auto v = es.eigenvectors().col(k);
    cov_a += std::norm(v.dot(bare_a));
    cov_b += std::norm(v.dot(bare_b));
  }
  return {std::abs(es.eigenvalues()(best1) - es.eigenvalues()(best2)), cov_a, cov_b};
}

}  // namespace

SpectrumSweep sweep(const HamiltonianBuilder& builder, std::pair<double, double> range,
                    int resolution, int keep_lowest, int threads) {
  if (resolution < 3) throw std::invalid_argument("sweep: resolution must be >= 3");
  SpectrumSweep out;
  out.parameter.resize(resolution);
  for (int i = 0; i < resolution; ++i)
    out.parameter[i] =
        range.first + (range.second - range.first) * i / double(resolution - 1);

  const int dim = builder(out.parameter.front()).matrix().rows();
  const int kept = (keep_lowest < 0 || keep_lowest > dim) ? dim : keep_lowest;
  out.levels_kept = kept;
  out.energies.resize(resolution, kept);

  auto work = [&](int i) {
    Eigen::VectorXd w = sorted_eigenvalues(builder(out.parameter[i]));
    out.energies.row(i) = w.head(kept).transpose();
  };
  if (threads <= 1) {
    for (int i = 0; i < resolution; ++i) work(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int nw = std::min(threads, resolution);
    pool.reserve(nw);
    for (int t = 0; t < nw; ++t)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < resolution; i = next.fetch_add(1)) work(i);
      });
    for (auto& th : pool) th.join();
  }
  return out;
}

double tracked_gap(const HamiltonianBuilder& builder, double value,
                   const QuantumState& bare_a, const QuantumState& bare_b) {
  const TrackedPair p = tracked_pair(builder(value), bare_a.vector(), bare_b.vector());
  if (std::min(p.coverage_a, p.coverage_b) < 0.3)
    throw std::runtime_error("tracked_gap: state tracking lost at parameter " +
                             std::to_string(value) + " (overlap " +
                             std::to_string(std::min(p.coverage_a, p.coverage_b)) + ")");
  return p.gap;
}

CrossingReport find_crossing(const HamiltonianBuilder& builder, int n,
                             const QuantumState& bare_a, const QuantumState& bare_b,
                             std::pair<double, double> range, double tol_abs,
                             double predicted, int scan_resolution) {
  if (scan_resolution < 5)
    throw std::invalid_argument("find_crossing: scan_resolution must be >= 5");
  auto gap_at = [&](double x) { return tracked_gap(builder, x, bare_a, bare_b); };

  // coarse scan
  std::vector<double> xs(scan_resolution), gs(scan_resolution);
  for (int i = 0; i < scan_resolution; ++i) {
    xs[i] = range.first +
            (range.second - range.first) * i / double(scan_resolution - 1);
    gs[i] = gap_at(xs[i]);
  }
  int imin = 0;
  for (int i = 1; i < scan_resolution; ++i)
    if (gs[i] < gs[imin]) imin = i;
  if (imin == 0 || imin == scan_resolution - 1)
    throw std::runtime_error("find_crossing: gap minimum at the scanned boundary (" +
                             std::to_string(xs[imin]) + ")");

  // golden-section refinement on [x_{i-1}, x_{i+1}]
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = xs[imin - 1], b = xs[imin + 1];
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = gap_at(c), fd = gap_at(d);
  while (b - a > tol_abs) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = gap_at(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = gap_at(d);
    }
  }
  const double x_star = 0.5 * (a + b);
  return {n, x_star, gap_at(x_star), predicted};
}

}  // namespace mph
