// Copyright 2026 The Inverse QRE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qre/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace qre {

namespace {

void check_same_size(const Vector& p, const Vector& q) {
  if (p.size() != q.size()) {
    throw DimensionError("distributions have different support sizes");
  }
}

void check_same_shape(const StepTensor& r, const StepTensor& r_prime) {
  bool ok = r.size() == r_prime.size();
  for (std::size_t h = 0; ok && h < r.size(); ++h) {
    ok = r[h].size() == r_prime[h].size();
    for (std::size_t s = 0; ok && s < r[h].size(); ++s) {
      ok = r[h][s].rows() == r_prime[h][s].rows() &&
           r[h][s].cols() == r_prime[h][s].cols();
    }
  }
  if (!ok) throw DimensionError("reward tensors have different shapes");
}

}  // namespace

double tv(const Vector& p, const Vector& q) {
  check_same_size(p, q);
  return 0.5 * (p - q).lpNorm<1>();
}

double hellinger_sq(const Vector& p, const Vector& q) {
  check_same_size(p, q);
  return 0.5 * (p.cwiseSqrt() - q.cwiseSqrt()).squaredNorm();
}

double reward_metric_D(const StepTensor& r, const StepTensor& r_prime) {
  check_same_shape(r, r_prime);
  double sup = 0.0;
  for (std::size_t h = 0; h < r.size(); ++h) {
    for (std::size_t s = 0; s < r[h].size(); ++s) {
      sup = std::max(sup, (r[h][s] - r_prime[h][s]).cwiseAbs().maxCoeff());
    }
  }
  return sup;
}

double reward_metric_D1(const StepTensor& r, const StepTensor& r_prime,
                        const std::vector<Vector>& rho) {
  check_same_shape(r, r_prime);
  if (rho.size() != r.size()) {
    throw DimensionError("one state distribution per step needed");
  }
  double sup = 0.0;
  for (std::size_t h = 0; h < r.size(); ++h) {
    if (r[h].empty()) continue;
    if (rho[h].size() != static_cast<Eigen::Index>(r[h].size())) {
      throw DimensionError("state distribution length mismatch");
    }
    Matrix avg = Matrix::Zero(r[h][0].rows(), r[h][0].cols());
    for (std::size_t s = 0; s < r[h].size(); ++s) {
      avg += rho[h][static_cast<Eigen::Index>(s)] *
             (r[h][s] - r_prime[h][s]).cwiseAbs();
    }
    sup = std::max(sup, avg.maxCoeff());
  }
  return sup;
}

double frobenius_error(const StepTensor& r, const StepTensor& r_prime) {
  check_same_shape(r, r_prime);
  double sq = 0.0;
  for (std::size_t h = 0; h < r.size(); ++h) {
    for (std::size_t s = 0; s < r[h].size(); ++s) {
      sq += (r[h][s] - r_prime[h][s]).squaredNorm();
    }
  }
  return std::sqrt(sq);
}

double qre_discrepancy(const Matrix& estimated_payoff,
                       const PolicyPair& true_policies, double eta,
                       const QreSolverOptions& options) {
  const PolicyPair hat = solve_qre({estimated_payoff, eta}, options);
  return tv(hat.mu, true_policies.mu) + tv(hat.nu, true_policies.nu);
}

MarkovQreDiscrepancy markov_qre_discrepancy(
    const MarkovGameSpec& truth, const StepTensor& estimated_rewards,
    const StagePolicies& true_policies, const std::vector<Vector>& visits,
    const QreSolverOptions& options) {
  MarkovGameSpec estimated = truth;
  estimated.rewards = estimated_rewards;
  const MarkovSolution sol = backward_qre(estimated, options);
  MarkovQreDiscrepancy out;
  out.per_step.assign(static_cast<std::size_t>(truth.H), 0.0);
  for (int h = 0; h < truth.H; ++h) {
    for (int s = 0; s < truth.S; ++s) {
      const PolicyPair& hat = sol.policies[h][s];
      const PolicyPair& star = true_policies[h][s];
      out.per_step[h] +=
          visits[h][s] * (tv(hat.mu, star.mu) + tv(hat.nu, star.nu));
    }
    out.mean += out.per_step[h];
  }
  out.mean /= static_cast<double>(truth.H);
  return out;
}

}  // namespace qre
