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
#ifndef QRE_METRICS_HPP_
#define QRE_METRICS_HPP_

#include <optional>
#include <vector>

#include "qre/markov_game.hpp"
#include "qre/matrix_game.hpp"

namespace qre {

// Absent metrics stay empty and are written as empty CSV fields.
struct ErrorReport {
  std::optional<double> theta_err;
  std::optional<double> payoff_err;
  std::optional<double> qre_tv_err;
  std::optional<double> reward_D;
  std::optional<double> reward_D1;
};

double tv(const Vector& p, const Vector& q);

// 0.5 * sum (sqrt p - sqrt q)^2.
double hellinger_sq(const Vector& p, const Vector& q);

// sup over (h, s, a, b) of |r - r'|.
double reward_metric_D(const StepTensor& r, const StepTensor& r_prime);

// sup over (h, a, b) of E_{s ~ rho_h} |r_h(s, a, b) - r'_h(s, a, b)|.
double reward_metric_D1(const StepTensor& r, const StepTensor& r_prime,
                        const std::vector<Vector>& rho);

// sqrt of the summed squared Frobenius norms over (h, s).
double frobenius_error(const StepTensor& r, const StepTensor& r_prime);

// Re-solves the game on the estimated payoff and returns
// TV(mu_hat, mu*) + TV(nu_hat, nu*).
double qre_discrepancy(const Matrix& estimated_payoff,
                       const PolicyPair& true_policies, double eta,
                       const QreSolverOptions& options = {});

struct MarkovQreDiscrepancy {
  // sum_s d*_h(s) (TV(mu_hat_h(s), mu*_h(s)) + TV(nu_hat_h(s), nu*_h(s)))
  std::vector<double> per_step;
  double mean = 0.0;  // average over steps
};

// Backward induction on the estimated rewards with the true transitions,
// compared with the true stage policies under the true visit distributions.
MarkovQreDiscrepancy markov_qre_discrepancy(
    const MarkovGameSpec& truth, const StepTensor& estimated_rewards,
    const StagePolicies& true_policies, const std::vector<Vector>& visits,
    const QreSolverOptions& options = {});

}  // namespace qre

#endif  // QRE_METRICS_HPP_
