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
#ifndef QRE_INVERSE_MARKOV_HPP_
#define QRE_INVERSE_MARKOV_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qre/inverse_matrix.hpp"
#include "qre/markov_game.hpp"
#include "qre/sampling.hpp"

namespace qre {

// One step of the Markov inverse problem: the matrix-game systems of every
// state stacked, state s occupying rows s * (m + n - 2) onward. With
// weights, state s's block is multiplied by sqrt(weight[s]); a zero weight
// gives zero rows and its policy is never read.
struct StepwiseSystem {
  Matrix X;
  Vector y;
  double eta = 1.0;
  Vector weights;  // empty when unweighted

  Eigen::Index dim() const { return X.cols(); }
};

StepwiseSystem build_stepwise_system(
    const StateActionFeatures& features,
    const std::vector<PolicyPair>& policies, double eta,
    const std::optional<Vector>& weights = std::nullopt);

// {theta : |X theta - y|^2 <= kappa, |theta| <= radius}.
ConfidenceSet stepwise_confidence_set(const StepwiseSystem& system,
                                      double kappa, double radius);

// Ridge regression of V(s') on phi(s, a, b) from the step-h samples.
struct RidgeTransitionEstimator {
  double lambda = 0.0;
  Matrix gram;            // Lambda_h = sum phi phi' + lambda I
  Matrix sample_features;  // T x d, one row per step-h sample
  std::vector<int> next_states;

  // Lambda^{-1} sum_t phi_t V(s'_t).
  Vector coefficients(const Vector& next_values) const;
};

RidgeTransitionEstimator ridge_fit(const EpisodeDataset& data,
                                   const StateActionFeatures& features,
                                   double lambda, int step);

// phi(s, a, b)' Lambda^{-1} sum_t phi_t V(s'_t).
double apply_transition_estimate(const RidgeTransitionEstimator& est,
                                 const StateActionFeatures& features,
                                 const Vector& next_values, int s, int a,
                                 int b);

// Maps (h, s, V_{h+1}) to the m x n matrix of predicted E[V_{h+1}(s')].
using TransitionOperator =
    std::function<Matrix(int step, int state, const Vector& next_values)>;

TransitionOperator exact_transitions(const MarkovGameSpec& spec);
// Fits one ridge estimator per step up front.
TransitionOperator ridge_transitions(const EpisodeDataset& data,
                                     const StateActionFeatures& features,
                                     double lambda);

struct RecoveryConfig {
  double eta = 1.0;
  double gamma = 1.0;
  std::vector<double> kappa;  // per step
  double radius = 10.0;
  double lambda = 0.01;
  // Extra samples built from random members of each confidence set.
  std::size_t random_members = 0;
  std::uint64_t seed = 0;
};

struct RecoveredRewardSample {
  std::vector<Vector> theta;  // [h]
  StepTensor Q;               // [h][s]
  std::vector<Vector> V;      // [h]
  StepTensor r;               // [h][s]
  // Per step: the confidence set was empty and theta is the closest
  // candidate rather than a member.
  std::vector<bool> empty_set;
};

struct RewardRecovery {
  std::vector<ConfidenceSet> sets;  // [h]
  // samples[0] uses the min-norm member of every set; the rest use random
  // members.
  std::vector<RecoveredRewardSample> samples;
};

// Backward pass shared by both algorithms. policies[h][s] are the QRE
// estimates; weights[h] (empty for none) weight the per-state blocks.
RewardRecovery recover_rewards_from(
    const StateActionFeatures& features, const StagePolicies& policies,
    const std::vector<Vector>& weights, const TransitionOperator& transitions,
    const RecoveryConfig& config);

// Frequency estimates, unit weights on visited states, ridge transitions.
RewardRecovery recover_rewards(
    const EpisodeDataset& data, const StateActionFeatures& features,
    const RecoveryConfig& config);

// Features psi(s, action) in R^dim, row s * actions + action.
struct SoftmaxFeatures {
  int S = 0;
  int actions = 0;
  int dim = 0;
  Matrix table;

  SoftmaxFeatures() = default;
  SoftmaxFeatures(int states, int action_count, Matrix rows);

  // actions x dim block of state s.
  auto block(int s) const { return table.middleRows(s * actions, actions); }
  double max_norm() const;
};

// psi(s, a) = K e_a in every state.
SoftmaxFeatures one_hot_action_features(int S, int actions, double K);
// psi(s, a) = K e_{s * actions + a}: one free logit per (state, action).
SoftmaxFeatures saturated_features(int S, int actions, double K);

// softmax(Psi_s param).
Vector softmax_policy(const SoftmaxFeatures& features, const Vector& param,
                      int s);

struct SoftmaxPolicyModel {
  SoftmaxFeatures psi_a;
  SoftmaxFeatures psi_b;
  std::vector<Vector> vartheta;  // [h]
  std::vector<Vector> zeta;      // [h]

  StagePolicies policies() const;
};

enum class Player { kRow, kColumn };

struct MleOptions {
  double tol = 1e-8;
  std::size_t max_iter = 10000;
  double radius = 1.0;
  bool record_trace = false;
};

struct MleResult {
  Vector param;
  std::size_t iterations = 0;
  double gradient_mapping_norm = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;  // mean NLL per iterate
};

// Mean negative log-likelihood of (state, action) counts, an S x actions
// matrix.
double softmax_nll(const SoftmaxFeatures& features, const Matrix& counts,
                   const Vector& param);

// Projected gradient on the unit ball with step 1 / K^2, where K bounds
// |psi|. Stops when the gradient mapping norm drops to tol.
MleResult mle_fit(const SoftmaxFeatures& features, const Matrix& counts,
                  const MleOptions& options = {});
MleResult mle_fit(const EpisodeDataset& data, const SoftmaxFeatures& features,
                  int step, Player player, const MleOptions& options = {});

struct MleRecovery {
  RewardRecovery recovery;
  SoftmaxPolicyModel model;
  std::vector<MleResult> fits_a;  // [h]
  std::vector<MleResult> fits_b;  // [h]
};

// MLE policies per step, blocks weighted by sqrt(rho_hat_h(s)), ridge
// transitions.
MleRecovery recover_rewards_mle(const EpisodeDataset& data,
                                const StateActionFeatures& features,
                                const SoftmaxFeatures& psi_a,
                                const SoftmaxFeatures& psi_b,
                                const RecoveryConfig& config,
                                const MleOptions& mle_options = {});

// Containment threshold for one step with true minima and TV radii
// replaced by plug-ins; the TV radius uses the smallest per-state count.
// +infinity when a plug-in minimum does not exceed its radius or a state
// is unvisited.
double theoretical_kappa_step(const StateActionFeatures& features,
                              const std::vector<PolicyPair>& policies,
                              const std::vector<std::size_t>& counts,
                              double eta, double radius, double delta = 0.05);

}  // namespace qre

#endif  // QRE_INVERSE_MARKOV_HPP_
