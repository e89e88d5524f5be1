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
#include "qre/inverse_markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qre/prob.hpp"
#include "qre/rng.hpp"

namespace qre {

StepwiseSystem build_stepwise_system(const StateActionFeatures& features,
                                     const std::vector<PolicyPair>& policies,
                                     double eta,
                                     const std::optional<Vector>& weights) {
  const int S = features.S;
  const int rows = features.m + features.n - 2;
  if (static_cast<int>(policies.size()) != S) {
    throw DimensionError("stepwise system: one policy pair per state needed");
  }
  if (weights && weights->size() != S) {
    throw DimensionError("stepwise system: one weight per state needed");
  }
  StepwiseSystem out;
  out.eta = eta;
  out.X = Matrix::Zero(static_cast<Eigen::Index>(S) * rows, features.d);
  out.y = Vector::Zero(static_cast<Eigen::Index>(S) * rows);
  if (weights) out.weights = *weights;
  for (int s = 0; s < S; ++s) {
    double scale = 1.0;
    if (weights) {
      const double w = (*weights)[s];
      if (w < 0.0) throw std::invalid_argument("negative state weight");
      if (w == 0.0) continue;
      scale = std::sqrt(w);
    }
    LinearSystem block;
    try {
      block = build_linear_system(features.per_state[s], policies[s], eta);
    } catch (const NumericalError& e) {
      throw NumericalError("state " + std::to_string(s) + ": " + e.what());
    }
    out.X.middleRows(static_cast<Eigen::Index>(s) * rows, rows) =
        scale * block.X;
    out.y.segment(static_cast<Eigen::Index>(s) * rows, rows) = scale * block.y;
  }
  return out;
}

ConfidenceSet stepwise_confidence_set(const StepwiseSystem& system,
                                      double kappa, double radius) {
  return ConfidenceSet(system.X, system.y, kappa, radius);
}

// ---------------------------------------------------------------------------
// Ridge transitions

Vector RidgeTransitionEstimator::coefficients(const Vector& next_values) const {
  Vector target(sample_features.cols());
  target.setZero();
  for (Eigen::Index t = 0; t < sample_features.rows(); ++t) {
    target += sample_features.row(t).transpose() *
              next_values[next_states[static_cast<std::size_t>(t)]];
  }
  return gram.ldlt().solve(target);
}

RidgeTransitionEstimator ridge_fit(const EpisodeDataset& data,
                                   const StateActionFeatures& features,
                                   double lambda, int step) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (step < 0 || (data.T > 0 && step >= data.H)) {
    throw std::out_of_range("ridge_fit: step out of range");
  }
  RidgeTransitionEstimator est;
  est.lambda = lambda;
  est.sample_features.resize(data.T, features.d);
  est.next_states.resize(static_cast<std::size_t>(data.T));
  for (int t = 0; t < data.T; ++t) {
    const StepRecord& rec = data.at(t, step);
    est.sample_features.row(t) =
        features.phi(rec.state, rec.action_a, rec.action_b).transpose();
    est.next_states[static_cast<std::size_t>(t)] = rec.next_state;
  }
  Matrix lower = Matrix::Zero(features.d, features.d);
  lower.selfadjointView<Eigen::Lower>().rankUpdate(
      est.sample_features.transpose());
  est.gram = lower.selfadjointView<Eigen::Lower>();
  est.gram.diagonal().array() += lambda;
  return est;
}

double apply_transition_estimate(const RidgeTransitionEstimator& est,
                                 const StateActionFeatures& features,
                                 const Vector& next_values, int s, int a,
                                 int b) {
  return features.phi(s, a, b).dot(est.coefficients(next_values));
}

TransitionOperator exact_transitions(const MarkovGameSpec& spec) {
  return [spec](int h, int s, const Vector& v) {
    return spec.expected_next(h, s, v);
  };
}

TransitionOperator ridge_transitions(const EpisodeDataset& data,
                                     const StateActionFeatures& features,
                                     double lambda) {
  std::vector<RidgeTransitionEstimator> fits;
  fits.reserve(static_cast<std::size_t>(data.H));
  for (int h = 0; h < data.H; ++h) {
    fits.push_back(ridge_fit(data, features, lambda, h));
  }
  return [fits = std::move(fits), features](int h, int s, const Vector& v) {
    const Vector w = fits[static_cast<std::size_t>(h)].coefficients(v);
    return payoff_from_features(features.per_state[s], w);
  };
}

// ---------------------------------------------------------------------------
// Backward recovery

namespace {

RecoveredRewardSample backward_pass(const StateActionFeatures& features,
                                    const StagePolicies& policies,
                                    const std::vector<ConfidenceSet>& sets,
                                    const TransitionOperator& transitions,
                                    const RecoveryConfig& config,
                                    CounterRng* member_rng) {
  const int H = static_cast<int>(policies.size());
  const int S = features.S;
  RecoveredRewardSample out;
  out.theta.resize(H);
  out.Q.assign(H, StateMatrices(S));
  out.r.assign(H, StateMatrices(S));
  out.V.assign(H, Vector::Zero(S));
  out.empty_set.assign(H, false);

  Vector next_values = Vector::Zero(S);
  for (int h = H - 1; h >= 0; --h) {
    const ConfidenceSet& set = sets[static_cast<std::size_t>(h)];
    Projection pick = set.min_norm_member();
    if (member_rng != nullptr && !pick.empty) {
      pick.point = set.sample(1, *member_rng).front();
    }
    out.theta[h] = pick.point;
    out.empty_set[h] = pick.empty;
    for (int s = 0; s < S; ++s) {
      out.Q[h][s] = payoff_from_features(features.per_state[s], pick.point);
      out.V[h][s] = stage_value(out.Q[h][s], policies[h][s], config.eta);
      Matrix continuation = Matrix::Zero(features.m, features.n);
      if (h + 1 < H && config.gamma != 0.0) {
        try {
          continuation = transitions(h, s, next_values);
        } catch (const std::exception& e) {
          throw NumericalError("step " + std::to_string(h) +
                               ": transition estimate failed: " + e.what());
        }
      }
      out.r[h][s] = out.Q[h][s] - config.gamma * continuation;
    }
    next_values = out.V[h];
  }
  return out;
}

}  // namespace

RewardRecovery recover_rewards_from(
    const StateActionFeatures& features, const StagePolicies& policies,
    const std::vector<Vector>& weights, const TransitionOperator& transitions,
    const RecoveryConfig& config) {
  const int H = static_cast<int>(policies.size());
  if (H < 1) throw std::invalid_argument("recovery needs at least one step");
  if (static_cast<int>(config.kappa.size()) != H) {
    throw DimensionError("recovery: one kappa per step needed");
  }
  if (!weights.empty() && static_cast<int>(weights.size()) != H) {
    throw DimensionError("recovery: one weight vector per step needed");
  }

  std::vector<ConfidenceSet> sets;
  sets.reserve(static_cast<std::size_t>(H));
  for (int h = 0; h < H; ++h) {
    std::vector<PolicyPair> floored;
    floored.reserve(policies[h].size());
    for (const PolicyPair& p : policies[h]) floored.push_back(floor_policies(p));
    std::optional<Vector> w;
    if (!weights.empty()) w = weights[h];
    try {
      const StepwiseSystem sys =
          build_stepwise_system(features, floored, config.eta, w);
      sets.push_back(
          stepwise_confidence_set(sys, config.kappa[h], config.radius));
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(h) + ": " + e.what());
    }
  }

  RewardRecovery out;
  out.samples.reserve(1 + config.random_members);
  out.samples.push_back(
      backward_pass(features, policies, sets, transitions, config, nullptr));
  for (std::size_t k = 0; k < config.random_members; ++k) {
    CounterRng rng = CounterRng::stream(config.seed, k, 0x6d656d62ULL);
    out.samples.push_back(
        backward_pass(features, policies, sets, transitions, config, &rng));
  }
  out.sets = std::move(sets);
  return out;
}

RewardRecovery recover_rewards(
    const EpisodeDataset& data, const StateActionFeatures& features,
    const RecoveryConfig& config) {
  const EmpiricalStageQRE freq =
      frequency_estimate_markov(data, features.S, features.m, features.n);
  std::vector<Vector> weights(static_cast<std::size_t>(data.H));
  for (int h = 0; h < data.H; ++h) {
    weights[h] = Vector::Zero(features.S);
    for (int s = 0; s < features.S; ++s) {
      weights[h][s] = freq.visited(h, s) ? 1.0 : 0.0;
    }
  }
  return recover_rewards_from(
      features, freq.policies, weights,
      ridge_transitions(data, features, config.lambda), config);
}

// ---------------------------------------------------------------------------
// Softmax policies and MLE

SoftmaxFeatures::SoftmaxFeatures(int states, int action_count, Matrix rows)
    : S(states),
      actions(action_count),
      dim(static_cast<int>(rows.cols())),
      table(std::move(rows)) {
  if (table.rows() != static_cast<Eigen::Index>(S) * actions) {
    throw DimensionError("softmax features need S * actions rows");
  }
}

double SoftmaxFeatures::max_norm() const {
  return table.size() == 0 ? 0.0 : table.rowwise().norm().maxCoeff();
}

SoftmaxFeatures one_hot_action_features(int S, int actions, double K) {
  Matrix rows = Matrix::Zero(static_cast<Eigen::Index>(S) * actions, actions);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < actions; ++a) rows(s * actions + a, a) = K;
  }
  return SoftmaxFeatures(S, actions, std::move(rows));
}

SoftmaxFeatures saturated_features(int S, int actions, double K) {
  const Eigen::Index size = static_cast<Eigen::Index>(S) * actions;
  return SoftmaxFeatures(S, actions, K * Matrix::Identity(size, size));
}

Vector softmax_policy(const SoftmaxFeatures& features, const Vector& param,
                      int s) {
  return softmax(features.block(s) * param);
}

StagePolicies SoftmaxPolicyModel::policies() const {
  StagePolicies out(vartheta.size(), std::vector<PolicyPair>(psi_a.S));
  for (std::size_t h = 0; h < vartheta.size(); ++h) {
    for (int s = 0; s < psi_a.S; ++s) {
      out[h][s] = {softmax_policy(psi_a, vartheta[h], s),
                   softmax_policy(psi_b, zeta[h], s)};
    }
  }
  return out;
}

double softmax_nll(const SoftmaxFeatures& features, const Matrix& counts,
                   const Vector& param) {
  const double total = counts.sum();
  if (!(total > 0.0)) throw std::invalid_argument("MLE needs data");
  double nll = 0.0;
  for (int s = 0; s < features.S; ++s) {
    const double ns = counts.row(s).sum();
    if (ns == 0.0) continue;
    const Vector logits = features.block(s) * param;
    nll += ns * log_sum_exp(logits) - counts.row(s).dot(logits);
  }
  return nll / total;
}

namespace {

Vector nll_gradient(const SoftmaxFeatures& features, const Matrix& counts,
                    const Vector& param, double total) {
  Vector grad = Vector::Zero(features.dim);
  for (int s = 0; s < features.S; ++s) {
    const double ns = counts.row(s).sum();
    if (ns == 0.0) continue;
    const Vector pi = softmax(features.block(s) * param);
    grad += features.block(s).transpose() *
            (ns * pi - counts.row(s).transpose());
  }
  return grad / total;
}

Vector project_ball(Vector v, double radius) {
  const double norm = v.norm();
  if (norm > radius) v *= radius / norm;
  return v;
}

}  // namespace

MleResult mle_fit(const SoftmaxFeatures& features, const Matrix& counts,
                  const MleOptions& options) {
  if (counts.rows() != features.S || counts.cols() != features.actions) {
    throw DimensionError("MLE counts must be S x actions");
  }
  const double total = counts.sum();
  if (!(total > 0.0)) throw std::invalid_argument("MLE needs data");

  MleResult out;
  out.param = Vector::Zero(features.dim);
  const double K = features.max_norm();
  if (K == 0.0) {
    out.converged = true;
    if (options.record_trace) {
      out.objective_trace.push_back(softmax_nll(features, counts, out.param));
    }
    return out;
  }
  const double L = K * K;
  if (options.record_trace) {
    out.objective_trace.push_back(softmax_nll(features, counts, out.param));
  }
  for (out.iterations = 0; out.iterations < options.max_iter;
       ++out.iterations) {
    const Vector grad = nll_gradient(features, counts, out.param, total);
    Vector next = project_ball(out.param - grad / L, options.radius);
    out.gradient_mapping_norm = L * (next - out.param).norm();
    if (out.gradient_mapping_norm <= options.tol) {
      out.converged = true;
      return out;
    }
    out.param = std::move(next);
    if (options.record_trace) {
      out.objective_trace.push_back(softmax_nll(features, counts, out.param));
    }
  }
  return out;
}

MleResult mle_fit(const EpisodeDataset& data, const SoftmaxFeatures& features,
                  int step, Player player, const MleOptions& options) {
  if (step < 0 || step >= data.H) {
    throw std::out_of_range("mle_fit: step out of range");
  }
  Matrix counts = Matrix::Zero(features.S, features.actions);
  for (int t = 0; t < data.T; ++t) {
    const StepRecord& rec = data.at(t, step);
    const int action = player == Player::kRow ? rec.action_a : rec.action_b;
    if (rec.state >= features.S || action >= features.actions) {
      throw std::out_of_range("mle_fit: dataset index out of range");
    }
    counts(rec.state, action) += 1.0;
  }
  return mle_fit(features, counts, options);
}

MleRecovery recover_rewards_mle(const EpisodeDataset& data,
                                const StateActionFeatures& features,
                                const SoftmaxFeatures& psi_a,
                                const SoftmaxFeatures& psi_b,
                                const RecoveryConfig& config,
                                const MleOptions& mle_options) {
  MleRecovery out;
  out.model.psi_a = psi_a;
  out.model.psi_b = psi_b;
  for (int h = 0; h < data.H; ++h) {
    out.fits_a.push_back(mle_fit(data, psi_a, h, Player::kRow, mle_options));
    out.fits_b.push_back(
        mle_fit(data, psi_b, h, Player::kColumn, mle_options));
    out.model.vartheta.push_back(out.fits_a.back().param);
    out.model.zeta.push_back(out.fits_b.back().param);
  }
  out.recovery = recover_rewards_from(
      features, out.model.policies(),
      empirical_state_distribution(data, features.S),
      ridge_transitions(data, features, config.lambda), config);
  return out;
}

double theoretical_kappa_step(const StateActionFeatures& features,
                              const std::vector<PolicyPair>& policies,
                              const std::vector<std::size_t>& counts,
                              double eta, double radius, double delta) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t fewest = *std::min_element(counts.begin(), counts.end());
  if (fewest == 0) return inf;
  const int S = features.S;
  const int m = features.m;
  const int n = features.n;
  const double eps1 = plugin_tv_radius(m, fewest, delta);
  const double eps2 = plugin_tv_radius(n, fewest, delta);
  double min_mu = 1.0;
  double min_nu = 1.0;
  for (const PolicyPair& p : policies) {
    min_mu = std::min(min_mu, p.mu.minCoeff());
    min_nu = std::min(min_nu, p.nu.minCoeff());
  }
  const double gap1 = min_mu - eps1;
  const double gap2 = min_nu - eps2;
  if (gap1 <= 0.0 || gap2 <= 0.0) return inf;
  const DifferencedFeatureNorms norms =
      differenced_feature_norms(features.per_state);
  const double e2 = eta * eta;
  return 2.0 * radius * radius *
             (norms.phi1 * norms.phi1 * eps1 * eps1 +
              norms.phi2 * norms.phi2 * eps2 * eps2) +
         2.0 * S * m * eps1 * eps1 / (e2 * gap1 * gap1) +
         2.0 * S * n * eps2 * eps2 / (e2 * gap2 * gap2);
}

}  // namespace qre
