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
#ifndef QRE_MARKOV_GAME_HPP_
#define QRE_MARKOV_GAME_HPP_

#include <vector>

#include "qre/matrix_game.hpp"
#include "qre/types.hpp"

namespace qre {

// Per-state m x n matrices, indexed [s].
using StateMatrices = std::vector<Matrix>;
// Per-step, per-state m x n matrices, indexed [h][s]. Used for rewards,
// Q-functions and transition expectations.
using StepTensor = std::vector<StateMatrices>;

// Finite-horizon entropy-regularized zero-sum Markov game. Steps are 0-based
// (h = 0 .. H-1) and the value after the last step is zero.
struct MarkovGameSpec {
  int S = 0;
  int m = 0;
  int n = 0;
  int H = 0;
  double gamma = 1.0;
  double eta = 1.0;
  StepTensor rewards;  // [h][s] is m x n
  // [h][s] is (m * n) x S; row a * n + b is P_h(. | s, a, b).
  std::vector<std::vector<Matrix>> transition;

  void validate() const;
  // sum_{s'} P_h(s' | s, a, b) v(s') as an m x n matrix.
  Matrix expected_next(int h, int s, const Vector& v) const;
};

// Stage policies, indexed [h][s].
using StagePolicies = std::vector<std::vector<PolicyPair>>;

struct ValueFunctions {
  StepTensor Q;           // [h][s] m x n
  std::vector<Vector> V;  // [h] length S; V_H == 0 is implicit
};

struct MarkovSolution {
  StagePolicies policies;
  ValueFunctions values;
};

// Backward induction: Q_h = r_h + gamma E V_{h+1}, stage QRE per state,
// V_h(s) = mu' Q_h(s) nu + H(mu) / eta - H(nu) / eta. Solver failures are
// rethrown as ConvergenceError naming (h, s).
MarkovSolution backward_qre(const MarkovGameSpec& spec,
                            const QreSolverOptions& options = {});

// Entropy-regularized stage value for a given Q matrix and stage policies.
double stage_value(const Matrix& q, const PolicyPair& policies, double eta);

struct VisitDistributions {
  std::vector<Vector> state;  // [h] length S
  // [h][s] is m x n with entries d_h(s) mu_h(a|s) nu_h(b|s).
  StepTensor state_action;
};

VisitDistributions visit_distributions(const MarkovGameSpec& spec,
                                       const StagePolicies& policies,
                                       const Vector& initial);

struct WellPosedness {
  bool well_posed = false;
  double min_visit = 0.0;
};

// True iff min over (h, s) of d_h(s) >= c.
WellPosedness check_well_posedness(const std::vector<Vector>& state_dists,
                                   double c);

// State-action features phi(s, a, b) in R^d, one MatrixFeatures per state.
struct StateActionFeatures {
  int S = 0;
  int m = 0;
  int n = 0;
  int d = 0;
  std::vector<MatrixFeatures> per_state;

  StateActionFeatures() = default;
  explicit StateActionFeatures(std::vector<MatrixFeatures> blocks);

  Vector phi(int s, int a, int b) const { return per_state[s].phi(a, b); }
  double max_norm() const;
};

// Linear MDP: r_h(s,a,b) = <phi, omega_h> and P_h(.|s,a,b) = Pi_h phi with
// Pi_h an S x d matrix.
struct LinearMDPModel {
  StateActionFeatures features;
  std::vector<Vector> omega;           // [h] length d
  std::vector<Matrix> transition_map;  // [h] S x d

  int horizon() const { return static_cast<int>(omega.size()); }
  MarkovGameSpec to_spec(double gamma, double eta) const;
  // theta_h = omega_h + gamma Pi_h' V_{h+1}; Q_h = <phi, theta_h> exactly.
  std::vector<Vector> q_parameters(const ValueFunctions& values,
                                   double gamma) const;
};

// Q_h(s, a, b) = <phi(s, a, b), theta_h> for every step.
StepTensor q_from_parameters(const StateActionFeatures& features,
                             const std::vector<Vector>& theta);

}  // namespace qre

#endif  // QRE_MARKOV_GAME_HPP_
