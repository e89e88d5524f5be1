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
#ifndef QRE_SYNTHETIC_HPP_
#define QRE_SYNTHETIC_HPP_

#include <vector>

#include "qre/markov_game.hpp"
#include "qre/matrix_game.hpp"
#include "qre/rng.hpp"

namespace qre {

// phi(a, b) with i.i.d. standard normal entries scaled to unit norm. When
// rank < d the draws live in a seeded rank-dimensional subspace of R^d
// (phi = P z with P orthonormal), which makes every QRE linear system rank
// deficient by d - rank.
MatrixFeatures gaussian_unit_features(int m, int n, int d, CounterRng& rng,
                                      int rank = -1);

// phi(s, a, b) = |z| / sum |z| with z standard normal, so each feature is a
// point of the probability simplex. With state_dependent == false the same
// phi(a, b) is used in every state.
StateActionFeatures simplex_features(int S, int m, int n, int d,
                                     bool state_dependent, CounterRng& rng);

// Exact linear MDP on simplex features. Each column of Pi_h is a
// Dirichlet(1) distribution over states, so Pi_h phi is a distribution.
LinearMDPModel make_linear_mdp(int S, int m, int n, int H, int d,
                               const std::vector<Vector>& omega,
                               bool state_dependent, CounterRng& rng);

// Game whose Q-functions are exactly linear in Gaussian unit features while
// transitions are arbitrary Dirichlet(1) kernels. Rewards are defined
// backward as r_h = Q_h - gamma P_h V_{h+1}. The stepwise systems are full
// rank for generic draws, unlike an exact linear MDP whose constant
// functional Pi_h' 1 always lies in their null space.
struct QLinearInstance {
  MarkovGameSpec spec;
  StateActionFeatures features;
  std::vector<Vector> theta;  // [h]
  MarkovSolution solution;
};

QLinearInstance make_q_linear_instance(int S, int m, int n, int H, int d,
                                       double gamma, double eta,
                                       CounterRng& rng,
                                       const QreSolverOptions& options = {});

// Dirichlet(1) draw of the given length.
Vector random_distribution(int size, CounterRng& rng);

}  // namespace qre

#endif  // QRE_SYNTHETIC_HPP_
