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
#include "qre/synthetic.hpp"

#include <cmath>

namespace qre {

namespace {

Vector normal_vector(int size, CounterRng& rng) {
  Vector v(size);
  for (int i = 0; i < size; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

Vector random_distribution(int size, CounterRng& rng) {
  Vector v(size);
  for (int i = 0; i < size; ++i) v[i] = rng.exponential();
  return v / v.sum();
}

MatrixFeatures gaussian_unit_features(int m, int n, int d, CounterRng& rng,
                                      int rank) {
  if (rank < 0 || rank > d) rank = d;
  Matrix basis = Matrix::Identity(d, d);
  if (rank < d) {
    Matrix g(d, rank);
    for (int j = 0; j < rank; ++j) g.col(j) = normal_vector(d, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    basis = qr.householderQ() * Matrix::Identity(d, rank);
  }
  Matrix table(static_cast<Eigen::Index>(m) * n, d);
  for (Eigen::Index row = 0; row < table.rows(); ++row) {
    Vector z = normal_vector(rank, rng);
    z /= z.norm();
    table.row(row) = (basis.leftCols(rank) * z).transpose();
  }
  return MatrixFeatures(m, n, std::move(table));
}

StateActionFeatures simplex_features(int S, int m, int n, int d,
                                     bool state_dependent, CounterRng& rng) {
  auto draw_block = [&] {
    Matrix table(static_cast<Eigen::Index>(m) * n, d);
    for (Eigen::Index row = 0; row < table.rows(); ++row) {
      Vector z = normal_vector(d, rng).cwiseAbs();
      table.row(row) = (z / z.sum()).transpose();
    }
    return MatrixFeatures(m, n, std::move(table));
  };
  std::vector<MatrixFeatures> blocks;
  blocks.reserve(S);
  if (state_dependent) {
    for (int s = 0; s < S; ++s) blocks.push_back(draw_block());
  } else {
    blocks.assign(S, draw_block());
  }
  return StateActionFeatures(std::move(blocks));
}

LinearMDPModel make_linear_mdp(int S, int m, int n, int H, int d,
                               const std::vector<Vector>& omega,
                               bool state_dependent, CounterRng& rng) {
  if (static_cast<int>(omega.size()) != H) {
    throw DimensionError("need one reward parameter per step");
  }
  LinearMDPModel model;
  model.features = simplex_features(S, m, n, d, state_dependent, rng);
  model.omega = omega;
  model.transition_map.reserve(H);
  for (int h = 0; h < H; ++h) {
    if (omega[h].size() != d) throw DimensionError("omega_h must have length d");
    Matrix pi(S, d);
    for (int k = 0; k < d; ++k) pi.col(k) = random_distribution(S, rng);
    model.transition_map.push_back(std::move(pi));
  }
  return model;
}

QLinearInstance make_q_linear_instance(int S, int m, int n, int H, int d,
                                       double gamma, double eta,
                                       CounterRng& rng,
                                       const QreSolverOptions& options) {
  QLinearInstance out;
  std::vector<MatrixFeatures> blocks;
  blocks.reserve(S);
  for (int s = 0; s < S; ++s) {
    blocks.push_back(gaussian_unit_features(m, n, d, rng));
  }
  out.features = StateActionFeatures(std::move(blocks));
  out.theta.resize(H);
  for (int h = 0; h < H; ++h) out.theta[h] = normal_vector(d, rng);

  MarkovGameSpec& spec = out.spec;
  spec.S = S;
  spec.m = m;
  spec.n = n;
  spec.H = H;
  spec.gamma = gamma;
  spec.eta = eta;
  spec.rewards.assign(H, StateMatrices(S));
  spec.transition.assign(H, std::vector<Matrix>(S));
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      Matrix p(static_cast<Eigen::Index>(m) * n, S);
      for (Eigen::Index row = 0; row < p.rows(); ++row) {
        p.row(row) = random_distribution(S, rng).transpose();
      }
      spec.transition[h][s] = std::move(p);
    }
  }

  // Solve forward quantities from the prescribed Q and back out rewards.
  out.solution.policies.assign(H, std::vector<PolicyPair>(S));
  out.solution.values.Q = q_from_parameters(out.features, out.theta);
  out.solution.values.V.assign(H, Vector::Zero(S));
  Vector next_value = Vector::Zero(S);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      const Matrix& q = out.solution.values.Q[h][s];
      out.solution.policies[h][s] = solve_qre(MatrixGameSpec{q, eta}, options);
      out.solution.values.V[h][s] =
          stage_value(q, out.solution.policies[h][s], eta);
      spec.rewards[h][s] = q - gamma * spec.expected_next(h, s, next_value);
    }
    next_value = out.solution.values.V[h];
  }
  return out;
}

}  // namespace qre
