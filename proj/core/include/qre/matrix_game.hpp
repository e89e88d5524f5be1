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
#ifndef QRE_MATRIX_GAME_HPP_
#define QRE_MATRIX_GAME_HPP_

#include <cstddef>

#include "qre/types.hpp"

namespace qre {

// Entropy-regularized two-player zero-sum matrix game
//
//   max_mu min_nu  mu' Q nu + H(mu) / eta - H(nu) / eta
//
// The row player maximizes. Actions are 0-based; action 0 is the baseline
// action used by the inverse machinery.
struct MatrixGameSpec {
  Matrix payoff;
  double eta = 1.0;

  Eigen::Index rows() const { return payoff.rows(); }
  Eigen::Index cols() const { return payoff.cols(); }

  // Throws DimensionError / std::invalid_argument when m < 2, n < 2,
  // eta <= 0 or a payoff entry is not finite.
  void validate() const;
};

struct PolicyPair {
  Vector mu;  // row player, length m
  Vector nu;  // column player, length n
};

// Feature table phi(a, b) in R^d, stored row-major in (a, b): row a * n + b.
struct MatrixFeatures {
  int m = 0;
  int n = 0;
  int d = 0;
  Matrix table;

  MatrixFeatures() = default;
  MatrixFeatures(int m_actions, int n_actions, Matrix rows);

  Eigen::Index index(int a, int b) const { return a * n + b; }
  Vector phi(int a, int b) const { return table.row(index(a, b)).transpose(); }
  // Largest Euclidean norm over all feature vectors.
  double max_norm() const;
};

// Linear payoff model Q(a, b) = <phi(a, b), theta> with |theta|^2 <= bound.
struct FeatureModel {
  MatrixFeatures features;
  Vector theta;
  double norm_bound_sq = 1.0;
};

Matrix payoff_from_features(const MatrixFeatures& features,
                            const Vector& theta);
Matrix payoff_from_features(const FeatureModel& model);

struct QreSolverOptions {
  double tol = 1e-12;
  std::size_t max_iter = 100000;
  // Initial damping of the logit update. Halved whenever the residual has
  // not improved for stall_window iterations.
  double damping = 0.5;
  std::size_t stall_window = 50;
};

// Damped fixed-point iteration in logit space on
//   mu = softmax(eta Q nu),  nu = softmax(-eta Q' mu).
// Returns once qre_residual <= tol; throws ConvergenceError otherwise.
PolicyPair solve_qre(const MatrixGameSpec& spec,
                     const QreSolverOptions& options = {});

// Sup-norm gap between both sides of the QRE fixed-point equations.
double qre_residual(const MatrixGameSpec& spec, const PolicyPair& policies);

// mu' Q nu + H(mu) / eta - H(nu) / eta.
double game_value(const MatrixGameSpec& spec, const PolicyPair& policies);

// Softmax responses to an opponent policy.
Vector row_response(const Matrix& payoff, double eta, const Vector& nu);
Vector column_response(const Matrix& payoff, double eta, const Vector& mu);

}  // namespace qre

#endif  // QRE_MATRIX_GAME_HPP_
