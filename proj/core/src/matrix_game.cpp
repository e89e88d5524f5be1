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
#include "qre/matrix_game.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qre/prob.hpp"

namespace qre {

void MatrixGameSpec::validate() const {
  if (payoff.rows() < 2 || payoff.cols() < 2) {
    throw DimensionError("matrix game needs at least two actions per player");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("eta must be a positive finite number");
  }
  if (!payoff.allFinite()) {
    throw std::invalid_argument("payoff entries must be finite");
  }
}

MatrixFeatures::MatrixFeatures(int m_actions, int n_actions, Matrix rows)
    : m(m_actions), n(n_actions), d(static_cast<int>(rows.cols())),
      table(std::move(rows)) {
  if (table.rows() != static_cast<Eigen::Index>(m) * n) {
    throw DimensionError("feature table must have m * n rows");
  }
}

double MatrixFeatures::max_norm() const {
  return table.rows() == 0 ? 0.0 : table.rowwise().norm().maxCoeff();
}

Matrix payoff_from_features(const MatrixFeatures& features,
                            const Vector& theta) {
  if (theta.size() != features.d) {
    throw DimensionError("theta has dimension " + std::to_string(theta.size()) +
                         ", features have dimension " +
                         std::to_string(features.d));
  }
  const Vector flat = features.table * theta;
  Matrix q(features.m, features.n);
  for (int a = 0; a < features.m; ++a) {
    for (int b = 0; b < features.n; ++b) q(a, b) = flat[features.index(a, b)];
  }
  return q;
}

Matrix payoff_from_features(const FeatureModel& model) {
  return payoff_from_features(model.features, model.theta);
}

Vector row_response(const Matrix& payoff, double eta, const Vector& nu) {
  return softmax(eta * (payoff * nu));
}

Vector column_response(const Matrix& payoff, double eta, const Vector& mu) {
  return softmax(-eta * (payoff.transpose() * mu));
}

double qre_residual(const MatrixGameSpec& spec, const PolicyPair& policies) {
  if (policies.mu.size() != spec.rows() || policies.nu.size() != spec.cols()) {
    throw DimensionError("policy sizes do not match the payoff matrix");
  }
  const Vector mu_rhs = row_response(spec.payoff, spec.eta, policies.nu);
  const Vector nu_rhs = column_response(spec.payoff, spec.eta, policies.mu);
  return std::max((mu_rhs - policies.mu).lpNorm<Eigen::Infinity>(),
                  (nu_rhs - policies.nu).lpNorm<Eigen::Infinity>());
}

double game_value(const MatrixGameSpec& spec, const PolicyPair& policies) {
  if (policies.mu.size() != spec.rows() || policies.nu.size() != spec.cols()) {
    throw DimensionError("policy sizes do not match the payoff matrix");
  }
  return policies.mu.dot(spec.payoff * policies.nu) +
         (entropy(policies.mu) - entropy(policies.nu)) / spec.eta;
}

PolicyPair solve_qre(const MatrixGameSpec& spec,
                     const QreSolverOptions& options) {
  spec.validate();
  if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");

  const Matrix& q = spec.payoff;
  const double eta = spec.eta;
  Vector row_logits = Vector::Zero(q.rows());
  Vector col_logits = Vector::Zero(q.cols());
  PolicyPair current{softmax(row_logits), softmax(col_logits)};

  double alpha = options.damping;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  double residual = best;

  for (std::size_t it = 0; it < options.max_iter; ++it) {
    const Vector row_target = eta * (q * current.nu);
    const Vector col_target = -eta * (q.transpose() * current.mu);
    residual =
        std::max((softmax(row_target) - current.mu).lpNorm<Eigen::Infinity>(),
                 (softmax(col_target) - current.nu).lpNorm<Eigen::Infinity>());
    if (residual <= options.tol) return current;

    if (residual < best) {
      best = residual;
      since_best = 0;
    } else if (++since_best >= options.stall_window) {
      // The damped map spirals around the saddle point; a smaller step
      // restores contraction when eta * |Q| is large.
      alpha = std::max(alpha * 0.5, 1e-6);
      since_best = 0;
    }

    row_logits = (1.0 - alpha) * row_logits + alpha * row_target;
    col_logits = (1.0 - alpha) * col_logits + alpha * col_target;
    current.mu = softmax(row_logits);
    current.nu = softmax(col_logits);
  }
  throw ConvergenceError("solve_qre did not converge: residual " +
                             std::to_string(residual),
                         residual, options.max_iter);
}

}  // namespace qre
