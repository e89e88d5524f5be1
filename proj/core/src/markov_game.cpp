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
#include "qre/markov_game.hpp"

#include <cmath>
#include <string>

#include "qre/prob.hpp"

namespace qre {

void MarkovGameSpec::validate() const {
  if (S < 1 || m < 2 || n < 2 || H < 1) {
    throw DimensionError("Markov game needs S >= 1, m, n >= 2 and H >= 1");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1]");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (static_cast<int>(rewards.size()) != H ||
      static_cast<int>(transition.size()) != H) {
    throw DimensionError("rewards and transitions need one entry per step");
  }
  for (int h = 0; h < H; ++h) {
    if (static_cast<int>(rewards[h].size()) != S ||
        static_cast<int>(transition[h].size()) != S) {
      throw DimensionError("rewards and transitions need one entry per state");
    }
    for (int s = 0; s < S; ++s) {
      if (rewards[h][s].rows() != m || rewards[h][s].cols() != n) {
        throw DimensionError("reward block has the wrong shape");
      }
      const Matrix& p = transition[h][s];
      if (p.rows() != static_cast<Eigen::Index>(m) * n || p.cols() != S) {
        throw DimensionError("transition block has the wrong shape");
      }
      for (Eigen::Index row = 0; row < p.rows(); ++row) {
        if (!is_distribution(p.row(row).transpose(), 1e-12)) {
          throw std::invalid_argument(
              "transition row is not a distribution at step " +
              std::to_string(h) + ", state " + std::to_string(s));
        }
      }
    }
  }
}

Matrix MarkovGameSpec::expected_next(int h, int s, const Vector& v) const {
  const Vector flat = transition[h][s] * v;
  Matrix out(m, n);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < n; ++b) out(a, b) = flat[a * n + b];
  }
  return out;
}

double stage_value(const Matrix& q, const PolicyPair& policies, double eta) {
  return policies.mu.dot(q * policies.nu) +
         (entropy(policies.mu) - entropy(policies.nu)) / eta;
}

MarkovSolution backward_qre(const MarkovGameSpec& spec,
                            const QreSolverOptions& options) {
  spec.validate();
  MarkovSolution out;
  out.policies.assign(spec.H, std::vector<PolicyPair>(spec.S));
  out.values.Q.assign(spec.H, StateMatrices(spec.S));
  out.values.V.assign(spec.H, Vector::Zero(spec.S));

  Vector next_value = Vector::Zero(spec.S);
  for (int h = spec.H - 1; h >= 0; --h) {
    for (int s = 0; s < spec.S; ++s) {
      Matrix q = spec.rewards[h][s];
      if (spec.gamma != 0.0) q += spec.gamma * spec.expected_next(h, s, next_value);
      MatrixGameSpec stage{q, spec.eta};
      try {
        out.policies[h][s] = solve_qre(stage, options);
      } catch (const ConvergenceError& e) {
        throw ConvergenceError(
            "backward_qre: stage QRE failed at step " + std::to_string(h) +
                ", state " + std::to_string(s) + ": " + e.what(),
            e.residual(), e.iterations());
      }
      out.values.V[h][s] = stage_value(q, out.policies[h][s], spec.eta);
      out.values.Q[h][s] = std::move(q);
    }
    next_value = out.values.V[h];
  }
  return out;
}

VisitDistributions visit_distributions(const MarkovGameSpec& spec,
                                       const StagePolicies& policies,
                                       const Vector& initial) {
  if (initial.size() != spec.S) {
    throw DimensionError("initial distribution must have length S");
  }
  VisitDistributions out;
  out.state.assign(spec.H, Vector::Zero(spec.S));
  out.state_action.assign(spec.H, StateMatrices(spec.S));
  Vector current = initial;
  for (int h = 0; h < spec.H; ++h) {
    out.state[h] = current;
    Vector next = Vector::Zero(spec.S);
    for (int s = 0; s < spec.S; ++s) {
      const PolicyPair& pi = policies[h][s];
      Matrix joint = current[s] * (pi.mu * pi.nu.transpose());
      for (int a = 0; a < spec.m; ++a) {
        for (int b = 0; b < spec.n; ++b) {
          const double w = joint(a, b);
          if (w != 0.0) {
            next += w * spec.transition[h][s].row(a * spec.n + b).transpose();
          }
        }
      }
      out.state_action[h][s] = std::move(joint);
    }
    current = next;
  }
  return out;
}

WellPosedness check_well_posedness(const std::vector<Vector>& state_dists,
                                   double c) {
  WellPosedness out;
  if (state_dists.empty()) return out;
  out.min_visit = state_dists.front().minCoeff();
  for (const Vector& d : state_dists) {
    out.min_visit = std::min(out.min_visit, d.minCoeff());
  }
  out.well_posed = out.min_visit >= c;
  return out;
}

StateActionFeatures::StateActionFeatures(std::vector<MatrixFeatures> blocks)
    : per_state(std::move(blocks)) {
  if (per_state.empty()) throw DimensionError("no feature blocks");
  S = static_cast<int>(per_state.size());
  m = per_state.front().m;
  n = per_state.front().n;
  d = per_state.front().d;
  for (const MatrixFeatures& f : per_state) {
    if (f.m != m || f.n != n || f.d != d) {
      throw DimensionError("feature blocks have inconsistent shapes");
    }
  }
}

double StateActionFeatures::max_norm() const {
  double out = 0.0;
  for (const MatrixFeatures& f : per_state) out = std::max(out, f.max_norm());
  return out;
}

MarkovGameSpec LinearMDPModel::to_spec(double gamma, double eta) const {
  MarkovGameSpec spec;
  spec.S = features.S;
  spec.m = features.m;
  spec.n = features.n;
  spec.H = horizon();
  spec.gamma = gamma;
  spec.eta = eta;
  spec.rewards.assign(spec.H, StateMatrices(spec.S));
  spec.transition.assign(spec.H, std::vector<Matrix>(spec.S));
  for (int h = 0; h < spec.H; ++h) {
    if (transition_map[h].rows() != spec.S ||
        transition_map[h].cols() != features.d) {
      throw DimensionError("transition map must be S x d");
    }
    for (int s = 0; s < spec.S; ++s) {
      const MatrixFeatures& f = features.per_state[s];
      spec.rewards[h][s] = payoff_from_features(f, omega[h]);
      spec.transition[h][s] = f.table * transition_map[h].transpose();
    }
  }
  return spec;
}

std::vector<Vector> LinearMDPModel::q_parameters(const ValueFunctions& values,
                                                 double gamma) const {
  const int horizon_len = horizon();
  std::vector<Vector> theta(horizon_len);
  for (int h = 0; h < horizon_len; ++h) {
    theta[h] = omega[h];
    if (h + 1 < horizon_len) {
      theta[h] += gamma * transition_map[h].transpose() * values.V[h + 1];
    }
  }
  return theta;
}

StepTensor q_from_parameters(const StateActionFeatures& features,
                             const std::vector<Vector>& theta) {
  StepTensor q(theta.size(), StateMatrices(features.S));
  for (std::size_t h = 0; h < theta.size(); ++h) {
    for (int s = 0; s < features.S; ++s) {
      q[h][s] = payoff_from_features(features.per_state[s], theta[h]);
    }
  }
  return q;
}

}  // namespace qre
