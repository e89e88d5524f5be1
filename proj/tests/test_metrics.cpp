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
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qre/experiment.hpp"
#include "qre/inverse_matrix.hpp"
#include "qre/metrics.hpp"
#include "qre/prob.hpp"
#include "qre/sampling.hpp"
#include "qre/synthetic.hpp"

using namespace qre;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

StepTensor random_rewards(int H, int S, int m, int n, CounterRng& rng) {
  StepTensor r(H, StateMatrices(S));
  for (auto& step : r) {
    for (Matrix& block : step) {
      block.resize(m, n);
      for (Eigen::Index i = 0; i < block.size(); ++i) {
        block.data()[i] = rng.normal();
      }
    }
  }
  return r;
}

}  // namespace

TEST_CASE("tv examples") {
  CHECK(tv(vec({0.3, 0.7}), vec({0.3, 0.7})) == 0.0);
  CHECK(tv(vec({1, 0}), vec({0, 1})) == 1.0);
  CHECK(tv(vec({0.7, 0.3}), vec({0.5, 0.5})) == doctest::Approx(0.2));
  CHECK_THROWS_AS(tv(vec({1, 0}), vec({1, 0, 0})), DimensionError);
}

TEST_CASE("hellinger examples") {
  CHECK(hellinger_sq(vec({0.3, 0.7}), vec({0.3, 0.7})) == 0.0);
  CHECK(hellinger_sq(vec({1, 0}), vec({0, 1})) == 1.0);
  CHECK_THROWS_AS(hellinger_sq(vec({1, 0}), vec({1, 0, 0})), DimensionError);
}

TEST_CASE("tv <= sqrt(2) H and both are metrics on random triples") {
  CounterRng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const int size = 2 + k % 7;
    const Vector p = random_distribution(size, rng);
    const Vector q = random_distribution(size, rng);
    const Vector r = random_distribution(size, rng);
    CHECK(tv(p, q) <= std::sqrt(2.0) * std::sqrt(hellinger_sq(p, q)) + 1e-15);
    CHECK(tv(p, q) == tv(q, p));
    CHECK(hellinger_sq(p, q) == doctest::Approx(hellinger_sq(q, p)));
    CHECK(tv(p, r) <= tv(p, q) + tv(q, r) + 1e-15);
    const double hpr = std::sqrt(hellinger_sq(p, r));
    CHECK(hpr <= std::sqrt(hellinger_sq(p, q)) + std::sqrt(hellinger_sq(q, r)) +
                     1e-15);
    CHECK(tv(p, q) >= 0.0);
    CHECK(tv(p, q) <= 1.0);
    CHECK(hellinger_sq(p, q) >= 0.0);
    CHECK(hellinger_sq(p, q) <= 1.0);
  }
}

TEST_CASE("reward metric D examples") {
  CounterRng rng(2);
  const StepTensor r = random_rewards(3, 2, 2, 3, rng);
  CHECK(reward_metric_D(r, r) == 0.0);
  StepTensor moved = r;
  moved[2][1](1, 2) -= 0.75;
  CHECK(reward_metric_D(r, moved) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(reward_metric_D(moved, r) == reward_metric_D(r, moved));
  StepTensor shorter = r;
  shorter.pop_back();
  CHECK_THROWS_AS(reward_metric_D(r, shorter), DimensionError);
}

TEST_CASE("reward metric D1 examples") {
  CounterRng rng(3);
  const StepTensor r = random_rewards(2, 3, 2, 2, rng);
  const std::vector<Vector> rho(2, uniform_distribution(3));
  CHECK(reward_metric_D1(r, r, rho) == 0.0);
  const StepTensor other = random_rewards(2, 3, 2, 2, rng);
  const std::vector<Vector> point(2, vec({0, 1, 0}));
  double expect = 0.0;
  for (int h = 0; h < 2; ++h) {
    expect = std::max(expect, (r[h][1] - other[h][1]).cwiseAbs().maxCoeff());
  }
  CHECK(reward_metric_D1(r, other, point) == doctest::Approx(expect));
}

TEST_CASE("D1 <= D on random reward pairs") {
  CounterRng rng(4);
  for (int k = 0; k < 1000; ++k) {
    const StepTensor a = random_rewards(2, 3, 2, 3, rng);
    const StepTensor b = random_rewards(2, 3, 2, 3, rng);
    const std::vector<Vector> rho{random_distribution(3, rng),
                                  random_distribution(3, rng)};
    const double d = reward_metric_D(a, b);
    CHECK(d > 0.0);
    CHECK(reward_metric_D1(a, b, rho) <= d + 1e-15);
  }
}

TEST_CASE("frobenius error sums the squared block norms") {
  StepTensor a(1, StateMatrices(2, Matrix::Zero(2, 2)));
  StepTensor b = a;
  b[0][0](0, 0) = 3.0;
  b[0][1](1, 1) = 4.0;
  CHECK(frobenius_error(a, b) == doctest::Approx(5.0));
}

TEST_CASE("qre discrepancy vanishes on the true and shifted payoffs") {
  CounterRng rng(5);
  const MatrixFeatures f = gaussian_unit_features(4, 6, 2, rng);
  const Matrix q = payoff_from_features(f, vec({0.8, -0.6}));
  const PolicyPair star = solve_qre({q, 0.5});
  CHECK(qre_discrepancy(q, star, 0.5) <= 2e-12);
  CHECK(qre_discrepancy((q.array() + 3.0).matrix(), star, 0.5) <= 2e-12);
  CHECK(qre_discrepancy(-q, star, 0.5) > 0.01);
}

TEST_CASE("Setup II discrepancy at N = 1e6 has median <= 1e-2") {
  const ExperimentConfig config = preset(ExperimentKind::kSetup2);
  CounterRng model = model_stream(config, 0);
  const MatrixInstance inst = build_matrix_instance(config, model);
  std::vector<double> errors;
  for (int rep = 0; rep < 20; ++rep) {
    const EmpiricalQRE e = frequency_estimate_matrix(
        sample_matrix_actions(inst.qre, 1000000, 4000 + rep), 6, 6);
    const ConfidenceSet cs = build_confidence_set(
        inst.features, e.policies, 0.5, surrogate_kappa(1000000), 4.0);
    const Vector theta = cs.min_norm_member().point;
    errors.push_back(qre_discrepancy(reconstruct_payoff(theta, inst.features),
                                     inst.qre, 0.5));
  }
  std::nth_element(errors.begin(), errors.begin() + 10, errors.end());
  CHECK(errors[10] <= 1e-2);
}

TEST_CASE("Markov discrepancy ignores states that are never visited") {
  CounterRng rng(6);
  MarkovGameSpec spec;
  spec.S = 3;
  spec.m = 2;
  spec.n = 3;
  spec.H = 3;
  spec.eta = 0.7;
  spec.rewards = random_rewards(3, 3, 2, 3, rng);
  spec.transition.assign(3, std::vector<Matrix>(3));
  for (int h = 0; h < 3; ++h) {
    for (int s = 0; s < 3; ++s) {
      Matrix p = Matrix::Zero(6, 3);
      for (int k = 0; k < 6; ++k) {
        p.row(k).head(2) = random_distribution(2, rng).transpose();
      }
      spec.transition[h][s] = p;
    }
  }
  const MarkovSolution sol = backward_qre(spec);
  const VisitDistributions d =
      visit_distributions(spec, sol.policies, vec({0.5, 0.5, 0.0}));
  for (int h = 0; h < 3; ++h) REQUIRE(d.state[h][2] == 0.0);

  const MarkovQreDiscrepancy exact =
      markov_qre_discrepancy(spec, spec.rewards, sol.policies, d.state);
  CHECK(exact.mean <= 1e-10);
  REQUIRE(exact.per_step.size() == 3);

  StepTensor estimate = spec.rewards;
  estimate[0][0](1, 1) += 0.5;
  const MarkovQreDiscrepancy base =
      markov_qre_discrepancy(spec, estimate, sol.policies, d.state);
  CHECK(base.mean > 0.0);
  for (int h = 0; h < 3; ++h) estimate[h][2].array() += 10.0 * (h + 1);
  estimate[1][2](0, 0) = -40.0;
  const MarkovQreDiscrepancy moved =
      markov_qre_discrepancy(spec, estimate, sol.policies, d.state);
  CHECK(moved.mean == doctest::Approx(base.mean).epsilon(1e-9));
  double sum = 0.0;
  for (double v : moved.per_step) sum += v;
  CHECK(moved.mean == doctest::Approx(sum / 3.0));
}
