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
#include <benchmark/benchmark.h>

#include <vector>

#include "qre/experiment.hpp"
#include "qre/inverse_markov.hpp"
#include "qre/inverse_matrix.hpp"
#include "qre/markov_game.hpp"
#include "qre/matrix_game.hpp"
#include "qre/sampling.hpp"
#include "qre/synthetic.hpp"

namespace {

using namespace qre;

void BM_SolveQre(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  CounterRng rng(1);
  Matrix q(size, size);
  for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = rng.normal();
  const MatrixGameSpec spec{q, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(solve_qre(spec));
}
BENCHMARK(BM_SolveQre)->Arg(2)->Arg(8)->Arg(32);

void BM_BackwardQre(benchmark::State& state) {
  const ExperimentConfig config = preset(ExperimentKind::kMarkov);
  CounterRng rng(2);
  const MarkovInstance inst = build_markov_instance(config, rng);
  for (auto _ : state) benchmark::DoNotOptimize(backward_qre(inst.spec));
}
BENCHMARK(BM_BackwardQre);

void BM_ConfidenceSetProjection(benchmark::State& state) {
  const ExperimentConfig config = preset(ExperimentKind::kSetup2);
  CounterRng rng(3);
  const MatrixInstance inst = build_matrix_instance(config, rng);
  const EmpiricalQRE e = frequency_estimate_matrix(
      sample_matrix_actions(inst.qre, 10000, 4), config.m, config.n);
  const ConfidenceSet set = build_confidence_set(
      inst.features, e.policies, config.eta, 0.1, config.bound);
  Vector x = Vector::Constant(config.d, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(set.project(x));
}
BENCHMARK(BM_ConfidenceSetProjection);

void BM_SampleEpisodes(benchmark::State& state) {
  const ExperimentConfig config = preset(ExperimentKind::kMarkov);
  CounterRng rng(5);
  const MarkovInstance inst = build_markov_instance(config, rng);
  const int T = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_episodes(
        inst.spec, inst.solution.policies, inst.initial, T, 6));
  }
  state.SetItemsProcessed(state.iterations() * T * config.H);
}
BENCHMARK(BM_SampleEpisodes)->Arg(10000)->Arg(100000);

void BM_MleFit(benchmark::State& state) {
  const SoftmaxFeatures psi = one_hot_action_features(4, 5, 1.0);
  Matrix counts(4, 5);
  counts << 30, 20, 25, 10, 15, 12, 40, 8, 20, 20, 5, 5, 50, 20, 20, 9, 11, 30,
      30, 20;
  for (auto _ : state) benchmark::DoNotOptimize(mle_fit(psi, counts));
}
BENCHMARK(BM_MleFit);

void BM_MarkovRecovery(benchmark::State& state) {
  const ExperimentConfig config = preset(ExperimentKind::kMarkov);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_single(config, 10000, 0));
  }
}
BENCHMARK(BM_MarkovRecovery)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
