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
#ifndef QRE_SAMPLING_HPP_
#define QRE_SAMPLING_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "qre/markov_game.hpp"
#include "qre/matrix_game.hpp"
#include "qre/rng.hpp"

namespace qre {

struct MatrixDataset {
  std::vector<std::pair<int, int>> pairs;  // (a, b), 0-based
  std::size_t size() const { return pairs.size(); }
};

// N i.i.d. draws a ~ mu, b ~ nu.
MatrixDataset sample_matrix_actions(const PolicyPair& policies, std::size_t N,
                                    CounterRng& rng);
MatrixDataset sample_matrix_actions(const PolicyPair& policies, std::size_t N,
                                    std::uint64_t seed);

struct EmpiricalQRE {
  PolicyPair policies;
  std::size_t samples = 0;
};

EmpiricalQRE frequency_estimate_matrix(const MatrixDataset& data, int m, int n);

struct StepRecord {
  int state = 0;
  int action_a = 0;
  int action_b = 0;
  int next_state = 0;
};

// T episodes of exactly H steps, stored episode-major.
struct EpisodeDataset {
  int T = 0;
  int H = 0;
  std::vector<StepRecord> records;

  const StepRecord& at(int episode, int step) const {
    return records[static_cast<std::size_t>(episode) * H + step];
  }
  StepRecord& at(int episode, int step) {
    return records[static_cast<std::size_t>(episode) * H + step];
  }
};

// s_1 ~ initial, then a ~ mu_h(.|s), b ~ nu_h(.|s), s' ~ P_h(.|s, a, b).
EpisodeDataset sample_episodes(const MarkovGameSpec& spec,
                               const StagePolicies& policies,
                               const Vector& initial, int T, CounterRng& rng);
EpisodeDataset sample_episodes(const MarkovGameSpec& spec,
                               const StagePolicies& policies,
                               const Vector& initial, int T,
                               std::uint64_t seed);

// Per-step, per-state conditional action frequencies. States never visited
// at a step carry uniform policies and a zero count.
struct EmpiricalStageQRE {
  StagePolicies policies;                        // [h][s]
  std::vector<std::vector<std::size_t>> counts;  // N_h(s)

  bool visited(int h, int s) const { return counts[h][s] > 0; }
};

EmpiricalStageQRE frequency_estimate_markov(const EpisodeDataset& data, int S,
                                            int m, int n);

// rho_h(s) = (1 / T) sum_t 1{s_h^t = s}.
std::vector<Vector> empirical_state_distribution(const EpisodeDataset& data,
                                                 int S);

// A matrix-game sample viewed as T = N episodes of one step in one state.
EpisodeDataset as_episode_dataset(const MatrixDataset& data);
MatrixDataset as_matrix_dataset(const EpisodeDataset& data);

// Line format: header "episode,step,state,action_a,action_b,next_state",
// then one row per step, 0-based decimal integers, episode-major order.
inline constexpr const char* kDatasetHeader =
    "episode,step,state,action_a,action_b,next_state";

void write_dataset(std::ostream& out, const EpisodeDataset& data);
// Throws std::runtime_error on a malformed header or row, or when episodes
// have different lengths or are out of order.
EpisodeDataset read_dataset(std::istream& in);

}  // namespace qre

#endif  // QRE_SAMPLING_HPP_
