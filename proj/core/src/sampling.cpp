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
#include "qre/sampling.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qre/prob.hpp"

namespace qre {

namespace {

std::vector<double> cumulative(const Vector& p) {
  std::vector<double> cdf(static_cast<std::size_t>(p.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p[i];
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  return cdf;
}

}  // namespace

MatrixDataset sample_matrix_actions(const PolicyPair& policies, std::size_t N,
                                    CounterRng& rng) {
  const std::vector<double> mu_cdf = cumulative(policies.mu);
  const std::vector<double> nu_cdf = cumulative(policies.nu);
  MatrixDataset out;
  out.pairs.reserve(N);
  for (std::size_t k = 0; k < N; ++k) {
    const int a = rng.sample_cdf(mu_cdf);
    const int b = rng.sample_cdf(nu_cdf);
    out.pairs.emplace_back(a, b);
  }
  return out;
}

MatrixDataset sample_matrix_actions(const PolicyPair& policies, std::size_t N,
                                    std::uint64_t seed) {
  CounterRng rng(seed);
  return sample_matrix_actions(policies, N, rng);
}

EmpiricalQRE frequency_estimate_matrix(const MatrixDataset& data, int m,
                                       int n) {
  if (data.size() == 0) throw std::invalid_argument("empty matrix dataset");
  EmpiricalQRE out;
  out.samples = data.size();
  out.policies.mu = Vector::Zero(m);
  out.policies.nu = Vector::Zero(n);
  for (const auto& [a, b] : data.pairs) {
    if (a < 0 || a >= m || b < 0 || b >= n) {
      throw std::out_of_range("action index out of range");
    }
    out.policies.mu[a] += 1.0;
    out.policies.nu[b] += 1.0;
  }
  out.policies.mu /= static_cast<double>(data.size());
  out.policies.nu /= static_cast<double>(data.size());
  return out;
}

EpisodeDataset sample_episodes(const MarkovGameSpec& spec,
                               const StagePolicies& policies,
                               const Vector& initial, int T, CounterRng& rng) {
  const std::vector<double> init_cdf = cumulative(initial);
  std::vector<std::vector<std::vector<double>>> mu_cdf(spec.H);
  std::vector<std::vector<std::vector<double>>> nu_cdf(spec.H);
  std::vector<std::vector<std::vector<std::vector<double>>>> next_cdf(spec.H);
  for (int h = 0; h < spec.H; ++h) {
    mu_cdf[h].resize(spec.S);
    nu_cdf[h].resize(spec.S);
    next_cdf[h].resize(spec.S);
    for (int s = 0; s < spec.S; ++s) {
      mu_cdf[h][s] = cumulative(policies[h][s].mu);
      nu_cdf[h][s] = cumulative(policies[h][s].nu);
      const Matrix& p = spec.transition[h][s];
      next_cdf[h][s].resize(static_cast<std::size_t>(p.rows()));
      for (Eigen::Index row = 0; row < p.rows(); ++row) {
        next_cdf[h][s][static_cast<std::size_t>(row)] =
            cumulative(p.row(row).transpose());
      }
    }
  }

  EpisodeDataset out;
  out.T = T;
  out.H = spec.H;
  out.records.resize(static_cast<std::size_t>(T) * spec.H);
  for (int t = 0; t < T; ++t) {
    int state = rng.sample_cdf(init_cdf);
    for (int h = 0; h < spec.H; ++h) {
      StepRecord& rec = out.at(t, h);
      rec.state = state;
      rec.action_a = rng.sample_cdf(mu_cdf[h][state]);
      rec.action_b = rng.sample_cdf(nu_cdf[h][state]);
      rec.next_state = rng.sample_cdf(
          next_cdf[h][state][static_cast<std::size_t>(rec.action_a) * spec.n +
                             rec.action_b]);
      state = rec.next_state;
    }
  }
  return out;
}

EpisodeDataset sample_episodes(const MarkovGameSpec& spec,
                               const StagePolicies& policies,
                               const Vector& initial, int T,
                               std::uint64_t seed) {
  CounterRng rng(seed);
  return sample_episodes(spec, policies, initial, T, rng);
}

EmpiricalStageQRE frequency_estimate_markov(const EpisodeDataset& data, int S,
                                            int m, int n) {
  EmpiricalStageQRE out;
  out.policies.assign(data.H, std::vector<PolicyPair>(S));
  out.counts.assign(data.H, std::vector<std::size_t>(S, 0));
  for (int h = 0; h < data.H; ++h) {
    for (int s = 0; s < S; ++s) {
      out.policies[h][s].mu = Vector::Zero(m);
      out.policies[h][s].nu = Vector::Zero(n);
    }
  }
  for (int t = 0; t < data.T; ++t) {
    for (int h = 0; h < data.H; ++h) {
      const StepRecord& rec = data.at(t, h);
      if (rec.state < 0 || rec.state >= S || rec.action_a < 0 ||
          rec.action_a >= m || rec.action_b < 0 || rec.action_b >= n) {
        throw std::out_of_range("dataset index out of range");
      }
      out.policies[h][rec.state].mu[rec.action_a] += 1.0;
      out.policies[h][rec.state].nu[rec.action_b] += 1.0;
      ++out.counts[h][rec.state];
    }
  }
  for (int h = 0; h < data.H; ++h) {
    for (int s = 0; s < S; ++s) {
      PolicyPair& pi = out.policies[h][s];
      if (out.counts[h][s] == 0) {
        pi.mu = uniform_distribution(m);
        pi.nu = uniform_distribution(n);
      } else {
        pi.mu /= static_cast<double>(out.counts[h][s]);
        pi.nu /= static_cast<double>(out.counts[h][s]);
      }
    }
  }
  return out;
}

std::vector<Vector> empirical_state_distribution(const EpisodeDataset& data,
                                                 int S) {
  if (data.T < 1) throw std::invalid_argument("dataset has no episodes");
  std::vector<Vector> rho(data.H, Vector::Zero(S));
  for (int t = 0; t < data.T; ++t) {
    for (int h = 0; h < data.H; ++h) rho[h][data.at(t, h).state] += 1.0;
  }
  for (Vector& r : rho) r /= static_cast<double>(data.T);
  return rho;
}

EpisodeDataset as_episode_dataset(const MatrixDataset& data) {
  EpisodeDataset out;
  out.T = static_cast<int>(data.size());
  out.H = 1;
  out.records.reserve(data.size());
  for (const auto& [a, b] : data.pairs) out.records.push_back({0, a, b, 0});
  return out;
}

MatrixDataset as_matrix_dataset(const EpisodeDataset& data) {
  MatrixDataset out;
  out.pairs.reserve(data.records.size());
  for (const StepRecord& rec : data.records) {
    out.pairs.emplace_back(rec.action_a, rec.action_b);
  }
  return out;
}

void write_dataset(std::ostream& out, const EpisodeDataset& data) {
  out << kDatasetHeader << '\n';
  for (int t = 0; t < data.T; ++t) {
    for (int h = 0; h < data.H; ++h) {
      const StepRecord& rec = data.at(t, h);
      out << t << ',' << h << ',' << rec.state << ',' << rec.action_a << ','
          << rec.action_b << ',' << rec.next_state << '\n';
    }
  }
}

namespace {

std::array<long long, 6> parse_row(std::string_view line, std::size_t lineno) {
  std::array<long long, 6> fields{};
  std::size_t pos = 0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::size_t end =
        i + 1 < fields.size() ? line.find(',', pos) : line.size();
    if (end == std::string_view::npos) {
      throw std::runtime_error("dataset line " + std::to_string(lineno) +
                               ": expected 6 fields");
    }
    const std::string_view token = line.substr(pos, end - pos);
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), fields[i]);
    if (ec != std::errc() || ptr != token.data() + token.size() ||
        fields[i] < 0) {
      throw std::runtime_error("dataset line " + std::to_string(lineno) +
                               ": bad integer '" + std::string(token) + "'");
    }
    pos = end + 1;
  }
  return fields;
}

}  // namespace

EpisodeDataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kDatasetHeader) {
    throw std::runtime_error("dataset header must be '" +
                             std::string(kDatasetHeader) + "'");
  }
  EpisodeDataset out;
  std::size_t lineno = 1;
  long long current_episode = -1;
  int steps_in_episode = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = parse_row(line, lineno);
    if (f[0] != current_episode) {
      if (f[0] != current_episode + 1) {
        throw std::runtime_error("dataset line " + std::to_string(lineno) +
                                 ": episodes must be consecutive from 0");
      }
      if (current_episode >= 0) {
        if (out.H == 0) out.H = steps_in_episode;
        if (steps_in_episode != out.H) {
          throw std::runtime_error("episode " +
                                   std::to_string(current_episode) +
                                   " has a different number of steps");
        }
      }
      current_episode = f[0];
      steps_in_episode = 0;
    }
    if (f[1] != steps_in_episode) {
      throw std::runtime_error("dataset line " + std::to_string(lineno) +
                               ": steps must be consecutive from 0");
    }
    ++steps_in_episode;
    out.records.push_back({static_cast<int>(f[2]), static_cast<int>(f[3]),
                           static_cast<int>(f[4]), static_cast<int>(f[5])});
  }
  if (current_episode < 0) return out;
  if (out.H == 0) out.H = steps_in_episode;
  if (steps_in_episode != out.H) {
    throw std::runtime_error("last episode has a different number of steps");
  }
  out.T = static_cast<int>(current_episode + 1);
  return out;
}

}  // namespace qre
