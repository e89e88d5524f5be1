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
#ifndef QRE_EXPERIMENT_HPP_
#define QRE_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qre/inverse_markov.hpp"
#include "qre/markov_game.hpp"
#include "qre/metrics.hpp"
#include "qre/rng.hpp"

namespace qre {

enum class ExperimentKind { kSetup1, kSetup2, kMarkov, kCustom };
enum class ModelKind { kMatrix, kMarkov };
enum class Estimator { kLeastSquares, kMinNorm, kFrequency, kMle };
enum class KappaRule { kSurrogate, kTheoretical };
enum class SoftmaxBasis { kAction, kSaturated };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kSetup1;
  std::string name = "setup1";
  ModelKind model = ModelKind::kMatrix;
  Estimator estimator = Estimator::kLeastSquares;

  int m = 4;
  int n = 6;
  int S = 1;
  int H = 1;
  int d = 2;
  int feature_rank = -1;  // -1: full rank
  bool state_dependent = false;

  std::vector<double> theta{0.8, -0.6};  // matrix models
  std::vector<double> omega;             // Markov models, every step
  double eta = 0.5;
  double gamma = 1.0;
  // Matrix models: M, a bound on |theta|^2. Markov models: R, a bound on
  // |theta_h|.
  double bound = 4.0;
  KappaRule kappa_rule = KappaRule::kSurrogate;
  double kappa_scale = 1e3;
  double delta = 0.05;
  double lambda = 0.01;
  SoftmaxBasis softmax_basis = SoftmaxBasis::kAction;
  double K = 1.0;

  std::vector<std::size_t> samples{1000, 10000, 100000, 1000000};
  int reps = 100;
  std::uint64_t seed = 2026;
  std::string out = "out";
  unsigned threads = 1;
  bool timing = false;

  // Softmax feature dimensions implied by softmax_basis.
  int d_a() const;
  int d_b() const;
  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

ExperimentConfig preset(ExperimentKind kind);
// JSON object; "kind" selects the preset and the remaining keys override
// it. Unknown keys are rejected.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_string(ExperimentKind kind);
std::string to_string(Estimator estimator);

struct MatrixInstance {
  MatrixFeatures features;
  Vector theta;
  MatrixGameSpec spec;
  PolicyPair qre;
};

struct MarkovInstance {
  LinearMDPModel model;
  MarkovGameSpec spec;
  MarkovSolution solution;
  std::vector<Vector> theta;  // Q-parameters per step
  Vector initial;
  VisitDistributions visits;
};

MatrixInstance build_matrix_instance(const ExperimentConfig& config,
                                     CounterRng& rng);
MarkovInstance build_markov_instance(const ExperimentConfig& config,
                                     CounterRng& rng);

// Model stream for repetition rep and data stream for (rep, N).
CounterRng model_stream(const ExperimentConfig& config, int rep);
CounterRng data_stream(const ExperimentConfig& config, int rep,
                       std::size_t samples);

double kappa_for(const ExperimentConfig& config, std::size_t samples);

struct StepError {
  int step = 0;
  double reward_fro_err = 0.0;
  double qre_tv_err = 0.0;
  bool covered = false;
};

struct RunRecord {
  std::string experiment;
  std::size_t sample_size = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  ErrorReport errors;
  // Whether the true parameter lies in the confidence set (every step for
  // Markov models). Empty for estimators without a set.
  std::optional<bool> covered;
  std::optional<double> duration_ms;
  std::vector<StepError> steps;
  bool failed = false;
  std::string failure;
};

struct SummaryRow {
  std::string experiment;
  std::size_t sample_size = 0;
  std::string metric;
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::vector<SummaryRow> summary;
  std::size_t failures = 0;

  // More than 5% of the records failed.
  bool failure_threshold_exceeded() const;
};

RunRecord run_single(const ExperimentConfig& config, std::size_t samples,
                     int rep);
ExperimentResult run_experiment(const ExperimentConfig& config);
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

// Linear interpolation between order statistics, q in [0, 1].
double percentile(std::vector<double> values, double q);
// printf "%.10g".
std::string format_number(double value);

// Writes runs.csv, summary.csv and, when any record has per-step rows,
// steps.csv. Throws std::runtime_error when the directory is unwritable.
void emit_csv(const ExperimentResult& result,
              const std::filesystem::path& dir);

}  // namespace qre

#endif  // QRE_EXPERIMENT_HPP_
