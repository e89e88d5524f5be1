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
#include "qre/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qre/inverse_matrix.hpp"
#include "qre/parallel.hpp"
#include "qre/prob.hpp"
#include "qre/sampling.hpp"
#include "qre/synthetic.hpp"

namespace qre {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kDataTagBase = 0x100000000ULL;

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <typename Enum>
Enum parse_enum(const json& value, const char* key,
                const std::map<std::string, Enum>& names) {
  const std::string text = value.get<std::string>();
  const auto it = names.find(text);
  if (it == names.end()) {
    std::string options;
    for (const auto& [name, _] : names) {
      options += options.empty() ? name : ", " + name;
    }
    throw std::invalid_argument(std::string(key) + ": unknown value '" +
                                text + "' (expected one of " + options + ")");
  }
  return it->second;
}

const std::map<std::string, ExperimentKind> kKinds{
    {"setup1", ExperimentKind::kSetup1},
    {"setup2", ExperimentKind::kSetup2},
    {"markov", ExperimentKind::kMarkov},
    {"custom", ExperimentKind::kCustom}};
const std::map<std::string, ModelKind> kModels{{"matrix", ModelKind::kMatrix},
                                               {"markov", ModelKind::kMarkov}};
const std::map<std::string, Estimator> kEstimators{
    {"least_squares", Estimator::kLeastSquares},
    {"min_norm", Estimator::kMinNorm},
    {"frequency", Estimator::kFrequency},
    {"mle", Estimator::kMle}};
const std::map<std::string, KappaRule> kKappaRules{
    {"surrogate", KappaRule::kSurrogate},
    {"theoretical", KappaRule::kTheoretical}};
const std::map<std::string, SoftmaxBasis> kBases{
    {"action", SoftmaxBasis::kAction}, {"saturated", SoftmaxBasis::kSaturated}};

}  // namespace

int ExperimentConfig::d_a() const {
  return softmax_basis == SoftmaxBasis::kAction ? m : S * m;
}

int ExperimentConfig::d_b() const {
  return softmax_basis == SoftmaxBasis::kAction ? n : S * n;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("config: " + what);
  };
  if (m < 2 || n < 2) fail("m and n must be >= 2");
  if (S < 1 || H < 1 || d < 1) fail("S, H and d must be >= 1");
  if (feature_rank != -1 && (feature_rank < 1 || feature_rank > d)) {
    fail("feature_rank must be -1 or in [1, d]");
  }
  if (!(eta > 0.0)) fail("eta must be > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must be in [0, 1]");
  if (!(bound > 0.0)) fail("bound must be > 0");
  if (!(kappa_scale >= 0.0)) fail("kappa_scale must be >= 0");
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must be in (0, 1)");
  if (!(lambda > 0.0)) fail("lambda must be > 0");
  if (!(K > 0.0)) fail("K must be > 0");
  if (reps < 1) fail("reps must be >= 1");
  if (samples.empty()) fail("samples must not be empty");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i] == 0) fail("sample sizes must be >= 1");
    if (i > 0 && samples[i] <= samples[i - 1]) {
      fail("sample sizes must be strictly increasing");
    }
  }
  if (model == ModelKind::kMatrix) {
    if (static_cast<int>(theta.size()) != d) fail("theta must have length d");
    if (estimator != Estimator::kLeastSquares &&
        estimator != Estimator::kMinNorm) {
      fail("matrix models use estimator least_squares or min_norm");
    }
    if (S != 1 || H != 1) fail("matrix models need S = 1 and H = 1");
  } else {
    if (static_cast<int>(omega.size()) != d) fail("omega must have length d");
    if (estimator != Estimator::kFrequency && estimator != Estimator::kMle) {
      fail("Markov models use estimator frequency or mle");
    }
  }
}

ExperimentConfig preset(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::kSetup1:
    case ExperimentKind::kCustom:
      c.name = kind == ExperimentKind::kSetup1 ? "setup1" : "custom";
      break;
    case ExperimentKind::kSetup2:
      c.name = "setup2";
      c.m = 6;
      c.n = 6;
      c.d = 6;
      c.feature_rank = 4;
      c.theta = {0.8, -0.6, 0.75, 0.2, 0.5, -0.5};
      c.estimator = Estimator::kMinNorm;
      break;
    case ExperimentKind::kMarkov:
      c.name = "markov";
      c.model = ModelKind::kMarkov;
      c.estimator = Estimator::kMle;
      c.m = 5;
      c.n = 5;
      c.S = 4;
      c.H = 6;
      c.d = 2;
      c.theta.clear();
      c.omega = {0.8, -0.6};
      c.bound = 10.0;
      c.samples = {10000, 20000, 50000, 100000};
      break;
  }
  return c;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: expected object");

  ExperimentKind kind = ExperimentKind::kCustom;
  if (j.contains("kind")) kind = parse_enum(j["kind"], "kind", kKinds);
  ExperimentConfig c = preset(kind);
  if (kind == ExperimentKind::kCustom) {
    if (!j.contains("model")) {
      throw std::invalid_argument("config: custom experiments need 'model'");
    }
    c.model = parse_enum(j["model"], "model", kModels);
    if (c.model == ModelKind::kMarkov) {
      const ExperimentConfig markov = preset(ExperimentKind::kMarkov);
      c.estimator = markov.estimator;
      c.S = markov.S;
      c.H = markov.H;
      c.m = markov.m;
      c.n = markov.n;
      c.theta.clear();
      c.omega = markov.omega;
      c.bound = markov.bound;
      c.samples = markov.samples;
    }
  }

  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "kind" || key == "model") continue;
      if (key == "name") c.name = value.get<std::string>();
      else if (key == "estimator")
        c.estimator = parse_enum(value, "estimator", kEstimators);
      else if (key == "m") c.m = value.get<int>();
      else if (key == "n") c.n = value.get<int>();
      else if (key == "S") c.S = value.get<int>();
      else if (key == "H") c.H = value.get<int>();
      else if (key == "d") c.d = value.get<int>();
      else if (key == "feature_rank") c.feature_rank = value.get<int>();
      else if (key == "state_dependent") c.state_dependent = value.get<bool>();
      else if (key == "theta") c.theta = value.get<std::vector<double>>();
      else if (key == "omega") c.omega = value.get<std::vector<double>>();
      else if (key == "eta") c.eta = value.get<double>();
      else if (key == "gamma") c.gamma = value.get<double>();
      else if (key == "bound") c.bound = value.get<double>();
      else if (key == "kappa_rule")
        c.kappa_rule = parse_enum(value, "kappa_rule", kKappaRules);
      else if (key == "kappa_scale") c.kappa_scale = value.get<double>();
      else if (key == "delta") c.delta = value.get<double>();
      else if (key == "lambda") c.lambda = value.get<double>();
      else if (key == "softmax_basis")
        c.softmax_basis = parse_enum(value, "softmax_basis", kBases);
      else if (key == "K") c.K = value.get<double>();
      else if (key == "samples")
        c.samples = value.get<std::vector<std::size_t>>();
      else if (key == "reps") c.reps = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "threads") c.threads = value.get<unsigned>();
      else if (key == "timing") c.timing = value.get<bool>();
      else if (key == "d_a" || key == "d_b") continue;  // checked below
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: wrong value type: ") +
                                e.what());
  }
  if (j.contains("d_a") && j["d_a"].get<int>() != c.d_a()) {
    throw std::invalid_argument("config: d_a is fixed by softmax_basis (" +
                                std::to_string(c.d_a()) + ")");
  }
  if (j.contains("d_b") && j["d_b"].get<int>() != c.d_b()) {
    throw std::invalid_argument("config: d_b is fixed by softmax_basis (" +
                                std::to_string(c.d_b()) + ")");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_string(ExperimentKind kind) {
  for (const auto& [name, value] : kKinds) {
    if (value == kind) return name;
  }
  return "custom";
}

std::string to_string(Estimator estimator) {
  for (const auto& [name, value] : kEstimators) {
    if (value == estimator) return name;
  }
  return "least_squares";
}

MatrixInstance build_matrix_instance(const ExperimentConfig& config,
                                     CounterRng& rng) {
  MatrixInstance inst;
  inst.features = gaussian_unit_features(config.m, config.n, config.d, rng,
                                         config.feature_rank);
  inst.theta = to_vector(config.theta);
  inst.spec = {payoff_from_features(inst.features, inst.theta), config.eta};
  inst.qre = solve_qre(inst.spec);
  return inst;
}

MarkovInstance build_markov_instance(const ExperimentConfig& config,
                                     CounterRng& rng) {
  MarkovInstance inst;
  const std::vector<Vector> omega(static_cast<std::size_t>(config.H),
                                  to_vector(config.omega));
  inst.model = make_linear_mdp(config.S, config.m, config.n, config.H,
                               config.d, omega, config.state_dependent, rng);
  inst.spec = inst.model.to_spec(config.gamma, config.eta);
  inst.solution = backward_qre(inst.spec);
  inst.theta = inst.model.q_parameters(inst.solution.values, config.gamma);
  inst.initial = uniform_distribution(config.S);
  inst.visits =
      visit_distributions(inst.spec, inst.solution.policies, inst.initial);
  return inst;
}

CounterRng model_stream(const ExperimentConfig& config, int rep) {
  return CounterRng::stream(config.seed, static_cast<std::uint64_t>(rep), 0);
}

CounterRng data_stream(const ExperimentConfig& config, int rep,
                       std::size_t samples) {
  return CounterRng::stream(config.seed, static_cast<std::uint64_t>(rep),
                            kDataTagBase + samples);
}

double kappa_for(const ExperimentConfig& config, std::size_t samples) {
  return surrogate_kappa(samples, config.kappa_scale);
}

namespace {

void run_matrix(const ExperimentConfig& config, std::size_t N, int rep,
                RunRecord& rec) {
  CounterRng model_rng = model_stream(config, rep);
  const MatrixInstance inst = build_matrix_instance(config, model_rng);
  CounterRng rng = data_stream(config, rep, N);
  const MatrixDataset data = sample_matrix_actions(inst.qre, N, rng);
  const PolicyPair empirical =
      frequency_estimate_matrix(data, config.m, config.n).policies;

  Vector theta_hat;
  if (config.estimator == Estimator::kLeastSquares) {
    theta_hat = least_squares_theta(
        build_linear_system(inst.features, floor_policies(empirical),
                            config.eta));
  } else {
    const double kappa =
        config.kappa_rule == KappaRule::kSurrogate
            ? kappa_for(config, N)
            : theoretical_kappa_matrix(inst.features, empirical, config.eta,
                                       config.bound, N, config.delta);
    const ConfidenceSet set = build_confidence_set(
        inst.features, empirical, config.eta, kappa, config.bound);
    theta_hat = set.min_norm_member().point;
    rec.covered = set.contains(inst.theta);
  }
  const Matrix q_hat = reconstruct_payoff(theta_hat, inst.features);
  rec.errors.theta_err = (theta_hat - inst.theta).norm();
  rec.errors.payoff_err = (q_hat - inst.spec.payoff).norm();
  rec.errors.qre_tv_err = qre_discrepancy(q_hat, inst.qre, config.eta);
}

void run_markov(const ExperimentConfig& config, std::size_t N, int rep,
                RunRecord& rec) {
  CounterRng model_rng = model_stream(config, rep);
  const MarkovInstance inst = build_markov_instance(config, model_rng);
  CounterRng rng = data_stream(config, rep, N);
  const EpisodeDataset data = sample_episodes(
      inst.spec, inst.solution.policies, inst.initial, static_cast<int>(N),
      rng);

  RecoveryConfig rc;
  rc.eta = config.eta;
  rc.gamma = config.gamma;
  rc.radius = config.bound;
  rc.lambda = config.lambda;
  if (config.kappa_rule == KappaRule::kSurrogate) {
    rc.kappa.assign(static_cast<std::size_t>(config.H), kappa_for(config, N));
  } else {
    const EmpiricalStageQRE freq =
        frequency_estimate_markov(data, config.S, config.m, config.n);
    for (int h = 0; h < config.H; ++h) {
      rc.kappa.push_back(theoretical_kappa_step(
          inst.model.features, freq.policies[h], freq.counts[h], config.eta,
          config.bound, config.delta));
    }
  }

  RewardRecovery recovery;
  if (config.estimator == Estimator::kFrequency) {
    recovery = recover_rewards(data, inst.model.features, rc);
  } else {
    const bool action = config.softmax_basis == SoftmaxBasis::kAction;
    const SoftmaxFeatures psi_a =
        action ? one_hot_action_features(config.S, config.m, config.K)
               : saturated_features(config.S, config.m, config.K);
    const SoftmaxFeatures psi_b =
        action ? one_hot_action_features(config.S, config.n, config.K)
               : saturated_features(config.S, config.n, config.K);
    recovery = recover_rewards_mle(data, inst.model.features, psi_a, psi_b, rc)
                   .recovery;
  }

  const RecoveredRewardSample& est = recovery.samples.front();
  const MarkovQreDiscrepancy disc = markov_qre_discrepancy(
      inst.spec, est.r, inst.solution.policies, inst.visits.state);

  double theta_sq = 0.0;
  bool all_covered = true;
  for (int h = 0; h < config.H; ++h) {
    theta_sq += (est.theta[h] - inst.theta[h]).squaredNorm();
    StepError step;
    step.step = h;
    step.reward_fro_err = frobenius_error({est.r[h]}, {inst.spec.rewards[h]});
    step.qre_tv_err = disc.per_step[h];
    step.covered = recovery.sets[h].contains(inst.theta[h]);
    all_covered = all_covered && step.covered;
    rec.steps.push_back(step);
  }
  rec.covered = all_covered;
  rec.errors.theta_err = std::sqrt(theta_sq);
  rec.errors.payoff_err = frobenius_error(est.r, inst.spec.rewards);
  rec.errors.qre_tv_err = disc.mean;
  rec.errors.reward_D = reward_metric_D(est.r, inst.spec.rewards);
  rec.errors.reward_D1 =
      reward_metric_D1(est.r, inst.spec.rewards, inst.visits.state);
}

}  // namespace

RunRecord run_single(const ExperimentConfig& config, std::size_t samples,
                     int rep) {
  RunRecord rec;
  rec.experiment = config.name;
  rec.sample_size = samples;
  rec.rep = rep;
  rec.seed = config.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (config.model == ModelKind::kMatrix) {
      run_matrix(config, samples, rep, rec);
    } else {
      run_markov(config, samples, rep, rec);
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.failure = e.what();
    rec.errors = {};
    rec.covered.reset();
    rec.steps.clear();
  }
  if (config.timing) {
    rec.duration_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  }
  return rec;
}

bool ExperimentResult::failure_threshold_exceeded() const {
  return records.empty()
             ? false
             : static_cast<double>(failures) >
                   0.05 * static_cast<double>(records.size());
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t reps = static_cast<std::size_t>(config.reps);
  ExperimentResult result;
  result.records.resize(config.samples.size() * reps);
  parallel_for(result.records.size(), config.threads, [&](std::size_t i) {
    result.records[i] =
        run_single(config, config.samples[i / reps], static_cast<int>(i % reps));
  });
  for (const RunRecord& rec : result.records) {
    if (rec.failed) ++result.failures;
  }
  result.summary = summarize(result.records);
  return result;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile of nothing");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  using Getter = std::optional<double> (*)(const RunRecord&);
  const std::vector<std::pair<const char*, Getter>> metrics{
      {"theta_err", [](const RunRecord& r) { return r.errors.theta_err; }},
      {"payoff_err", [](const RunRecord& r) { return r.errors.payoff_err; }},
      {"qre_tv_err", [](const RunRecord& r) { return r.errors.qre_tv_err; }},
      {"reward_D", [](const RunRecord& r) { return r.errors.reward_D; }},
      {"reward_D1", [](const RunRecord& r) { return r.errors.reward_D1; }},
      {"coverage",
       [](const RunRecord& r) -> std::optional<double> {
         if (!r.covered) return std::nullopt;
         return *r.covered ? 1.0 : 0.0;
       }},
  };

  // (experiment, sample size) groups in first-seen order.
  std::vector<std::pair<std::string, std::size_t>> groups;
  for (const RunRecord& r : records) {
    const auto key = std::make_pair(r.experiment, r.sample_size);
    if (std::find(groups.begin(), groups.end(), key) == groups.end()) {
      groups.push_back(key);
    }
  }
  std::vector<SummaryRow> out;
  for (const auto& [experiment, size] : groups) {
    for (const auto& [metric, get] : metrics) {
      std::vector<double> values;
      for (const RunRecord& r : records) {
        if (r.failed || r.experiment != experiment || r.sample_size != size) {
          continue;
        }
        if (const auto v = get(r)) values.push_back(*v);
      }
      if (values.empty()) continue;
      SummaryRow row;
      row.experiment = experiment;
      row.sample_size = size;
      row.metric = metric;
      double sum = 0.0;
      for (double v : values) sum += v;
      row.mean = sum / static_cast<double>(values.size());
      row.ci_lo = percentile(values, 0.025);
      row.ci_hi = percentile(values, 0.975);
      out.push_back(row);
    }
  }
  return out;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

namespace {

std::string field(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void emit_csv(const ExperimentResult& result,
              const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create " + dir.string() + ": " +
                             ec.message());
  }
  {
    std::ofstream runs = open_csv(dir / "runs.csv");
    runs << "experiment,sample_size,rep,seed,theta_err,payoff_err,"
            "qre_tv_err,reward_D,reward_D1,duration_ms\n";
    for (const RunRecord& r : result.records) {
      runs << r.experiment << ',' << r.sample_size << ',' << r.rep << ','
           << r.seed << ',' << field(r.errors.theta_err) << ','
           << field(r.errors.payoff_err) << ',' << field(r.errors.qre_tv_err)
           << ',' << field(r.errors.reward_D) << ','
           << field(r.errors.reward_D1) << ',' << field(r.duration_ms)
           << '\n';
    }
    if (!runs) throw std::runtime_error("failed writing runs.csv");
  }
  {
    std::ofstream summary = open_csv(dir / "summary.csv");
    summary << "experiment,sample_size,metric,mean,ci_lo,ci_hi\n";
    for (const SummaryRow& row : result.summary) {
      summary << row.experiment << ',' << row.sample_size << ',' << row.metric
              << ',' << format_number(row.mean) << ','
              << format_number(row.ci_lo) << ',' << format_number(row.ci_hi)
              << '\n';
    }
    if (!summary) throw std::runtime_error("failed writing summary.csv");
  }
  const bool has_steps =
      std::any_of(result.records.begin(), result.records.end(),
                  [](const RunRecord& r) { return !r.steps.empty(); });
  if (has_steps) {
    std::ofstream steps = open_csv(dir / "steps.csv");
    steps << "experiment,sample_size,rep,step,reward_fro_err,qre_tv_err,"
             "covered\n";
    for (const RunRecord& r : result.records) {
      for (const StepError& s : r.steps) {
        steps << r.experiment << ',' << r.sample_size << ',' << r.rep << ','
              << s.step << ',' << format_number(s.reward_fro_err) << ','
              << format_number(s.qre_tv_err) << ',' << (s.covered ? 1 : 0)
              << '\n';
      }
    }
    if (!steps) throw std::runtime_error("failed writing steps.csv");
  }
  const bool has_failures =
      std::any_of(result.records.begin(), result.records.end(),
                  [](const RunRecord& r) { return r.failed; });
  if (has_failures) {
    std::ofstream failures = open_csv(dir / "failures.csv");
    failures << "experiment,sample_size,rep,message\n";
    for (const RunRecord& r : result.records) {
      if (!r.failed) continue;
      std::string msg = r.failure;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      failures << r.experiment << ',' << r.sample_size << ',' << r.rep
               << ",\"" << msg << "\"\n";
    }
  }
}

}  // namespace qre
