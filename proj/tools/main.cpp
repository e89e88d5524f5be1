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
// qre: forward solves, simulation, inversion and experiment runs.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "model_io.hpp"
#include "qre/experiment.hpp"
#include "qre/inverse_markov.hpp"
#include "qre/inverse_matrix.hpp"
#include "qre/metrics.hpp"
#include "qre/prob.hpp"
#include "qre/sampling.hpp"

namespace {

using nlohmann::json;
using namespace qre;
using namespace qre::tools;

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> reps;
  std::string samples;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "JSON experiment config")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Master seed");
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option("--reps", opts.reps, "Repetitions per sample size");
  cmd->add_option("--samples", opts.samples,
                  "Comma-separated sample sizes, e.g. 1000,10000");
  cmd->add_option("--threads", opts.threads, "Worker threads");
}

std::vector<std::size_t> parse_samples(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != item.size()) {
      throw UsageError("--samples: bad entry '" + item + "'");
    }
    out.push_back(static_cast<std::size_t>(value));
  }
  if (out.empty()) throw UsageError("--samples: empty list");
  return out;
}

ExperimentConfig resolve_config(const CommonOptions& opts) {
  ExperimentConfig c = opts.config.empty() ? preset(ExperimentKind::kSetup1)
                                           : load_config(opts.config);
  if (opts.seed) c.seed = *opts.seed;
  if (!opts.out.empty()) c.out = opts.out;
  if (opts.reps) c.reps = *opts.reps;
  if (!opts.samples.empty()) c.samples = parse_samples(opts.samples);
  if (opts.threads) c.threads = *opts.threads;
  c.validate();
  return c;
}

void emit(const json& j, const std::string& out_dir, const char* file) {
  const std::string text = j.dump(2) + "\n";
  if (out_dir.empty()) {
    std::cout << text;
  } else {
    write_text(std::filesystem::path(out_dir) / file, text);
    std::cout << (std::filesystem::path(out_dir) / file).string() << "\n";
  }
}

json policy_json(const PolicyPair& p) {
  return {{"mu", to_json(p.mu)}, {"nu", to_json(p.nu)}};
}

EpisodeDataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open dataset " + path);
  try {
    return read_dataset(in);
  } catch (const std::runtime_error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

int cmd_solve(const CommonOptions& opts, const std::string& payoff_path,
              double tol) {
  QreSolverOptions solver;
  solver.tol = tol;
  if (!payoff_path.empty()) {
    const json j = read_json(payoff_path);
    const MatrixGameSpec spec{matrix_from_json(j.at("payoff")),
                              j.value("eta", 1.0)};
    spec.validate();
    const PolicyPair p = solve_qre(spec, solver);
    json out = policy_json(p);
    out["value"] = game_value(spec, p);
    out["residual"] = qre_residual(spec, p);
    emit(out, opts.out, "qre.json");
    return 0;
  }
  const ExperimentConfig c = resolve_config(opts);
  CounterRng rng = model_stream(c, 0);
  if (c.model == ModelKind::kMatrix) {
    const MatrixInstance inst = build_matrix_instance(c, rng);
    const PolicyPair p = solve_qre(inst.spec, solver);
    json out = policy_json(p);
    out["payoff"] = to_json(inst.spec.payoff);
    out["value"] = game_value(inst.spec, p);
    out["residual"] = qre_residual(inst.spec, p);
    emit(out, opts.out, "qre.json");
    return 0;
  }
  const MarkovInstance inst = build_markov_instance(c, rng);
  const MarkovSolution sol = backward_qre(inst.spec, solver);
  json steps = json::array();
  for (int h = 0; h < c.H; ++h) {
    json states = json::array();
    for (int s = 0; s < c.S; ++s) {
      json entry = policy_json(sol.policies[h][s]);
      entry["V"] = sol.values.V[h][s];
      states.push_back(std::move(entry));
    }
    steps.push_back({{"step", h}, {"states", std::move(states)}});
  }
  emit({{"steps", std::move(steps)}}, opts.out, "qre.json");
  return 0;
}

int cmd_simulate(const CommonOptions& opts, const std::string& data_path) {
  if (!data_path.empty()) {
    const EpisodeDataset data = read_dataset_file(data_path);
    int S = 0;
    for (const StepRecord& r : data.records) {
      S = std::max({S, r.state + 1, r.next_state + 1});
    }
    json counts = json::array();
    for (int h = 0; h < data.H; ++h) {
      std::vector<std::size_t> per_state(static_cast<std::size_t>(S), 0);
      for (int t = 0; t < data.T; ++t) ++per_state[data.at(t, h).state];
      counts.push_back(per_state);
    }
    emit({{"episodes", data.T},
          {"horizon", data.H},
          {"states_seen", S},
          {"state_counts", std::move(counts)}},
         "", "");
    return 0;
  }
  const ExperimentConfig c = resolve_config(opts);
  const std::size_t N = c.samples.front();
  CounterRng model_rng = model_stream(c, 0);
  CounterRng data_rng = data_stream(c, 0, N);
  EpisodeDataset data;
  ModelFile model;
  if (c.model == ModelKind::kMatrix) {
    const MatrixInstance inst = build_matrix_instance(c, model_rng);
    data = as_episode_dataset(sample_matrix_actions(inst.qre, N, data_rng));
    model = model_from_instance(c, inst);
  } else {
    const MarkovInstance inst = build_markov_instance(c, model_rng);
    data = sample_episodes(inst.spec, inst.solution.policies, inst.initial,
                           static_cast<int>(N), data_rng);
    model = model_from_instance(c, inst);
  }
  const std::filesystem::path dir = c.out;
  std::ostringstream csv;
  write_dataset(csv, data);
  write_text(dir / "dataset.csv", csv.str());
  write_text(dir / "model.json", model_to_json(model).dump(2) + "\n");
  std::cout << (dir / "dataset.csv").string() << "\n"
            << (dir / "model.json").string() << "\n";
  return 0;
}

int cmd_invert_matrix(const CommonOptions& opts, const std::string& data_path,
                      const std::string& model_path,
                      const std::string& estimator,
                      std::optional<double> kappa_override) {
  const ModelFile model = model_from_json(read_json(model_path));
  const ExperimentConfig& c = model.config;
  if (c.model != ModelKind::kMatrix) {
    throw UsageError("invert-matrix needs a matrix model");
  }
  const EpisodeDataset episodes = read_dataset_file(data_path);
  if (episodes.H != 1) throw UsageError("matrix datasets have one step");
  const MatrixDataset data = as_matrix_dataset(episodes);
  const MatrixFeatures& features = model.features.per_state.front();
  const PolicyPair empirical =
      frequency_estimate_matrix(data, c.m, c.n).policies;
  const LinearSystem sys =
      build_linear_system(features, floor_policies(empirical), c.eta);
  const RankReport rank = rank_condition(sys.X, c.d);

  json out;
  out["samples"] = data.size();
  out["rank"] = rank.rank;
  out["full_rank"] = rank.full_rank;
  Vector theta_hat;
  const std::string method =
      estimator.empty() ? to_string(c.estimator) : estimator;
  if (method == "least_squares") {
    theta_hat = least_squares_theta(sys);
  } else if (method == "min_norm") {
    const double kappa =
        kappa_override ? *kappa_override : kappa_for(c, data.size());
    const ConfidenceSet set =
        build_confidence_set(features, empirical, c.eta, kappa, c.bound);
    const Projection pick = set.min_norm_member();
    theta_hat = pick.point;
    out["kappa"] = kappa;
    out["set_empty"] = pick.empty;
    out["true_theta_in_set"] = set.contains(model.theta);
  } else {
    throw UsageError("--estimator must be least_squares or min_norm");
  }
  out["estimator"] = method;
  out["theta_hat"] = to_json(theta_hat);
  const Matrix q_hat = reconstruct_payoff(theta_hat, features);
  out["payoff_hat"] = to_json(q_hat);
  const MatrixGameSpec truth = matrix_spec(model);
  const PolicyPair qre = solve_qre(truth);
  out["errors"] = {{"theta_err", (theta_hat - model.theta).norm()},
                   {"payoff_err", (q_hat - truth.payoff).norm()},
                   {"qre_tv_err", qre_discrepancy(q_hat, qre, c.eta)}};
  emit(out, opts.out, "invert_matrix.json");
  return 0;
}

int cmd_invert_markov(const CommonOptions& opts, const std::string& data_path,
                      const std::string& model_path, bool mle,
                      std::optional<double> kappa_override) {
  const ModelFile model = model_from_json(read_json(model_path));
  const ExperimentConfig& c = model.config;
  if (c.model != ModelKind::kMarkov) {
    throw UsageError("invert-markov needs a Markov model");
  }
  const EpisodeDataset data = read_dataset_file(data_path);
  if (data.H != c.H) throw UsageError("dataset horizon differs from model");

  RecoveryConfig rc;
  rc.eta = c.eta;
  rc.gamma = c.gamma;
  rc.radius = c.bound;
  rc.lambda = c.lambda;
  rc.kappa.assign(static_cast<std::size_t>(c.H),
                  kappa_override ? *kappa_override
                                 : kappa_for(c, static_cast<std::size_t>(data.T)));
  RewardRecovery recovery;
  if (mle) {
    const bool action = c.softmax_basis == SoftmaxBasis::kAction;
    const SoftmaxFeatures psi_a = action
                                      ? one_hot_action_features(c.S, c.m, c.K)
                                      : saturated_features(c.S, c.m, c.K);
    const SoftmaxFeatures psi_b = action
                                      ? one_hot_action_features(c.S, c.n, c.K)
                                      : saturated_features(c.S, c.n, c.K);
    recovery =
        recover_rewards_mle(data, model.features, psi_a, psi_b, rc).recovery;
  } else {
    recovery = recover_rewards(data, model.features, rc);
  }
  const RecoveredRewardSample& est = recovery.samples.front();

  const LinearMDPModel mdp = linear_mdp(model);
  const MarkovGameSpec truth = mdp.to_spec(c.gamma, c.eta);
  const MarkovSolution sol = backward_qre(truth);
  const VisitDistributions visits =
      visit_distributions(truth, sol.policies, uniform_distribution(c.S));
  const std::vector<Vector> theta_star = mdp.q_parameters(sol.values, c.gamma);

  json steps = json::array();
  for (int h = 0; h < c.H; ++h) {
    json rewards = json::array();
    for (int s = 0; s < c.S; ++s) rewards.push_back(to_json(est.r[h][s]));
    steps.push_back({{"step", h},
                     {"theta_hat", to_json(est.theta[h])},
                     {"set_empty", static_cast<bool>(est.empty_set[h])},
                     {"true_theta_in_set",
                      recovery.sets[h].contains(theta_star[h])},
                     {"reward_hat", std::move(rewards)}});
  }
  const MarkovQreDiscrepancy disc = markov_qre_discrepancy(
      truth, est.r, sol.policies, visits.state);
  json out;
  out["algorithm"] = mle ? "mle" : "frequency";
  out["episodes"] = data.T;
  out["kappa"] = rc.kappa.front();
  out["steps"] = std::move(steps);
  out["errors"] = {
      {"reward_D", reward_metric_D(est.r, truth.rewards)},
      {"reward_D1", reward_metric_D1(est.r, truth.rewards, visits.state)},
      {"payoff_err", frobenius_error(est.r, truth.rewards)},
      {"qre_tv_err", disc.mean}};
  emit(out, opts.out, "invert_markov.json");
  return 0;
}

int cmd_experiment(const CommonOptions& opts) {
  const ExperimentConfig c = resolve_config(opts);
  const ExperimentResult result = run_experiment(c);
  emit_csv(result, c.out);
  for (const SummaryRow& row : result.summary) {
    std::printf("%-8s N=%-8zu %-11s mean=%-12s ci=[%s, %s]\n",
                row.experiment.c_str(), row.sample_size, row.metric.c_str(),
                format_number(row.mean).c_str(),
                format_number(row.ci_lo).c_str(),
                format_number(row.ci_hi).c_str());
  }
  std::printf("%zu records, %zu failed; CSV written to %s\n",
              result.records.size(), result.failures, c.out.c_str());
  return result.failure_threshold_exceeded() ? kExitNumerical : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward and inverse entropy-regularized zero-sum games"};
  app.require_subcommand(1);

  CommonOptions solve_opts;
  std::string payoff_path;
  double tol = 1e-12;
  CLI::App* solve = app.add_subcommand("solve-qre", "Compute a QRE");
  add_common(solve, solve_opts);
  solve->add_option("--payoff", payoff_path,
                    "JSON file {\"payoff\": [[...]], \"eta\": x}")
      ->check(CLI::ExistingFile);
  solve->add_option("--tol", tol, "Fixed-point residual tolerance");

  CommonOptions sim_opts;
  std::string sim_data;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Write a dataset and its model");
  add_common(simulate, sim_opts);
  simulate->add_option("--data", sim_data, "Summarize an existing dataset")
      ->check(CLI::ExistingFile);

  CommonOptions im_opts;
  std::string im_data;
  std::string im_model;
  std::string im_estimator;
  std::optional<double> im_kappa;
  CLI::App* invert_matrix =
      app.add_subcommand("invert-matrix", "Recover payoff parameters");
  add_common(invert_matrix, im_opts);
  invert_matrix->add_option("--data", im_data, "Dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  invert_matrix->add_option("--model", im_model, "model.json from simulate")
      ->required()
      ->check(CLI::ExistingFile);
  invert_matrix->add_option("--estimator", im_estimator,
                            "least_squares or min_norm");
  invert_matrix->add_option("--kappa", im_kappa, "Confidence threshold");

  CommonOptions mk_opts;
  std::string mk_data;
  std::string mk_model;
  bool mk_mle = false;
  std::optional<double> mk_kappa;
  CLI::App* invert_markov =
      app.add_subcommand("invert-markov", "Recover step rewards");
  add_common(invert_markov, mk_opts);
  invert_markov->add_option("--data", mk_data, "Dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  invert_markov->add_option("--model", mk_model, "model.json from simulate")
      ->required()
      ->check(CLI::ExistingFile);
  invert_markov->add_flag("--mle", mk_mle,
                          "MLE policies with visit-weighted systems");
  invert_markov->add_option("--kappa", mk_kappa, "Confidence threshold");

  CommonOptions exp_opts;
  CLI::App* experiment =
      app.add_subcommand("experiment", "Run repetitions and write CSV");
  add_common(experiment, exp_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(solve_opts, payoff_path, tol);
    if (*simulate) return cmd_simulate(sim_opts, sim_data);
    if (*invert_matrix) {
      return cmd_invert_matrix(im_opts, im_data, im_model, im_estimator,
                               im_kappa);
    }
    if (*invert_markov) {
      return cmd_invert_markov(mk_opts, mk_data, mk_model, mk_mle, mk_kappa);
    }
    if (*experiment) return cmd_experiment(exp_opts);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
