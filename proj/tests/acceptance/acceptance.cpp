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
// Acceptance checks. Each criterion prints one line
//   CRITERION <k> PASS|FAIL: <detail> (<seconds> s)
// and the process exits nonzero when any selected criterion fails.
// Usage: qre_acceptance [all | 1 .. 10 | 6s]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qre/experiment.hpp"
#include "qre/inverse_markov.hpp"
#include "qre/inverse_matrix.hpp"
#include "qre/markov_game.hpp"
#include "qre/matrix_game.hpp"
#include "qre/metrics.hpp"
#include "qre/prob.hpp"
#include "qre/sampling.hpp"
#include "qre/synthetic.hpp"

using namespace qre;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

// Metric values of the non-failed records at sample size N.
std::vector<double> column(const ExperimentResult& r, std::size_t N,
                           std::optional<double> ErrorReport::*field) {
  std::vector<double> out;
  for (const RunRecord& rec : r.records) {
    if (rec.failed || rec.sample_size != N) continue;
    if (const auto& v = rec.errors.*field) out.push_back(*v);
  }
  return out;
}

std::string join(const std::vector<double>& v, const char* format) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out += (i ? ", " : "") + fmt(format, v[i]);
  }
  return out;
}

// 1. Forward solver on random games plus the two symmetric examples.
Outcome forward_solver() {
  CounterRng rng(20260001);
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 1000; ++k) {
    const int m = 2 + static_cast<int>(rng.uniform() * 7);
    const int n = 2 + static_cast<int>(rng.uniform() * 7);
    Matrix q(m, n);
    for (Eigen::Index i = 0; i < q.size(); ++i) q.data()[i] = rng.normal();
    const double eta = 2.0 * (1.0 - rng.uniform());  // (0, 2]
    try {
      const MatrixGameSpec spec{q, eta};
      worst = std::max(worst, qre_residual(spec, solve_qre(spec)));
    } catch (const NumericalError&) {
      ++failures;
    }
  }
  Matrix pennies(2, 2);
  pennies << 1, -1, -1, 1;
  const PolicyPair p = solve_qre({pennies, 1.0});
  const PolicyPair z = solve_qre({Matrix::Zero(5, 3), 1.7});
  const double sym =
      std::max({(p.mu - uniform_distribution(2)).lpNorm<Eigen::Infinity>(),
                (p.nu - uniform_distribution(2)).lpNorm<Eigen::Infinity>(),
                (z.mu - uniform_distribution(5)).lpNorm<Eigen::Infinity>(),
                (z.nu - uniform_distribution(3)).lpNorm<Eigen::Infinity>()});
  return {failures == 0 && worst <= 1e-10 && sym <= 1e-12,
          "1000 games, max residual " + fmt("%.2e", worst) + ", " +
              std::to_string(failures) + " solver failures; symmetric games " +
              "off uniform by " + fmt("%.1e", sym)};
}

// 2. Setup I rate.
Outcome setup1_rate() {
  ExperimentConfig c = preset(ExperimentKind::kSetup1);
  c.reps = 20;
  const ExperimentResult r = run_experiment(c);
  std::vector<double> logn;
  std::vector<double> logerr;
  std::vector<double> medians;
  for (std::size_t N : c.samples) {
    const double med = median(column(r, N, &ErrorReport::theta_err));
    medians.push_back(med);
    logn.push_back(std::log(static_cast<double>(N)));
    logerr.push_back(std::log(med));
  }
  const double slope = oracle::slope(logn, logerr);
  return {r.failures == 0 && slope >= -0.65 && slope <= -0.35,
          "median theta error " + join(medians, "%.4g") + "; slope " +
              fmt("%.3f", slope) + " (target [-0.65, -0.35])"};
}

// 3. Setup II partial identification.
Outcome setup2_behavior() {
  ExperimentConfig c = preset(ExperimentKind::kSetup2);
  c.reps = 20;
  const ExperimentResult r = run_experiment(c);
  std::vector<double> qre;
  std::vector<double> theta;
  for (std::size_t N : c.samples) {
    qre.push_back(median(column(r, N, &ErrorReport::qre_tv_err)));
    theta.push_back(median(column(r, N, &ErrorReport::theta_err)));
  }
  const double ratio = qre.back() / qre.front();
  const double cap = 2.0 * std::sqrt(c.bound);
  const bool bounded =
      std::all_of(theta.begin(), theta.end(), [&](double t) { return t <= cap; });
  return {r.failures == 0 && ratio <= 0.1 && bounded,
          "median QRE error " + join(qre, "%.4g") + " (ratio " +
              fmt("%.3f", ratio) + ", target <= 0.1); median theta error " +
              join(theta, "%.3g") + " (cap " + fmt("%.0f", cap) + ")"};
}

// 4. Coverage at N = 1e4 for Setup II and for every Markov step.
Outcome coverage() {
  ExperimentConfig s2 = preset(ExperimentKind::kSetup2);
  s2.samples = {10000};
  const ExperimentResult r2 = run_experiment(s2);
  int covered2 = 0;
  for (const RunRecord& rec : r2.records) covered2 += rec.covered.value_or(false);

  // Reported for reference: the plug-in theoretical threshold.
  ExperimentConfig s2t = s2;
  s2t.kappa_rule = KappaRule::kTheoretical;
  int covered2t = 0;
  for (const RunRecord& rec : run_experiment(s2t).records) {
    covered2t += rec.covered.value_or(false);
  }

  ExperimentConfig mk = preset(ExperimentKind::kMarkov);
  mk.samples = {10000};
  const ExperimentResult rm = run_experiment(mk);
  std::vector<int> per_step(static_cast<std::size_t>(mk.H), 0);
  for (const RunRecord& rec : rm.records) {
    for (const StepError& s : rec.steps) per_step[s.step] += s.covered;
  }
  const int worst = *std::min_element(per_step.begin(), per_step.end());
  std::string steps;
  for (int v : per_step) steps += (steps.empty() ? "" : "/") + std::to_string(v);
  const bool ok = r2.failures == 0 && rm.failures == 0 && covered2 >= 95 &&
                  worst >= 95;
  return {ok, "setup2 " + std::to_string(covered2) +
                  "/100 (theoretical kappa: " + std::to_string(covered2t) +
                  "/100); markov per step " + steps + " of 100; target >= 95"};
}

// 5. Exact inputs give the exact rewards.
Outcome oracle_recovery() {
  CounterRng rng(20260005);
  const QLinearInstance inst =
      make_q_linear_instance(4, 5, 5, 6, 6, 1.0, 0.5, rng);
  int rank_ok = 0;
  for (int h = 0; h < 6; ++h) {
    const StepwiseSystem sys = build_stepwise_system(
        inst.features, inst.solution.policies[h], 0.5);
    rank_ok += rank_condition(sys.X, 6).full_rank;
  }
  RecoveryConfig config;
  config.eta = 0.5;
  config.gamma = 1.0;
  config.kappa.assign(6, 0.0);
  const RewardRecovery rec =
      recover_rewards_from(inst.features, inst.solution.policies, {},
                           exact_transitions(inst.spec), config);
  const double d = reward_metric_D(rec.samples[0].r, inst.spec.rewards);
  return {rank_ok == 6 && d <= 1e-6,
          std::to_string(rank_ok) + "/6 steps full rank; D(r_hat, r) = " +
              fmt("%.2e", d) + " (target <= 1e-6)"};
}

// 6. Markov trend.
Outcome markov_trend(int reps) {
  ExperimentConfig c = preset(ExperimentKind::kMarkov);
  c.reps = reps;
  const ExperimentResult r = run_experiment(c);
  std::vector<double> means;
  for (std::size_t N : c.samples) {
    means.push_back(mean(column(r, N, &ErrorReport::qre_tv_err)));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < means.size(); ++i) {
    decreasing = decreasing && means[i] < means[i - 1];
  }
  const double ratio = means.back() / means.front();
  return {!r.failure_threshold_exceeded() && r.failures == 0 && decreasing &&
              ratio <= 0.6,
          std::to_string(reps) + " reps, mean QRE error " +
              join(means, "%.4g") + "; ratio " + fmt("%.3f", ratio) +
              " (target <= 0.6)"};
}

// 7. Tabular ridge equals the empirical conditional mean.
Outcome ridge_oracle() {
  CounterRng rng(20260007);
  const int S = 2;
  MarkovGameSpec spec;
  spec.S = S;
  spec.m = 2;
  spec.n = 2;
  spec.H = 2;
  spec.eta = 0.5;
  spec.rewards.assign(2, StateMatrices(S));
  spec.transition.assign(2, std::vector<Matrix>(S));
  for (int h = 0; h < 2; ++h) {
    for (int s = 0; s < S; ++s) {
      spec.rewards[h][s] = Matrix::Random(2, 2);
      Matrix p(4, S);
      for (int k = 0; k < 4; ++k) p.row(k) = random_distribution(S, rng).transpose();
      spec.transition[h][s] = p;
    }
  }
  const MarkovSolution sol = backward_qre(spec);
  const EpisodeDataset data =
      sample_episodes(spec, sol.policies, uniform_distribution(S), 6000, rng);
  std::vector<MatrixFeatures> blocks;
  for (int s = 0; s < S; ++s) {
    Matrix rows = Matrix::Zero(4, 8);
    for (int k = 0; k < 4; ++k) rows(k, s * 4 + k) = 1.0;
    blocks.emplace_back(2, 2, rows);
  }
  const StateActionFeatures tab(std::move(blocks));
  Vector v(S);
  v << 0.7, -1.3;
  double worst = 0.0;
  double fewest = std::numeric_limits<double>::infinity();
  for (int h = 0; h < 2; ++h) {
    const RidgeTransitionEstimator est = ridge_fit(data, tab, 1e-9, h);
    Matrix sum = Matrix::Zero(S, 4);
    Matrix count = Matrix::Zero(S, 4);
    for (int t = 0; t < data.T; ++t) {
      const StepRecord& r = data.at(t, h);
      sum(r.state, r.action_a * 2 + r.action_b) += v[r.next_state];
      count(r.state, r.action_a * 2 + r.action_b) += 1.0;
    }
    fewest = std::min(fewest, count.minCoeff());
    for (int s = 0; s < S; ++s) {
      for (int k = 0; k < 4; ++k) {
        const double pred = apply_transition_estimate(est, tab, v, s, k / 2, k % 2);
        worst = std::max(worst, std::abs(pred - sum(s, k) / count(s, k)));
      }
    }
  }
  return {fewest >= 100 && worst <= 1e-6,
          "fewest visits " + fmt("%.0f", fewest) + "; max deviation " +
              fmt("%.2e", worst) + " (target <= 1e-6)"};
}

// 8. MLE suite.
Matrix draw_counts(const SoftmaxFeatures& psi, const Vector& param,
                   const Vector& rho, int T, CounterRng& rng) {
  std::vector<double> cs(rho.size());
  std::partial_sum(rho.begin(), rho.end(), cs.begin());
  std::vector<std::vector<double>> ca(psi.S);
  for (int s = 0; s < psi.S; ++s) {
    const Vector p = softmax_policy(psi, param, s);
    ca[s].resize(p.size());
    std::partial_sum(p.begin(), p.end(), ca[s].begin());
  }
  Matrix counts = Matrix::Zero(psi.S, psi.actions);
  for (int t = 0; t < T; ++t) {
    const int s = rng.sample_cdf(cs);
    counts(s, rng.sample_cdf(ca[s])) += 1.0;
  }
  return counts;
}

Outcome mle_suite() {
  // Grid oracle on the two-action example.
  const SoftmaxFeatures two = one_hot_action_features(1, 2, 1.0);
  Matrix all_first(1, 2);
  all_first << 100, 0;
  MleOptions trace;
  trace.record_trace = true;
  const MleResult fit = mle_fit(two, all_first, trace);
  double best = std::numeric_limits<double>::infinity();
  Vector arg(2);
  for (int i = 0; i < 100000; ++i) {
    const double t = 2.0 * M_PI * i / 100000.0;
    Vector p(2);
    p << std::cos(t), std::sin(t);
    const double v = softmax_nll(two, all_first, p);
    if (v < best) {
      best = v;
      arg = p;
    }
  }
  const double grid_gap = (fit.param - arg).norm();

  // Monotone objective on the rate problems below, plus the example.
  bool monotone = true;
  auto check_trace = [&](const MleResult& r) {
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
      monotone = monotone &&
                 r.objective_trace[k] <= r.objective_trace[k - 1] * (1 + 1e-14);
    }
  };
  check_trace(fit);

  // Mean squared TV against (d_a log T) / T.
  const int S = 4;
  const int m = 5;
  const SoftmaxFeatures psi = one_hot_action_features(S, m, 1.0);
  Vector truth(m);
  truth << 0.5, -0.3, 0.2, -0.4, 0.1;
  Vector rho(S);
  rho << 0.1, 0.2, 0.3, 0.4;
  CounterRng rng(20260008);
  std::vector<double> ratios;
  for (int T : {1000, 10000, 100000}) {
    double msq = 0.0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
      const Matrix counts = draw_counts(psi, truth, rho, T, rng);
      const MleResult r = mle_fit(psi, counts, trace);
      check_trace(r);
      for (int s = 0; s < S; ++s) {
        const double t = tv(softmax_policy(psi, r.param, s),
                            softmax_policy(psi, truth, s));
        msq += rho[s] * t * t / reps;
      }
    }
    ratios.push_back(msq / (m * std::log(T) / T));
  }
  const double worst = *std::max_element(ratios.begin(), ratios.end());
  return {monotone && grid_gap <= 1e-3 && worst <= 10.0,
          std::string("objective ") + (monotone ? "monotone" : "NOT monotone") +
              "; grid gap " + fmt("%.1e", grid_gap) +
              "; error/proxy at T=1e3,1e4,1e5: " + join(ratios, "%.3f") +
              " (target <= 10)"};
}

// 9. Metric suite.
Outcome metric_suite() {
  auto v2 = [](double a, double b) {
    Vector x(2);
    x << a, b;
    return x;
  };
  bool exact = tv(v2(0.3, 0.7), v2(0.3, 0.7)) == 0.0 &&
               tv(v2(1, 0), v2(0, 1)) == 1.0 &&
               std::abs(tv(v2(0.7, 0.3), v2(0.5, 0.5)) - 0.2) <= 1e-15 &&
               hellinger_sq(v2(0.3, 0.7), v2(0.3, 0.7)) == 0.0 &&
               hellinger_sq(v2(1, 0), v2(0, 1)) == 1.0;
  CounterRng rng(20260009);
  auto rewards = [&](int H, int S) {
    StepTensor r(H, StateMatrices(S));
    for (auto& step : r) {
      for (Matrix& b : step) {
        b.resize(3, 2);
        for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.normal();
      }
    }
    return r;
  };
  const StepTensor base = rewards(2, 3);
  StepTensor moved = base;
  moved[1][2](2, 1) += 0.5;
  std::vector<Vector> point(2, Vector::Zero(3));
  for (Vector& p : point) p[2] = 1.0;
  exact = exact && reward_metric_D(base, base) == 0.0 &&
          reward_metric_D(base, moved) == 0.5 &&
          reward_metric_D1(base, base, point) == 0.0 &&
          reward_metric_D1(base, moved, point) == 0.5;

  int tv_violations = 0;
  int d_violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const Vector p = random_distribution(2 + k % 6, rng);
    const Vector q = random_distribution(2 + k % 6, rng);
    if (tv(p, q) > std::sqrt(2.0 * hellinger_sq(p, q)) + 1e-15) ++tv_violations;
    const StepTensor a = rewards(2, 3);
    const StepTensor b = rewards(2, 3);
    const std::vector<Vector> rho{random_distribution(3, rng),
                                  random_distribution(3, rng)};
    if (reward_metric_D1(a, b, rho) > reward_metric_D(a, b) + 1e-15) {
      ++d_violations;
    }
  }
  return {exact && tv_violations == 0 && d_violations == 0,
          std::string("identities ") + (exact ? "exact" : "NOT exact") +
              "; TV <= sqrt2 H violations " + std::to_string(tv_violations) +
              "/1000; D1 <= D violations " + std::to_string(d_violations) +
              "/1000"};
}

// 10. Byte-identical CSVs on reruns and across thread counts.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  std::vector<ExperimentConfig> configs;
  for (ExperimentKind k : {ExperimentKind::kSetup1, ExperimentKind::kSetup2,
                           ExperimentKind::kMarkov}) {
    ExperimentConfig c = preset(k);
    c.reps = 4;
    c.samples.resize(2);
    configs.push_back(c);
  }
  const fs::path root = fs::temp_directory_path() / "qre_acceptance_c10";
  int compared = 0;
  int identical = 0;
  for (ExperimentConfig c : configs) {
    std::vector<fs::path> dirs;
    for (int run = 0; run < 3; ++run) {
      c.threads = run == 2 ? 2 : 1;
      dirs.push_back(root / (c.name + std::to_string(run)));
      fs::remove_all(dirs.back());
      emit_csv(run_experiment(c), dirs.back());
    }
    for (const char* name : {"runs.csv", "summary.csv", "steps.csv"}) {
      if (!fs::exists(dirs[0] / name)) continue;
      for (int run = 1; run < 3; ++run) {
        ++compared;
        identical += slurp(dirs[0] / name) == slurp(dirs[run] / name);
      }
    }
  }
  fs::remove_all(root);
  return {compared > 0 && identical == compared,
          std::to_string(identical) + "/" + std::to_string(compared) +
              " file comparisons identical (setup1, setup2, markov; reruns "
              "and 2 threads)"};
}

struct Criterion {
  std::string id;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"1", 10, forward_solver},
      {"2", 300, setup1_rate},
      {"3", 600, setup2_behavior},
      {"4", 600, coverage},
      {"5", 30, oracle_recovery},
      {"6", 3600, [] { return markov_trend(100); }},
      {"6s", 600, [] { return markov_trend(20); }},
      {"7", 30, ridge_oracle},
      {"8", 300, mle_suite},
      {"9", 5, metric_suite},
      {"10", 600, determinism},
  };
  const std::string which = argc > 1 ? argv[1] : "all";
  bool any = false;
  bool ok = true;
  for (const Criterion& c : all) {
    if (which != "all" && which != c.id) continue;
    any = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (secs > c.limit_s) {
      out.pass = false;
      out.detail += "; over the " + fmt("%.0f", c.limit_s) + " s budget";
    }
    std::printf("CRITERION %s %s: %s (%.2f s)\n", c.id.c_str(),
                out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
    std::fflush(stdout);
    ok = ok && out.pass;
  }
  if (!any) {
    std::fprintf(stderr, "unknown criterion '%s'\n", which.c_str());
    return 2;
  }
  return ok ? 0 : 1;
}
