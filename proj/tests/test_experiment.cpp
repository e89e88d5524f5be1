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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "qre/experiment.hpp"

using namespace qre;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qre_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small_setup1() {
  ExperimentConfig c = preset(ExperimentKind::kSetup1);
  c.samples = {1000};
  c.reps = 2;
  return c;
}

ExperimentConfig small_markov() {
  ExperimentConfig c = parse_config(
      R"({"kind": "markov", "samples": [500, 1000], "reps": 2, "H": 3})");
  return c;
}

}  // namespace

TEST_CASE("presets carry the experiment parameters") {
  const ExperimentConfig s1 = preset(ExperimentKind::kSetup1);
  CHECK(s1.m == 4);
  CHECK(s1.n == 6);
  CHECK(s1.d == 2);
  CHECK(s1.theta == std::vector<double>{0.8, -0.6});
  CHECK(s1.eta == 0.5);
  CHECK(s1.samples ==
        std::vector<std::size_t>{1000, 10000, 100000, 1000000});
  CHECK(s1.reps == 100);
  const ExperimentConfig s2 = preset(ExperimentKind::kSetup2);
  CHECK(s2.m == 6);
  CHECK(s2.n == 6);
  CHECK(s2.theta ==
        std::vector<double>{0.8, -0.6, 0.75, 0.2, 0.5, -0.5});
  CHECK(s2.bound == 4.0);
  const ExperimentConfig mk = preset(ExperimentKind::kMarkov);
  CHECK(mk.S == 4);
  CHECK(mk.H == 6);
  CHECK(mk.m == 5);
  CHECK(mk.n == 5);
  CHECK(mk.lambda == 0.01);
  CHECK(mk.bound == 10.0);
  CHECK(mk.omega == std::vector<double>{0.8, -0.6});
  CHECK(mk.samples == std::vector<std::size_t>{10000, 20000, 50000, 100000});
  CHECK(kappa_for(mk, 10000) == doctest::Approx(0.1));
  CHECK_NOTHROW(s1.validate());
  CHECK_NOTHROW(s2.validate());
  CHECK_NOTHROW(mk.validate());
}

TEST_CASE("config parsing overrides presets") {
  const ExperimentConfig c = parse_config(
      R"({"kind": "setup2", "reps": 7, "samples": [10, 20], "seed": 9,
          "threads": 3, "out": "x"})");
  CHECK(c.kind == ExperimentKind::kSetup2);
  CHECK(c.reps == 7);
  CHECK(c.samples == std::vector<std::size_t>{10, 20});
  CHECK(c.seed == 9);
  CHECK(c.threads == 3);
  CHECK(c.out == "x");
  CHECK(c.d == 6);
  const ExperimentConfig custom = parse_config(
      R"({"kind": "custom", "model": "markov", "estimator": "frequency",
          "S": 2, "H": 2})");
  CHECK(custom.model == ModelKind::kMarkov);
  CHECK(custom.estimator == Estimator::kFrequency);
  CHECK(custom.S == 2);
}

TEST_CASE("config errors name the problem") {
  const auto rejects = [](const std::string& text, const std::string& needle) {
    try {
      parse_config(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  CHECK(rejects("{", "invalid JSON"));
  CHECK(rejects("[1]", "object"));
  CHECK(rejects(R"({"kind": "nope"})", "kind"));
  CHECK(rejects(R"({"kind": "setup1", "bogus": 1})", "bogus"));
  CHECK(rejects(R"({"kind": "setup1", "reps": "many"})", "type"));
  CHECK(rejects(R"({"kind": "setup1", "reps": 0})", "reps"));
  CHECK(rejects(R"({"kind": "setup1", "samples": [100, 100]})", "increasing"));
  CHECK(rejects(R"({"kind": "setup1", "eta": 0})", "eta"));
  CHECK(rejects(R"({"kind": "setup1", "theta": [1]})", "theta"));
  CHECK(rejects(R"({"kind": "setup1", "estimator": "mle"})", "estimator"));
  CHECK(rejects(R"({"kind": "markov", "estimator": "min_norm"})",
                "estimator"));
  CHECK(rejects(R"({"kind": "custom"})", "model"));
  CHECK(rejects(R"({"kind": "markov", "d_a": 3})", "d_a"));
  CHECK(rejects(R"({"kind": "markov", "gamma": 1.5})", "gamma"));
}

TEST_CASE("percentile interpolates order statistics") {
  CHECK(percentile({3.0, 1.0, 2.0}, 0.5) == 2.0);
  CHECK(percentile({0.0, 10.0}, 0.25) == doctest::Approx(2.5));
  CHECK(percentile({5.0}, 0.975) == 5.0);
  CHECK_THROWS(percentile({}, 0.5));
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333");
}

TEST_CASE("setup1 bookkeeping: two records, per-metric summary") {
  const ExperimentResult r = run_experiment(small_setup1());
  REQUIRE(r.records.size() == 2);
  CHECK(r.failures == 0);
  for (int i = 0; i < 2; ++i) {
    const RunRecord& rec = r.records[i];
    CHECK(rec.experiment == "setup1");
    CHECK(rec.sample_size == 1000);
    CHECK(rec.rep == i);
    CHECK(rec.errors.theta_err.has_value());
    CHECK(rec.errors.payoff_err.has_value());
    CHECK(rec.errors.qre_tv_err.has_value());
    CHECK_FALSE(rec.errors.reward_D.has_value());
    CHECK_FALSE(rec.duration_ms.has_value());
  }
  // One row per reported metric for the single sample size.
  CHECK(r.summary.size() == 3);
  for (const SummaryRow& row : r.summary) {
    CHECK(row.sample_size == 1000);
    CHECK(row.ci_lo <= row.mean);
    CHECK(row.mean <= row.ci_hi);
  }
  const double mean = 0.5 * (*r.records[0].errors.theta_err +
                             *r.records[1].errors.theta_err);
  CHECK(r.summary[0].metric == "theta_err");
  CHECK(r.summary[0].mean == doctest::Approx(mean));
}

TEST_CASE("run_single matches the record inside run_experiment") {
  const ExperimentConfig c = small_setup1();
  const ExperimentResult r = run_experiment(c);
  const RunRecord one = run_single(c, 1000, 1);
  CHECK(*one.errors.theta_err == *r.records[1].errors.theta_err);
  CHECK(one.seed == r.records[1].seed);
}

TEST_CASE("empty results give header-only CSVs") {
  const fs::path dir = scratch("empty");
  emit_csv(ExperimentResult{}, dir);
  CHECK(slurp(dir / "runs.csv") ==
        "experiment,sample_size,rep,seed,theta_err,payoff_err,qre_tv_err,"
        "reward_D,reward_D1,duration_ms\n");
  CHECK(slurp(dir / "summary.csv") ==
        "experiment,sample_size,metric,mean,ci_lo,ci_hi\n");
  CHECK_FALSE(fs::exists(dir / "steps.csv"));
  fs::remove_all(dir);
}

TEST_CASE("setup1 CSVs: row counts and empty absent fields") {
  const fs::path dir = scratch("setup1");
  emit_csv(run_experiment(small_setup1()), dir);
  const auto runs = lines(slurp(dir / "runs.csv"));
  REQUIRE(runs.size() == 3);
  for (std::size_t i = 1; i < runs.size(); ++i) {
    const auto f = split(runs[i]);
    REQUIRE(f.size() == 10);
    CHECK(f[0] == "setup1");
    CHECK_FALSE(f[4].empty());
    CHECK(f[7].empty());
    CHECK(f[8].empty());
    CHECK(f[9].empty());
  }
  CHECK(lines(slurp(dir / "summary.csv")).size() == 4);
  fs::remove_all(dir);
}

TEST_CASE("Markov CSVs carry per-step rows and reward metrics") {
  const fs::path dir = scratch("markov");
  const ExperimentResult r = run_experiment(small_markov());
  CHECK(r.failures == 0);
  emit_csv(r, dir);
  const auto runs = lines(slurp(dir / "runs.csv"));
  REQUIRE(runs.size() == 5);
  const auto f = split(runs[1]);
  CHECK_FALSE(f[7].empty());
  CHECK_FALSE(f[8].empty());
  const auto steps = lines(slurp(dir / "steps.csv"));
  CHECK(steps.size() == 1 + 4 * 3);
  CHECK(steps[0] ==
        "experiment,sample_size,rep,step,reward_fro_err,qre_tv_err,covered");
  fs::remove_all(dir);
}

TEST_CASE("identical configs give byte-identical files across thread counts") {
  for (ExperimentConfig c : {small_setup1(), small_markov()}) {
    c.reps = 3;
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    const fs::path t = scratch("det_t");
    emit_csv(run_experiment(c), a);
    emit_csv(run_experiment(c), b);
    c.threads = 2;
    emit_csv(run_experiment(c), t);
    for (const char* name : {"runs.csv", "summary.csv", "steps.csv"}) {
      CHECK(fs::exists(a / name) == fs::exists(b / name));
      if (!fs::exists(a / name)) continue;
      CHECK(slurp(a / name) == slurp(b / name));
      CHECK(slurp(a / name) == slurp(t / name));
    }
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(t);
  }
}

TEST_CASE("timing fills duration_ms") {
  ExperimentConfig c = small_setup1();
  c.timing = true;
  const ExperimentResult r = run_experiment(c);
  for (const RunRecord& rec : r.records) {
    REQUIRE(rec.duration_ms.has_value());
    CHECK(*rec.duration_ms >= 0.0);
  }
}

TEST_CASE("failure threshold") {
  ExperimentResult r;
  r.records.resize(20);
  r.failures = 1;
  CHECK_FALSE(r.failure_threshold_exceeded());
  r.failures = 2;
  CHECK(r.failure_threshold_exceeded());
}

TEST_CASE("unwritable output directory throws") {
  const fs::path file = scratch("blocker");
  std::ofstream(file) << "x";
  CHECK_THROWS_AS(emit_csv(ExperimentResult{}, file / "sub"),
                  std::runtime_error);
  fs::remove_all(file);
}
