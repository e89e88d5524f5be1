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
#include "model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qre::tools {

using nlohmann::json;

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("expected a nonempty array of rows");
  }
  const std::size_t cols = j.front().size();
  Matrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != cols) throw std::invalid_argument("ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

Vector vector_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ModelFile model_from_instance(const ExperimentConfig& config,
                              const MatrixInstance& inst) {
  ModelFile out;
  out.config = config;
  out.features = StateActionFeatures({inst.features});
  out.theta = inst.theta;
  return out;
}

ModelFile model_from_instance(const ExperimentConfig& config,
                              const MarkovInstance& inst) {
  ModelFile out;
  out.config = config;
  out.features = inst.model.features;
  out.omega = inst.model.omega;
  out.transition_map = inst.model.transition_map;
  return out;
}

json model_to_json(const ModelFile& model) {
  const ExperimentConfig& c = model.config;
  json j;
  j["model"] = c.model == ModelKind::kMatrix ? "matrix" : "markov";
  j["estimator"] = to_string(c.estimator);
  j["m"] = c.m;
  j["n"] = c.n;
  j["S"] = c.S;
  j["H"] = c.H;
  j["d"] = c.d;
  j["eta"] = c.eta;
  j["gamma"] = c.gamma;
  j["bound"] = c.bound;
  j["kappa_scale"] = c.kappa_scale;
  j["lambda"] = c.lambda;
  j["K"] = c.K;
  j["softmax_basis"] =
      c.softmax_basis == SoftmaxBasis::kAction ? "action" : "saturated";
  json features = json::array();
  for (const MatrixFeatures& f : model.features.per_state) {
    features.push_back(to_json(f.table));
  }
  j["features"] = std::move(features);
  if (c.model == ModelKind::kMatrix) {
    j["theta"] = to_json(model.theta);
  } else {
    json omega = json::array();
    json maps = json::array();
    for (const Vector& w : model.omega) omega.push_back(to_json(w));
    for (const Matrix& p : model.transition_map) maps.push_back(to_json(p));
    j["omega"] = std::move(omega);
    j["transition_map"] = std::move(maps);
  }
  return j;
}

ModelFile model_from_json(const json& j) {
  ModelFile out;
  ExperimentConfig& c = out.config;
  const std::string kind = j.at("model").get<std::string>();
  c = preset(kind == "matrix" ? ExperimentKind::kSetup1
                              : ExperimentKind::kMarkov);
  c.kind = ExperimentKind::kCustom;
  c.name = "custom";
  c.m = j.at("m").get<int>();
  c.n = j.at("n").get<int>();
  c.S = j.at("S").get<int>();
  c.H = j.at("H").get<int>();
  c.d = j.at("d").get<int>();
  c.eta = j.at("eta").get<double>();
  c.gamma = j.value("gamma", 1.0);
  c.bound = j.at("bound").get<double>();
  c.kappa_scale = j.value("kappa_scale", 1e3);
  c.lambda = j.value("lambda", 0.01);
  c.K = j.value("K", 1.0);
  c.softmax_basis = j.value("softmax_basis", std::string("action")) == "action"
                        ? SoftmaxBasis::kAction
                        : SoftmaxBasis::kSaturated;
  const std::string est = j.value("estimator", to_string(c.estimator));
  for (Estimator e : {Estimator::kLeastSquares, Estimator::kMinNorm,
                      Estimator::kFrequency, Estimator::kMle}) {
    if (to_string(e) == est) c.estimator = e;
  }

  std::vector<MatrixFeatures> blocks;
  for (const json& block : j.at("features")) {
    blocks.emplace_back(c.m, c.n, matrix_from_json(block));
  }
  if (static_cast<int>(blocks.size()) != c.S) {
    throw std::invalid_argument("model: one feature block per state needed");
  }
  out.features = StateActionFeatures(std::move(blocks));
  if (kind == "matrix") {
    c.model = ModelKind::kMatrix;
    out.theta = vector_from_json(j.at("theta"));
    c.theta.assign(out.theta.data(), out.theta.data() + out.theta.size());
  } else {
    c.model = ModelKind::kMarkov;
    for (const json& w : j.at("omega")) out.omega.push_back(vector_from_json(w));
    for (const json& p : j.at("transition_map")) {
      out.transition_map.push_back(matrix_from_json(p));
    }
    if (static_cast<int>(out.omega.size()) != c.H ||
        static_cast<int>(out.transition_map.size()) != c.H) {
      throw std::invalid_argument("model: omega and transition_map need H entries");
    }
    c.omega.assign(out.omega.front().data(),
                   out.omega.front().data() + out.omega.front().size());
  }
  c.validate();
  return out;
}

MatrixGameSpec matrix_spec(const ModelFile& model) {
  return {payoff_from_features(model.features.per_state.front(), model.theta),
          model.config.eta};
}

LinearMDPModel linear_mdp(const ModelFile& model) {
  return {model.features, model.omega, model.transition_map};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace qre::tools
