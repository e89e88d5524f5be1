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
#ifndef QRE_TOOLS_MODEL_IO_HPP_
#define QRE_TOOLS_MODEL_IO_HPP_

#include <filesystem>

#include "json.hpp"
#include "qre/experiment.hpp"

namespace qre::tools {

// Ground-truth model written by "simulate" and read by the inversion
// commands. Matrix models have S = H = 1.
struct ModelFile {
  ExperimentConfig config;
  StateActionFeatures features;
  Vector theta;                        // matrix models
  std::vector<Vector> omega;           // Markov models, [h]
  std::vector<Matrix> transition_map;  // Markov models, [h] S x d
};

nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const Vector& v);
Matrix matrix_from_json(const nlohmann::json& j);
Vector vector_from_json(const nlohmann::json& j);

ModelFile model_from_instance(const ExperimentConfig& config,
                              const MatrixInstance& inst);
ModelFile model_from_instance(const ExperimentConfig& config,
                              const MarkovInstance& inst);

nlohmann::json model_to_json(const ModelFile& model);
ModelFile model_from_json(const nlohmann::json& j);

MatrixGameSpec matrix_spec(const ModelFile& model);
LinearMDPModel linear_mdp(const ModelFile& model);

nlohmann::json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace qre::tools

#endif  // QRE_TOOLS_MODEL_IO_HPP_
