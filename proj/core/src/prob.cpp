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
#include "qre/prob.hpp"

#include <cmath>

namespace qre {

Vector softmax(const Vector& logits) {
  if (logits.size() == 0) throw DimensionError("softmax of empty vector");
  const double top = logits.maxCoeff();
  Vector out = (logits.array() - top).exp().matrix();
  out /= out.sum();
  return out;
}

double log_sum_exp(const Vector& logits) {
  if (logits.size() == 0) throw DimensionError("log_sum_exp of empty vector");
  const double top = logits.maxCoeff();
  return top + std::log((logits.array() - top).exp().sum());
}

double entropy(const Vector& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

bool is_distribution(const Vector& p, double tol) {
  if (p.size() == 0) return false;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0) || !std::isfinite(p[i])) return false;
  }
  return std::abs(p.sum() - 1.0) <= tol;
}

Vector uniform_distribution(Eigen::Index size) {
  return Vector::Constant(size, 1.0 / static_cast<double>(size));
}

}  // namespace qre
