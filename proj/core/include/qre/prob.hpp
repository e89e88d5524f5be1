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

#ifndef QRE_PROB_HPP_
#define QRE_PROB_HPP_

#include "qre/types.hpp"

namespace qre {

// Numerically stable softmax (max-subtracted before exponentiation).
Vector softmax(const Vector& logits);

// log(sum(exp(x))) with max subtraction.
double log_sum_exp(const Vector& logits);

// Shannon entropy -sum p log p, with 0 log 0 = 0.
double entropy(const Vector& p);

// Nonnegative entries summing to one within tol.
bool is_distribution(const Vector& p, double tol = 1e-12);

Vector uniform_distribution(Eigen::Index size);

}  // namespace qre

#endif  // QRE_PROB_HPP_
