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

#ifndef QRE_TYPES_HPP_
#define QRE_TYPES_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qre {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raised when inputs have inconsistent shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised for numerically meaningless inputs or outputs (log of zero,
// singular normal equations, empty sets).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative method hit its iteration cap.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual,
                   std::size_t iterations)
      : NumericalError(what), residual_(residual), iterations_(iterations) {}

  double residual() const { return residual_; }
  std::size_t iterations() const { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

// The normal matrix of a least-squares problem is singular: the parameter
// is only partially identified by the data.
class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qre

#endif  // QRE_TYPES_HPP_
