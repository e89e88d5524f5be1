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

#ifndef QRE_RNG_HPP_
#define QRE_RNG_HPP_

#include <cstdint>
#include <limits>
#include <span>

namespace qre {

// Counter-based generator: the i-th output is the SplitMix64 finalizer of
// key + i * golden_gamma. Streams are addressed by (seed, rep, tag) so that
// repetitions can be generated in any order or in parallel and still be
// bit-identical. All distributions are implemented here rather than through
// <random> so output does not depend on the standard library vendor.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}

  // Independent stream for repetition rep of an experiment seeded by seed.
  // tag separates sub-streams inside one repetition (model vs. data).
  static CounterRng stream(std::uint64_t seed, std::uint64_t rep,
                           std::uint64_t tag = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal via Box-Muller.
  double normal();
  // Exponential(1).
  double exponential();
  // Index drawn from a cumulative distribution (last entry ~ 1).
  int sample_cdf(std::span<const double> cdf);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace qre

#endif  // QRE_RNG_HPP_
