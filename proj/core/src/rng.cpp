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
#include "qre/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qre {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng CounterRng::stream(std::uint64_t seed, std::uint64_t rep,
                              std::uint64_t tag) {
  std::uint64_t key = mix64(seed + kGoldenGamma);
  key = mix64(key ^ (rep * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
  key = mix64(key ^ (tag * 0xaef17502108ef2d9ULL + 0x2545f4914f6cdd1dULL));
  return CounterRng(key);
}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * kGoldenGamma);
}

double CounterRng::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // 1 - u keeps the argument of log strictly positive.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double CounterRng::exponential() { return -std::log(1.0 - uniform()); }

int CounterRng::sample_cdf(std::span<const double> cdf) {
  const double u = uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto idx = static_cast<int>(it - cdf.begin());
  return std::min(idx, static_cast<int>(cdf.size()) - 1);
}

}  // namespace qre
