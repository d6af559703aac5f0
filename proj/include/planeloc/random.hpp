// Copyright 2026 The planeloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace planeloc {

// Seeded generator whose draws are identical on every platform: the engine
// is fully specified by the standard and the distributions are spelled out
// here rather than taken from <random>, whose algorithms are unspecified.
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  // Seed of an independent stream for a named consumer.
  static std::uint64_t SubSeed(std::uint64_t seed, std::string_view name) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    // splitmix64 finalizer
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    return h ^ (h >> 31);
  }

  double Uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }
  int UniformInt(int n) {
    const int v = static_cast<int>(Uniform01() * n);
    return v < n ? v : n - 1;
  }

  // Box-Muller; one draw per call.
  double Normal(double mean = 0.0, double stddev = 1.0) {
    double u1 = Uniform01();
    while (u1 <= 0.0) u1 = Uniform01();
    const double u2 = Uniform01();
    return mean + stddev * std::sqrt(-2.0 * std::log(u1)) *
                      std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace planeloc
