// Copyright 2026 The hma-sim Authors
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

// Seeded random streams with bit-portable transforms.
//
// Golden result files must reproduce bit-for-bit across platforms and
// standard libraries, so the variate transforms are written out here instead
// of using std::uniform_real_distribution and friends (whose algorithms are
// implementation-defined). Only std::mt19937_64 itself is taken from the
// standard library; its output sequence is fully specified.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hma {

// Weyl-sequence increment used by splitmix64; also mixes (M, trial) pairs
// into well-separated seed inputs.
inline constexpr std::uint64_t kSeedMixGamma = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer. Bijective; decorrelates consecutive integers.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += kSeedMixGamma;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Per-trial seed: seed0 XOR splitmix64(M * gamma + trial). Every scheme row
// and duplex mode of one (M, trial) cell reuses this seed, which is what
// makes cross-scheme comparisons paired.
inline std::uint64_t trial_seed(std::uint64_t seed0, int num_ues, int trial) {
  return seed0 ^ splitmix64(static_cast<std::uint64_t>(num_ues) * kSeedMixGamma +
                            static_cast<std::uint64_t>(trial));
}

// Deterministic generator wrapping mt19937_64 with portable transforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution; never returns 1.0.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Unit-mean exponential via inverse CDF. uniform01() < 1 keeps the log
  // argument strictly positive.
  double exponential() { return -std::log1p(-uniform01()); }

  // Standard normal, Box-Muller cosine branch. The sine partner is discarded
  // so that one call always consumes exactly two engine outputs.
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hma
