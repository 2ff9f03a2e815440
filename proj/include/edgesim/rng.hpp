// Copyright 2026 The edgesim Authors.
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

#include <cstdint>
#include <random>

namespace edgesim {

// Finalizer from the splitmix64 generator. Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Purpose tags so that consumers draw from decorrelated streams. Adding a
// stream never perturbs the draws seen by existing ones.
enum class Stream : std::uint64_t {
  kArrival = 1,
  kBattery = 2,
  kPolicy = 3,
  kExplore = 4,
  kReplaySample = 5,
  kNetInit = 6,
  kScenario = 7,
  kTrainPhase = 8,
  kEvalPhase = 9,
};

inline std::uint64_t derive_seed(std::uint64_t root, Stream stream,
                                 std::uint64_t index = 0) {
  return mix64(root ^ mix64(static_cast<std::uint64_t>(stream) ^
                            mix64(index + 0x632be59bd9b4e019ull)));
}

// A self-contained random stream. Every stochastic component owns one, keyed
// by (root seed, purpose, index), so runs replay bit-identically regardless
// of how many other components draw.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(std::uint64_t root, Stream stream, std::uint64_t index = 0)
      : engine_(derive_seed(root, stream, index)) {}

  double uniform() { return real_(engine_); }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  // Inclusive bounds.
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  bool bernoulli(double p) { return real_(engine_) < p; }

  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }
  const std::mt19937_64& engine() const { return engine_; }

 private:
  std::mt19937_64 engine_;
  // Kept stateless: every draw helper constructs its distribution per call
  // (or uses this carry-free one), so the engine alone is the full state.
  std::uniform_real_distribution<double> real_{0.0, 1.0};
};

}  // namespace edgesim
