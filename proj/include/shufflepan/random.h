// Copyright 2026 The Shufflepan Authors
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

#ifndef SHUFFLEPAN_RANDOM_H_
#define SHUFFLEPAN_RANDOM_H_

#include <cstdint>
#include <random>

namespace shufflepan {

// Mixes a 64-bit value with the SplitMix64 finalizer.
uint64_t SplitMix64(uint64_t x);

// Derives the seed of one trial from the master seed, an experiment id and
// the trial index:
//
//   SplitMix64(master ^ SplitMix64(experiment_id ^ SplitMix64(trial_index)))
//
// This rule is part of the output format: changing it changes every CSV.
uint64_t TrialSeed(uint64_t master_seed, uint64_t experiment_id,
                   uint64_t trial_index);

// Seeded random source shared by every sampler in the library. Wraps a
// 64-bit Mersenne twister; all continuous draws go through Uniform53() so
// that results only depend on the engine's integer stream.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform53();
  // Uniform double in the open interval (0, 1).
  double UniformOpen();
  bool Bernoulli(double p);
  // Uniform integer in [0, n).
  uint64_t UniformInt(uint64_t n);
  // +1 or -1, each with probability 1/2.
  int Sign();
  // The +-1 law with mean `mean` (Pr[+1] = (1 + mean) / 2).
  int Rademacher(double mean);
  // Laplace(0, scale) by inverse CDF of one 53-bit uniform. A scale of 0
  // returns exactly 0.
  double Laplace(double scale);
  int64_t Binomial(int64_t n, double p);

  // Derives an independent child generator; consumes one draw.
  Rng Fork();

 private:
  std::mt19937_64 engine_;
};

}  // namespace shufflepan

#endif  // SHUFFLEPAN_RANDOM_H_
