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

#include "shufflepan/random.h"

#include <cmath>

namespace shufflepan {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t TrialSeed(uint64_t master_seed, uint64_t experiment_id,
                   uint64_t trial_index) {
  return SplitMix64(master_seed ^
                    SplitMix64(experiment_id ^ SplitMix64(trial_index)));
}

double Rng::Uniform53() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::UniformOpen() {
  // (k + 0.5) / 2^53 for k in [0, 2^53) never hits 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

bool Rng::Bernoulli(double p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  return Uniform53() < p;
}

uint64_t Rng::UniformInt(uint64_t n) {
  // Rejection sampling keeps the result exactly uniform.
  const uint64_t limit = max() - max() % n;
  uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

int Rng::Sign() { return (engine_() >> 63) ? -1 : 1; }

int Rng::Rademacher(double mean) {
  return Bernoulli((1.0 + mean) / 2.0) ? 1 : -1;
}

double Rng::Laplace(double scale) {
  const double u = UniformOpen() - 0.5;
  if (scale == 0) return 0;
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0 ? -magnitude : magnitude;
}

int64_t Rng::Binomial(int64_t n, double p) {
  if (n <= 0 || p <= 0) return 0;
  if (p >= 1) return n;
  std::binomial_distribution<int64_t> dist(n, p);
  return dist(engine_);
}

Rng Rng::Fork() { return Rng(SplitMix64(engine_())); }

}  // namespace shufflepan
