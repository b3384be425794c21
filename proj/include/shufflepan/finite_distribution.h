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

#ifndef SHUFFLEPAN_FINITE_DISTRIBUTION_H_
#define SHUFFLEPAN_FINITE_DISTRIBUTION_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "shufflepan/random.h"

namespace shufflepan {

// Probabilities must sum to 1 within this tolerance.
inline constexpr double kMassTolerance = 1e-12;

// Compensated (Neumaier) summation.
double StableSum(std::span<const double> values);

// An explicit pmf over the finite domain {0, ..., m-1}. When m is a power of
// two the domain doubles as the hypercube {-1,+1}^log2(m) in the order
// documented on BitVector.
class FiniteDistribution {
 public:
  static absl::StatusOr<FiniteDistribution> Create(std::vector<double> pmf);
  // Normalizes non-negative weights; fails if they are all zero.
  static absl::StatusOr<FiniteDistribution> FromWeights(
      std::vector<double> weights);
  static FiniteDistribution Uniform(size_t size);
  static FiniteDistribution PointMass(size_t size, size_t index);

  size_t size() const { return pmf_.size(); }
  double operator[](size_t i) const { return pmf_[i]; }
  std::span<const double> pmf() const { return pmf_; }

  // d when size() == 2^d, nothing otherwise.
  std::optional<int> HypercubeDimension() const;

  size_t Sample(Rng& rng) const;

  // Mixture sum_i weights[i] * components[i]; all components share a domain.
  static absl::StatusOr<FiniteDistribution> Mix(
      std::span<const FiniteDistribution> components,
      std::span<const double> weights);

  // CSV with header `index,x,prob`. On a hypercube domain x is the "+-" string
  // of the point, otherwise it repeats the index. Probabilities are printed
  // with 17 significant digits so dumps are byte-stable.
  std::string ToCsv() const;

 private:
  explicit FiniteDistribution(std::vector<double> pmf);

  std::vector<double> pmf_;
  std::vector<double> cdf_;
};

}  // namespace shufflepan

#endif  // SHUFFLEPAN_FINITE_DISTRIBUTION_H_
