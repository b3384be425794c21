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

#ifndef SHUFFLEPAN_FOURIER_H_
#define SHUFFLEPAN_FOURIER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "shufflepan/finite_distribution.h"

namespace shufflepan {

// Subsets of [d] as bit masks use the same significance as hypercube
// indices: coordinate j (one-based) is bit d - j.
uint64_t SubsetMask(const std::vector<int>& subset, int d);

// Character chi_t at the point with hypercube index x: (-1)^|t & x|.
inline int Character(uint64_t subset_mask, uint64_t point_index) {
  return (__builtin_popcountll(subset_mask & point_index) & 1) ? -1 : 1;
}

// E_{x ~ dist}[prod_{i in t} x_i]. Fails unless dist lives on a hypercube.
absl::StatusOr<double> FourierCoefficient(const FiniteDistribution& dist,
                                          const std::vector<int>& subset);

// All coefficients f^(t) = E_{x ~ U}[f(x) chi_t(x)] of f: {-1,+1}^d -> R,
// indexed by subset mask. `values` has length 2^d in hypercube order.
// Fast Walsh-Hadamard transform, O(d 2^d).
absl::StatusOr<std::vector<double>> WalshHadamard(std::span<const double> values);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_FOURIER_H_
