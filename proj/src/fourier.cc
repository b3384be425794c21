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

#include "shufflepan/fourier.h"

#include <bit>

#include "absl/status/status.h"

namespace shufflepan {

uint64_t SubsetMask(const std::vector<int>& subset, int d) {
  uint64_t mask = 0;
  for (int j : subset) mask |= uint64_t{1} << (d - j);
  return mask;
}

absl::StatusOr<double> FourierCoefficient(const FiniteDistribution& dist,
                                          const std::vector<int>& subset) {
  const std::optional<int> d = dist.HypercubeDimension();
  if (!d) {
    return absl::InvalidArgumentError(
        "Fourier coefficients need a hypercube domain");
  }
  for (int j : subset) {
    if (j < 1 || j > *d) {
      return absl::InvalidArgumentError("subset index outside [1, d]");
    }
  }
  const uint64_t mask = SubsetMask(subset, *d);
  std::vector<double> terms(dist.size());
  for (uint64_t x = 0; x < dist.size(); ++x) {
    terms[x] = Character(mask, x) * dist[x];
  }
  return StableSum(terms);
}

absl::StatusOr<std::vector<double>> WalshHadamard(
    std::span<const double> values) {
  const size_t m = values.size();
  if (m < 2 || !std::has_single_bit(m)) {
    return absl::InvalidArgumentError("length must be a power of two >= 2");
  }
  std::vector<double> a(values.begin(), values.end());
  for (size_t half = 1; half < m; half <<= 1) {
    for (size_t block = 0; block < m; block += 2 * half) {
      for (size_t i = block; i < block + half; ++i) {
        const double u = a[i];
        const double v = a[i + half];
        a[i] = u + v;
        a[i + half] = u - v;
      }
    }
  }
  const double scale = 1.0 / static_cast<double>(m);
  for (double& v : a) v *= scale;
  return a;
}

}  // namespace shufflepan
