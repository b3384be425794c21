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

#ifndef SHUFFLEPAN_NORM_H_
#define SHUFFLEPAN_NORM_H_

#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "shufflepan/finite_distribution.h"
#include "shufflepan/hard_family.h"

namespace shufflepan {

// Largest domain the vertex enumeration accepts (2^16 test functions).
inline constexpr size_t kMaxNormDomain = 16;

struct NormReport {
  // Squared (inf -> 2)-norm: max over f in {-1,+1}^m of
  //   E_v[(E_{P_v} f - E_U f)^2],  U the uniform mixture of the family.
  double value_sq = 0;
  // 4 alpha^2 / C(d, <=k) when the family came from a descriptor.
  std::optional<double> bound_sq;
  // Maximizing test function in domain order; the lowest-index maximizer
  // within 1e-12, where f's index has bit x set iff f(x) = -1.
  std::vector<int> witness;

  double value() const;
  // {value_sq, bound_sq, witness_bits}
  nlohmann::json ToJson() const;
};

// Exhaustive maximization over the 2^m vertex test functions. The objective
// is a convex quadratic in f, so the supremum over [-1,1]-valued f is
// attained at a vertex.
absl::StatusOr<NormReport> InftyToTwoNormBruteforce(
    std::span<const FiniteDistribution> family, int threads = 1);

// Densifies the family descriptor, runs the enumeration and attaches the
// closed-form bound 4 alpha^2 / C(d, <=k).
absl::StatusOr<NormReport> InftyToTwoNormForFamily(int d, int k, double alpha,
                                                   FamilyTag tag,
                                                   int threads = 1);

// E_v[(E_{P_v} f - E_U f)^2] for one test function f (values +-1 or in
// [-1, 1]), U the uniform mixture of the family.
absl::StatusOr<double> NormObjective(std::span<const FiniteDistribution> family,
                                     std::span<const double> f);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_NORM_H_
