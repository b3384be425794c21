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

#ifndef SHUFFLEPAN_HARD_FAMILY_H_
#define SHUFFLEPAN_HARD_FAMILY_H_

#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "shufflepan/bit_vector.h"
#include "shufflepan/finite_distribution.h"
#include "shufflepan/random.h"

namespace shufflepan {

// Dense pmfs are refused above this many coordinates.
inline constexpr int kMaxDenseDimension = 20;

enum class FamilyTag {
  kParity,        // P_{d,ell,b,alpha} over {-1,+1}^d
  kSignedParity,  // Q_{d,ell,b,alpha} over {-1,+1}^{d+1}, label last
};

std::string FamilyName(FamilyTag tag);
absl::StatusOr<FamilyTag> ParseFamilyName(const std::string& name);

// One member of the parity-biased families, kept implicit so it can be
// evaluated and sampled at any dimension.
//
//   P: mass (1 + 2 alpha) 2^-d where prod_{i in ell} x_i == b,
//      (1 - 2 alpha) 2^-d elsewhere.
//   Q: mass (1 + 2 alpha) 2^-(d+1) where b prod_{i in ell} x_i == x_{d+1},
//      (1 - 2 alpha) 2^-(d+1) elsewhere. ell may be empty.
class HardDistribution {
 public:
  // alpha must lie in (0, 1/2). `test_mode` additionally admits the
  // endpoints: alpha = 0 collapses every member to the uniform distribution
  // and alpha = 1/2 makes the parity deterministic.
  static absl::StatusOr<HardDistribution> Create(FamilyTag tag, int d,
                                                 ParityIndex index,
                                                 double alpha,
                                                 bool test_mode = false);

  FamilyTag tag() const { return tag_; }
  int d() const { return d_; }
  // Dimension of the sample space: d for P, d + 1 for Q.
  int domain_dimension() const {
    return tag_ == FamilyTag::kParity ? d_ : d_ + 1;
  }
  const ParityIndex& index() const { return index_; }
  double alpha() const { return alpha_; }

  absl::StatusOr<double> Pmf(const BitVector& x) const;
  // Same as Pmf but without validation; x must have domain_dimension().
  double PmfUnchecked(const BitVector& x) const;

  // Draws uniform coordinates, then fixes the last coordinate of ell (or the
  // label, for Q) so the parity takes the biased value with probability
  // 1/2 + alpha. O(d) per draw; never materializes the pmf.
  BitVector Sample(Rng& rng) const;

  absl::StatusOr<FiniteDistribution> Densify() const;

  // {family, d, k, ell, b, alpha}; ell is one-based. `width` is the family
  // width k the member was enumerated under (defaults to |ell|).
  nlohmann::json ToJson(int width = -1) const;
  static absl::StatusOr<HardDistribution> FromJson(const nlohmann::json& j);

 private:
  HardDistribution(FamilyTag tag, int d, ParityIndex index, double alpha)
      : tag_(tag), d_(d), index_(std::move(index)), alpha_(alpha) {}

  FamilyTag tag_;
  int d_;
  ParityIndex index_;
  double alpha_;
};

// Uniform distribution over {-1,+1}^d at any dimension.
struct UniformCube {
  int d = 1;
};

// Anything the samplers accept.
using DistributionHandle =
    std::variant<HardDistribution, FiniteDistribution, UniformCube>;

int DomainDimension(const DistributionHandle& dist);
BitVector SampleOne(const DistributionHandle& dist, Rng& rng);

// A weighted mixture of handles over a common hypercube.
class Mixture {
 public:
  static absl::StatusOr<Mixture> Create(std::vector<DistributionHandle> parts,
                                        std::vector<double> weights);
  // P_(b) = b * P + (1 - b) * U.
  static absl::StatusOr<Mixture> Dilute(DistributionHandle p, double b);
  // Equal weights.
  static absl::StatusOr<Mixture> Uniform(std::vector<DistributionHandle> parts);

  int domain_dimension() const;
  BitVector Sample(Rng& rng) const;
  // Also reports which component produced the draw.
  BitVector Sample(Rng& rng, size_t& component) const;
  absl::StatusOr<FiniteDistribution> Densify() const;

  const std::vector<DistributionHandle>& parts() const { return parts_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  Mixture(std::vector<DistributionHandle> parts, std::vector<double> weights,
          FiniteDistribution picker)
      : parts_(std::move(parts)),
        weights_(std::move(weights)),
        picker_(std::move(picker)) {}

  std::vector<DistributionHandle> parts_;
  std::vector<double> weights_;
  FiniteDistribution picker_;
};

// n i.i.d. draws.
std::vector<BitVector> SampleMany(const DistributionHandle& dist, size_t n,
                                  Rng& rng);
std::vector<BitVector> SampleMany(const Mixture& dist, size_t n, Rng& rng);

absl::StatusOr<FiniteDistribution> Densify(const DistributionHandle& dist);

// Members of P_{d,k,alpha} (1 <= |ell| <= k) or Q_{d,k,alpha}
// (|ell| <= k, empty ell included). Sizes are 2 C(d,<=k) and
// 2 C(d,<=k) + 2 respectively. Order: by |ell|, then ell, then b = +1, -1.
//
// The two families admit different subset sizes (P excludes the empty set,
// Q admits it); the enumerator follows each family's own stated size.
absl::StatusOr<std::vector<HardDistribution>> EnumerateFamily(
    int d, int k, double alpha, FamilyTag tag, bool test_mode = false);

// Per-coordinate counts of +1 entries in n i.i.d. draws from `dist`, sampled
// directly from their joint law. Only valid when the coordinates are
// independent: UniformCube, or P/Q members with |ell| <= 1 (for Q with
// |ell| == 1 the label is correlated with one coordinate, so only P and the
// empty-ell Q qualify).
absl::StatusOr<std::vector<int64_t>> SampleCoordinatePlusCounts(
    const DistributionHandle& dist, int64_t n, Rng& rng);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_HARD_FAMILY_H_
