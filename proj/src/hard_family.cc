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

#include "shufflepan/hard_family.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace shufflepan {

std::string FamilyName(FamilyTag tag) {
  return tag == FamilyTag::kParity ? "P" : "Q";
}

absl::StatusOr<FamilyTag> ParseFamilyName(const std::string& name) {
  if (name == "P") return FamilyTag::kParity;
  if (name == "Q") return FamilyTag::kSignedParity;
  return absl::InvalidArgumentError(absl::StrCat("unknown family '", name,
                                                 "', expected P or Q"));
}

absl::StatusOr<HardDistribution> HardDistribution::Create(FamilyTag tag, int d,
                                                          ParityIndex index,
                                                          double alpha,
                                                          bool test_mode) {
  if (d < 1) return absl::InvalidArgumentError("dimension must be >= 1");
  const bool alpha_ok =
      (alpha > 0 && alpha < 0.5) ||
      (test_mode && (alpha == 0 || alpha == 0.5));
  if (!alpha_ok) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in (0, 1/2), got ", alpha));
  }
  absl::StatusOr<ParityIndex> checked = ParityIndex::Create(
      index.subset, index.sign, d, tag == FamilyTag::kSignedParity);
  if (!checked.ok()) return checked.status();
  return HardDistribution(tag, d, *std::move(checked), alpha);
}

double HardDistribution::PmfUnchecked(const BitVector& x) const {
  int parity = x.Parity(index_.subset) * index_.sign;
  if (tag_ == FamilyTag::kSignedParity) parity *= x[d_];
  const double base = std::ldexp(1.0, -domain_dimension());
  return (1.0 + 2.0 * alpha_ * parity) * base;
}

absl::StatusOr<double> HardDistribution::Pmf(const BitVector& x) const {
  if (x.dimension() != domain_dimension()) {
    return absl::InvalidArgumentError(
        absl::StrCat("point has dimension ", x.dimension(), ", family ",
                     FamilyName(tag_), " expects ", domain_dimension()));
  }
  return PmfUnchecked(x);
}

BitVector HardDistribution::Sample(Rng& rng) const {
  BitVector x = BitVector::Random(domain_dimension(), rng);
  const int target = rng.Bernoulli(0.5 + alpha_) ? 1 : -1;
  // The coordinate that absorbs the parity constraint.
  const int free = tag_ == FamilyTag::kSignedParity ? d_
                                                     : index_.subset.back() - 1;
  x.Set(free, 1);
  int parity = x.Parity(index_.subset) * index_.sign;
  if (tag_ == FamilyTag::kSignedParity) parity *= x[d_];
  // parity currently has x[free] = +1; flip it when the target differs.
  if (parity != target) x.Set(free, -1);
  return x;
}

absl::StatusOr<FiniteDistribution> HardDistribution::Densify() const {
  const int dim = domain_dimension();
  if (dim > kMaxDenseDimension) {
    return absl::OutOfRangeError(absl::StrCat(
        "refusing to densify dimension ", dim, " > ", kMaxDenseDimension));
  }
  const uint64_t m = uint64_t{1} << dim;
  std::vector<double> pmf(m);
  for (uint64_t i = 0; i < m; ++i) {
    pmf[i] = PmfUnchecked(BitVector::FromIndex(i, dim));
  }
  return FiniteDistribution::Create(std::move(pmf));
}

nlohmann::json HardDistribution::ToJson(int width) const {
  return nlohmann::json{
      {"family", FamilyName(tag_)},
      {"d", d_},
      {"k", width >= 0 ? width : static_cast<int>(index_.subset.size())},
      {"ell", index_.subset},
      {"b", index_.sign},
      {"alpha", alpha_},
  };
}

absl::StatusOr<HardDistribution> HardDistribution::FromJson(
    const nlohmann::json& j) {
  try {
    absl::StatusOr<FamilyTag> tag =
        ParseFamilyName(j.at("family").get<std::string>());
    if (!tag.ok()) return tag.status();
    ParityIndex index{j.at("ell").get<std::vector<int>>(), j.at("b").get<int>()};
    return Create(*tag, j.at("d").get<int>(), std::move(index),
                  j.at("alpha").get<double>(), j.value("test_mode", false));
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed distribution descriptor: ", e.what()));
  }
}

int DomainDimension(const DistributionHandle& dist) {
  struct Visitor {
    int operator()(const HardDistribution& h) const {
      return h.domain_dimension();
    }
    int operator()(const FiniteDistribution& f) const {
      return f.HypercubeDimension().value_or(0);
    }
    int operator()(const UniformCube& u) const { return u.d; }
  };
  return std::visit(Visitor{}, dist);
}

BitVector SampleOne(const DistributionHandle& dist, Rng& rng) {
  struct Visitor {
    Rng& rng;
    BitVector operator()(const HardDistribution& h) const {
      return h.Sample(rng);
    }
    BitVector operator()(const FiniteDistribution& f) const {
      return BitVector::FromIndex(f.Sample(rng), *f.HypercubeDimension());
    }
    BitVector operator()(const UniformCube& u) const {
      return BitVector::Random(u.d, rng);
    }
  };
  return std::visit(Visitor{rng}, dist);
}

absl::StatusOr<FiniteDistribution> Densify(const DistributionHandle& dist) {
  struct Visitor {
    absl::StatusOr<FiniteDistribution> operator()(
        const HardDistribution& h) const {
      return h.Densify();
    }
    absl::StatusOr<FiniteDistribution> operator()(
        const FiniteDistribution& f) const {
      return f;
    }
    absl::StatusOr<FiniteDistribution> operator()(const UniformCube& u) const {
      if (u.d > kMaxDenseDimension) {
        return absl::OutOfRangeError("refusing to densify a large cube");
      }
      return FiniteDistribution::Uniform(size_t{1} << u.d);
    }
  };
  return std::visit(Visitor{}, dist);
}

absl::StatusOr<Mixture> Mixture::Create(std::vector<DistributionHandle> parts,
                                        std::vector<double> weights) {
  if (parts.empty() || parts.size() != weights.size()) {
    return absl::InvalidArgumentError("mixture needs one weight per part");
  }
  const int dim = DomainDimension(parts.front());
  for (const DistributionHandle& p : parts) {
    if (DomainDimension(p) != dim || dim == 0) {
      return absl::InvalidArgumentError(
          "mixture parts must share a hypercube domain");
    }
  }
  absl::StatusOr<FiniteDistribution> picker =
      FiniteDistribution::Create(weights);
  if (!picker.ok()) return picker.status();
  return Mixture(std::move(parts), std::move(weights), *std::move(picker));
}

absl::StatusOr<Mixture> Mixture::Dilute(DistributionHandle p, double b) {
  if (!(b >= 0 && b <= 1)) {
    return absl::InvalidArgumentError("dilution weight must lie in [0, 1]");
  }
  const int dim = DomainDimension(p);
  return Create({std::move(p), UniformCube{dim}}, {b, 1.0 - b});
}

absl::StatusOr<Mixture> Mixture::Uniform(
    std::vector<DistributionHandle> parts) {
  std::vector<double> weights(parts.size(),
                              1.0 / static_cast<double>(parts.size()));
  return Create(std::move(parts), std::move(weights));
}

int Mixture::domain_dimension() const { return DomainDimension(parts_[0]); }

BitVector Mixture::Sample(Rng& rng, size_t& component) const {
  component = picker_.Sample(rng);
  return SampleOne(parts_[component], rng);
}

BitVector Mixture::Sample(Rng& rng) const {
  size_t ignored;
  return Sample(rng, ignored);
}

absl::StatusOr<FiniteDistribution> Mixture::Densify() const {
  std::vector<FiniteDistribution> dense;
  dense.reserve(parts_.size());
  for (const DistributionHandle& p : parts_) {
    absl::StatusOr<FiniteDistribution> d = shufflepan::Densify(p);
    if (!d.ok()) return d.status();
    dense.push_back(*std::move(d));
  }
  return FiniteDistribution::Mix(dense, weights_);
}

std::vector<BitVector> SampleMany(const DistributionHandle& dist, size_t n,
                                  Rng& rng) {
  std::vector<BitVector> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back(SampleOne(dist, rng));
  return out;
}

std::vector<BitVector> SampleMany(const Mixture& dist, size_t n, Rng& rng) {
  std::vector<BitVector> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back(dist.Sample(rng));
  return out;
}

absl::StatusOr<std::vector<HardDistribution>> EnumerateFamily(
    int d, int k, double alpha, FamilyTag tag, bool test_mode) {
  if (k < 1 || k > d) {
    return absl::InvalidArgumentError(
        absl::StrCat("family width k=", k, " must lie in [1, d=", d, "]"));
  }
  const int min_size = tag == FamilyTag::kParity ? 1 : 0;
  std::vector<HardDistribution> members;
  for (std::vector<int>& subset : SubsetsBySize(d, min_size, k)) {
    for (int sign : {1, -1}) {
      absl::StatusOr<HardDistribution> member = HardDistribution::Create(
          tag, d, ParityIndex{subset, sign}, alpha, test_mode);
      if (!member.ok()) return member.status();
      members.push_back(*std::move(member));
    }
  }
  return members;
}

absl::StatusOr<std::vector<int64_t>> SampleCoordinatePlusCounts(
    const DistributionHandle& dist, int64_t n, Rng& rng) {
  const int dim = DomainDimension(dist);
  std::vector<double> plus_probability(dim, 0.5);
  if (const auto* h = std::get_if<HardDistribution>(&dist)) {
    const auto& subset = h->index().subset;
    if (h->tag() == FamilyTag::kParity && subset.size() == 1) {
      plus_probability[subset[0] - 1] = 0.5 + h->alpha() * h->index().sign;
    } else if (h->tag() == FamilyTag::kSignedParity && subset.empty()) {
      plus_probability[h->d()] = 0.5 + h->alpha() * h->index().sign;
    } else {
      return absl::FailedPreconditionError(
          "coordinates of this member are not independent");
    }
  } else if (!std::holds_alternative<UniformCube>(dist)) {
    return absl::FailedPreconditionError(
        "coordinate counts need a product distribution");
  }
  std::vector<int64_t> counts(dim);
  for (int j = 0; j < dim; ++j) {
    counts[j] = rng.Binomial(n, plus_probability[j]);
  }
  return counts;
}

}  // namespace shufflepan
