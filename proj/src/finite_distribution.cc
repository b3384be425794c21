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

#include "shufflepan/finite_distribution.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "shufflepan/bit_vector.h"

namespace shufflepan {

double StableSum(std::span<const double> values) {
  double sum = 0;
  double compensation = 0;
  for (double v : values) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

FiniteDistribution::FiniteDistribution(std::vector<double> pmf)
    : pmf_(std::move(pmf)) {
  cdf_.resize(pmf_.size());
  double running = 0;
  for (size_t i = 0; i < pmf_.size(); ++i) {
    running += pmf_[i];
    cdf_[i] = running;
  }
}

absl::StatusOr<FiniteDistribution> FiniteDistribution::Create(
    std::vector<double> pmf) {
  if (pmf.empty()) {
    return absl::InvalidArgumentError("pmf over an empty domain");
  }
  for (size_t i = 0; i < pmf.size(); ++i) {
    if (!(pmf[i] >= 0) || !std::isfinite(pmf[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("pmf entry ", i, " is not a probability: ", pmf[i]));
    }
  }
  const double total = StableSum(pmf);
  if (std::fabs(total - 1.0) > kMassTolerance) {
    return absl::InvalidArgumentError(
        absl::StrFormat("pmf sums to %.17g, not 1", total));
  }
  return FiniteDistribution(std::move(pmf));
}

absl::StatusOr<FiniteDistribution> FiniteDistribution::FromWeights(
    std::vector<double> weights) {
  for (double w : weights) {
    if (!(w >= 0) || !std::isfinite(w)) {
      return absl::InvalidArgumentError("negative or non-finite weight");
    }
  }
  const double total = StableSum(weights);
  if (!(total > 0)) return absl::InvalidArgumentError("all weights are zero");
  for (double& w : weights) w /= total;
  return FiniteDistribution(std::move(weights));
}

FiniteDistribution FiniteDistribution::Uniform(size_t size) {
  return FiniteDistribution(
      std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

FiniteDistribution FiniteDistribution::PointMass(size_t size, size_t index) {
  std::vector<double> pmf(size, 0.0);
  pmf[index] = 1.0;
  return FiniteDistribution(std::move(pmf));
}

std::optional<int> FiniteDistribution::HypercubeDimension() const {
  const size_t m = pmf_.size();
  if (m < 2 || !std::has_single_bit(m)) return std::nullopt;
  return std::countr_zero(m);
}

size_t FiniteDistribution::Sample(Rng& rng) const {
  const double u = rng.Uniform53() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  size_t i = static_cast<size_t>(it - cdf_.begin());
  if (i < pmf_.size()) return i;
  // Rounding at the top of the cdf: fall back to the last positive cell.
  i = pmf_.size() - 1;
  while (i > 0 && pmf_[i] == 0) --i;
  return i;
}

absl::StatusOr<FiniteDistribution> FiniteDistribution::Mix(
    std::span<const FiniteDistribution> components,
    std::span<const double> weights) {
  if (components.empty() || components.size() != weights.size()) {
    return absl::InvalidArgumentError("mixture needs one weight per component");
  }
  const size_t m = components.front().size();
  std::vector<double> pmf(m, 0.0);
  for (size_t c = 0; c < components.size(); ++c) {
    if (components[c].size() != m) {
      return absl::InvalidArgumentError("mixture components differ in domain");
    }
    for (size_t i = 0; i < m; ++i) pmf[i] += weights[c] * components[c][i];
  }
  return Create(std::move(pmf));
}

std::string FiniteDistribution::ToCsv() const {
  std::string out = "index,x,prob\n";
  const std::optional<int> d = HypercubeDimension();
  for (size_t i = 0; i < pmf_.size(); ++i) {
    const std::string x =
        d ? BitVector::FromIndex(i, *d).ToString() : absl::StrCat(i);
    absl::StrAppendFormat(&out, "%d,%s,%.17g\n", i, x, pmf_[i]);
  }
  return out;
}

}  // namespace shufflepan
