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

#ifndef SHUFFLEPAN_INFO_METRICS_H_
#define SHUFFLEPAN_INFO_METRICS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "shufflepan/finite_distribution.h"

namespace shufflepan {

// Total variation distance, half the L1 distance.
absl::StatusOr<double> TvDistance(const FiniteDistribution& p,
                                  const FiniteDistribution& q);
// Same on raw probability vectors of equal length (no validation).
double TvDistance(std::span<const double> p, std::span<const double> q);

// KL(p || q) in nats. +infinity when p puts mass where q has none.
absl::StatusOr<double> KlDivergence(const FiniteDistribution& p,
                                    const FiniteDistribution& q);
double KlDivergence(std::span<const double> p, std::span<const double> q);

// tv(p, q)^2 <= KL(p || q) / 2.
absl::StatusOr<bool> PinskerCheck(const FiniteDistribution& p,
                                  const FiniteDistribution& q);

// Least delta such that Pr_p[C] <= e^epsilon Pr_q[C] + delta for every event:
// sum_x max(p(x) - e^epsilon q(x), 0).
absl::StatusOr<double> HockeyStick(const FiniteDistribution& p,
                                   const FiniteDistribution& q,
                                   double epsilon);
double HockeyStick(std::span<const double> p, std::span<const double> q,
                   double epsilon);

// Joint pmf of two finite variables, row-major: entry (a, b) at a * cols + b.
class JointDistribution {
 public:
  static absl::StatusOr<JointDistribution> Create(size_t rows, size_t cols,
                                                  std::vector<double> pmf);
  // p(a, b) = p(a) q(b).
  static JointDistribution Product(const FiniteDistribution& row,
                                   const FiniteDistribution& col);
  // p(a, b) = p(a) K(b | a); `conditionals` holds one distribution per row.
  static absl::StatusOr<JointDistribution> FromConditionals(
      const FiniteDistribution& row,
      std::span<const FiniteDistribution> conditionals);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  double operator()(size_t a, size_t b) const { return pmf_[a * cols_ + b]; }
  std::span<const double> pmf() const { return pmf_; }

  std::vector<double> RowMarginal() const;
  std::vector<double> ColMarginal() const;
  // Law of the column variable given row a; requires positive row mass.
  std::vector<double> ColGivenRow(size_t a) const;
  // Flattened product of the marginals.
  std::vector<double> ProductOfMarginals() const;

 private:
  JointDistribution(size_t rows, size_t cols, std::vector<double> pmf)
      : rows_(rows), cols_(cols), pmf_(std::move(pmf)) {}

  size_t rows_;
  size_t cols_;
  std::vector<double> pmf_;
};

// I(A; B) = sum p(a,b) ln(p(a,b) / (p(a) p(b))), in nats.
double MutualInformation(const JointDistribution& joint);

// Joint pmf of three variables (A, B, C), index ((a * nb) + b) * nc + c.
struct TripleJoint {
  size_t na = 0;
  size_t nb = 0;
  size_t nc = 0;
  std::vector<double> pmf;

  double operator()(size_t a, size_t b, size_t c) const {
    return pmf[(a * nb + b) * nc + c];
  }
};

// Chain-rule fact: for joints (A, B) and (A, B') sharing the law of A,
//   tv((A,B), (A,B')) <= E_{a ~ A} tv(B | a, B' | a).
// Fails if the A marginals differ by more than 1e-12.
absl::StatusOr<bool> TvChainCheck(const JointDistribution& ab,
                                  const JointDistribution& ab_prime);

// Markov fact: if A and B are independent given C, then for every a in the
// support of A,  tv(B | a, B) <= tv(C | a, C). Fails if conditional
// independence is violated by more than 1e-12.
absl::StatusOr<bool> MarkovCheck(const TripleJoint& abc);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_INFO_METRICS_H_
