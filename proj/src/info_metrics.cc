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

#include "shufflepan/info_metrics.h"

#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace shufflepan {
namespace {

constexpr double kCheckSlack = 1e-12;

absl::Status SameDomain(const FiniteDistribution& p,
                        const FiniteDistribution& q) {
  if (p.size() != q.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "distributions live on domains of size ", p.size(), " and ", q.size()));
  }
  return absl::OkStatus();
}

}  // namespace

double TvDistance(std::span<const double> p, std::span<const double> q) {
  std::vector<double> gaps(p.size());
  for (size_t i = 0; i < p.size(); ++i) gaps[i] = std::fabs(p[i] - q[i]);
  return 0.5 * StableSum(gaps);
}

absl::StatusOr<double> TvDistance(const FiniteDistribution& p,
                                  const FiniteDistribution& q) {
  if (absl::Status s = SameDomain(p, q); !s.ok()) return s;
  return TvDistance(p.pmf(), q.pmf());
}

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  std::vector<double> terms;
  terms.reserve(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    if (q[i] == 0) return std::numeric_limits<double>::infinity();
    terms.push_back(p[i] * std::log(p[i] / q[i]));
  }
  // Rounding can push an exact zero slightly negative.
  return std::max(0.0, StableSum(terms));
}

absl::StatusOr<double> KlDivergence(const FiniteDistribution& p,
                                    const FiniteDistribution& q) {
  if (absl::Status s = SameDomain(p, q); !s.ok()) return s;
  return KlDivergence(p.pmf(), q.pmf());
}

absl::StatusOr<bool> PinskerCheck(const FiniteDistribution& p,
                                  const FiniteDistribution& q) {
  absl::StatusOr<double> tv = TvDistance(p, q);
  if (!tv.ok()) return tv.status();
  const double kl = KlDivergence(p.pmf(), q.pmf());
  return (*tv) * (*tv) <= kl / 2 + kCheckSlack;
}

double HockeyStick(std::span<const double> p, std::span<const double> q,
                   double epsilon) {
  const double scale = std::exp(epsilon);
  std::vector<double> excess;
  excess.reserve(p.size());
  for (size_t i = 0; i < p.size(); ++i) {
    const double e = p[i] - scale * q[i];
    if (e > 0) excess.push_back(e);
  }
  return std::max(0.0, StableSum(excess));
}

absl::StatusOr<double> HockeyStick(const FiniteDistribution& p,
                                   const FiniteDistribution& q,
                                   double epsilon) {
  if (absl::Status s = SameDomain(p, q); !s.ok()) return s;
  if (!(epsilon >= 0)) {
    return absl::InvalidArgumentError("hockey-stick needs epsilon >= 0");
  }
  return HockeyStick(p.pmf(), q.pmf(), epsilon);
}

absl::StatusOr<JointDistribution> JointDistribution::Create(
    size_t rows, size_t cols, std::vector<double> pmf) {
  if (rows == 0 || cols == 0 || pmf.size() != rows * cols) {
    return absl::InvalidArgumentError("joint pmf has the wrong shape");
  }
  if (absl::StatusOr<FiniteDistribution> check =
          FiniteDistribution::Create(pmf);
      !check.ok()) {
    return check.status();
  }
  return JointDistribution(rows, cols, std::move(pmf));
}

JointDistribution JointDistribution::Product(const FiniteDistribution& row,
                                             const FiniteDistribution& col) {
  std::vector<double> pmf(row.size() * col.size());
  for (size_t a = 0; a < row.size(); ++a) {
    for (size_t b = 0; b < col.size(); ++b) {
      pmf[a * col.size() + b] = row[a] * col[b];
    }
  }
  return JointDistribution(row.size(), col.size(), std::move(pmf));
}

absl::StatusOr<JointDistribution> JointDistribution::FromConditionals(
    const FiniteDistribution& row,
    std::span<const FiniteDistribution> conditionals) {
  if (conditionals.size() != row.size()) {
    return absl::InvalidArgumentError("need one conditional per row value");
  }
  const size_t cols = conditionals.front().size();
  std::vector<double> pmf(row.size() * cols);
  for (size_t a = 0; a < row.size(); ++a) {
    if (conditionals[a].size() != cols) {
      return absl::InvalidArgumentError("conditionals differ in domain");
    }
    for (size_t b = 0; b < cols; ++b) {
      pmf[a * cols + b] = row[a] * conditionals[a][b];
    }
  }
  return JointDistribution(row.size(), cols, std::move(pmf));
}

std::vector<double> JointDistribution::RowMarginal() const {
  std::vector<double> out(rows_);
  for (size_t a = 0; a < rows_; ++a) {
    out[a] = StableSum(std::span<const double>(pmf_).subspan(a * cols_, cols_));
  }
  return out;
}

std::vector<double> JointDistribution::ColMarginal() const {
  std::vector<double> out(cols_, 0.0);
  for (size_t a = 0; a < rows_; ++a) {
    for (size_t b = 0; b < cols_; ++b) out[b] += pmf_[a * cols_ + b];
  }
  return out;
}

std::vector<double> JointDistribution::ColGivenRow(size_t a) const {
  std::vector<double> out(pmf_.begin() + a * cols_,
                          pmf_.begin() + (a + 1) * cols_);
  const double mass = StableSum(out);
  for (double& v : out) v /= mass;
  return out;
}

std::vector<double> JointDistribution::ProductOfMarginals() const {
  const std::vector<double> row = RowMarginal();
  const std::vector<double> col = ColMarginal();
  std::vector<double> out(rows_ * cols_);
  for (size_t a = 0; a < rows_; ++a) {
    for (size_t b = 0; b < cols_; ++b) out[a * cols_ + b] = row[a] * col[b];
  }
  return out;
}

double MutualInformation(const JointDistribution& joint) {
  return KlDivergence(joint.pmf(), joint.ProductOfMarginals());
}

absl::StatusOr<bool> TvChainCheck(const JointDistribution& ab,
                                  const JointDistribution& ab_prime) {
  if (ab.rows() != ab_prime.rows() || ab.cols() != ab_prime.cols()) {
    return absl::InvalidArgumentError("joints have different shapes");
  }
  const std::vector<double> a_law = ab.RowMarginal();
  const std::vector<double> a_law_prime = ab_prime.RowMarginal();
  for (size_t a = 0; a < a_law.size(); ++a) {
    if (std::fabs(a_law[a] - a_law_prime[a]) > kMassTolerance) {
      return absl::FailedPreconditionError(
          "the two joints disagree on the law of A");
    }
  }
  const double lhs = TvDistance(ab.pmf(), ab_prime.pmf());
  std::vector<double> terms;
  for (size_t a = 0; a < a_law.size(); ++a) {
    if (a_law[a] <= 0) continue;
    terms.push_back(a_law[a] *
                    TvDistance(ab.ColGivenRow(a), ab_prime.ColGivenRow(a)));
  }
  return lhs <= StableSum(terms) + kCheckSlack;
}

absl::StatusOr<bool> MarkovCheck(const TripleJoint& abc) {
  const size_t na = abc.na, nb = abc.nb, nc = abc.nc;
  if (abc.pmf.size() != na * nb * nc || na == 0 || nb == 0 || nc == 0) {
    return absl::InvalidArgumentError("triple joint has the wrong shape");
  }
  std::vector<double> p_a(na, 0.0), p_b(nb, 0.0), p_c(nc, 0.0);
  std::vector<double> p_ac(na * nc, 0.0), p_bc(nb * nc, 0.0);
  for (size_t a = 0; a < na; ++a) {
    for (size_t b = 0; b < nb; ++b) {
      for (size_t c = 0; c < nc; ++c) {
        const double v = abc(a, b, c);
        p_a[a] += v;
        p_b[b] += v;
        p_c[c] += v;
        p_ac[a * nc + c] += v;
        p_bc[b * nc + c] += v;
      }
    }
  }
  // A independent of B given C: p(a,b,c) p(c) = p(a,c) p(b,c).
  for (size_t a = 0; a < na; ++a) {
    for (size_t b = 0; b < nb; ++b) {
      for (size_t c = 0; c < nc; ++c) {
        const double gap =
            abc(a, b, c) * p_c[c] - p_ac[a * nc + c] * p_bc[b * nc + c];
        if (std::fabs(gap) > kMassTolerance) {
          return absl::FailedPreconditionError(
              "A and B are not independent given C");
        }
      }
    }
  }
  for (size_t a = 0; a < na; ++a) {
    if (p_a[a] <= 0) continue;
    std::vector<double> b_given_a(nb, 0.0), c_given_a(nc, 0.0);
    for (size_t b = 0; b < nb; ++b) {
      for (size_t c = 0; c < nc; ++c) {
        b_given_a[b] += abc(a, b, c) / p_a[a];
        c_given_a[c] += abc(a, b, c) / p_a[a];
      }
    }
    if (TvDistance(b_given_a, p_b) > TvDistance(c_given_a, p_c) + kCheckSlack) {
      return false;
    }
  }
  return true;
}

}  // namespace shufflepan
