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

#include "shufflepan/norm.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shufflepan/bit_vector.h"
#include "shufflepan/parallel.h"

namespace shufflepan {
namespace {

constexpr double kTieTolerance = 1e-12;

// Rows of P_v - U, one per member.
absl::StatusOr<std::vector<std::vector<double>>> Deviations(
    std::span<const FiniteDistribution> family) {
  if (family.empty()) return absl::InvalidArgumentError("empty family");
  const size_t m = family.front().size();
  std::vector<double> mixture(m, 0.0);
  for (const FiniteDistribution& p : family) {
    if (p.size() != m) {
      return absl::InvalidArgumentError("family members differ in domain");
    }
    for (size_t x = 0; x < m; ++x) mixture[x] += p[x];
  }
  for (double& v : mixture) v /= static_cast<double>(family.size());
  std::vector<std::vector<double>> rows;
  rows.reserve(family.size());
  for (const FiniteDistribution& p : family) {
    std::vector<double> row(m);
    for (size_t x = 0; x < m; ++x) row[x] = p[x] - mixture[x];
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

double NormReport::value() const { return std::sqrt(value_sq); }

nlohmann::json NormReport::ToJson() const {
  nlohmann::json j{{"value_sq", value_sq}, {"witness_bits", witness}};
  j["bound_sq"] = bound_sq ? nlohmann::json(*bound_sq) : nlohmann::json();
  return j;
}

absl::StatusOr<double> NormObjective(std::span<const FiniteDistribution> family,
                                     std::span<const double> f) {
  absl::StatusOr<std::vector<std::vector<double>>> rows = Deviations(family);
  if (!rows.ok()) return rows.status();
  if (f.size() != family.front().size()) {
    return absl::InvalidArgumentError("test function has the wrong length");
  }
  double total = 0;
  for (const std::vector<double>& row : *rows) {
    double inner = 0;
    for (size_t x = 0; x < row.size(); ++x) inner += f[x] * row[x];
    total += inner * inner;
  }
  return total / static_cast<double>(rows->size());
}

absl::StatusOr<NormReport> InftyToTwoNormBruteforce(
    std::span<const FiniteDistribution> family, int threads) {
  absl::StatusOr<std::vector<std::vector<double>>> rows = Deviations(family);
  if (!rows.ok()) return rows.status();
  const size_t m = family.front().size();
  if (m > kMaxNormDomain) {
    return absl::OutOfRangeError(absl::StrCat(
        "vertex enumeration needs a domain of at most ", kMaxNormDomain,
        " points, got ", m));
  }
  const size_t functions = size_t{1} << m;
  const double members = static_cast<double>(rows->size());

  // Pass 1: every objective value, in index order.
  constexpr size_t kChunk = 1024;
  const size_t chunks = (functions + kChunk - 1) / kChunk;
  std::vector<double> values(functions);
  ParallelFor(chunks, threads, [&](size_t chunk) {
    const size_t end = std::min(functions, (chunk + 1) * kChunk);
    for (size_t f = chunk * kChunk; f < end; ++f) {
      double total = 0;
      for (const std::vector<double>& row : *rows) {
        double inner = 0;
        for (size_t x = 0; x < m; ++x) {
          inner += ((f >> x) & 1) ? -row[x] : row[x];
        }
        total += inner * inner;
      }
      values[f] = total / members;
    }
  });

  // Pass 2: maximum, then the lowest index within tolerance of it.
  const double best = *std::max_element(values.begin(), values.end());
  size_t witness = 0;
  while (values[witness] < best - kTieTolerance) ++witness;

  NormReport report;
  report.value_sq = best;
  report.witness.resize(m);
  for (size_t x = 0; x < m; ++x) {
    report.witness[x] = ((witness >> x) & 1) ? -1 : 1;
  }
  return report;
}

absl::StatusOr<NormReport> InftyToTwoNormForFamily(int d, int k, double alpha,
                                                   FamilyTag tag,
                                                   int threads) {
  absl::StatusOr<std::vector<HardDistribution>> members =
      EnumerateFamily(d, k, alpha, tag);
  if (!members.ok()) return members.status();
  std::vector<FiniteDistribution> dense;
  for (const HardDistribution& member : *members) {
    absl::StatusOr<FiniteDistribution> pmf = member.Densify();
    if (!pmf.ok()) return pmf.status();
    dense.push_back(*std::move(pmf));
  }
  absl::StatusOr<NormReport> report = InftyToTwoNormBruteforce(dense, threads);
  if (!report.ok()) return report.status();
  report->bound_sq =
      4.0 * alpha * alpha / static_cast<double>(BinomialSumUpTo(d, k));
  return report;
}

}  // namespace shufflepan
