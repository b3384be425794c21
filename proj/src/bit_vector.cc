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

#include "shufflepan/bit_vector.h"

#include <algorithm>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace shufflepan {

absl::StatusOr<BitVector> BitVector::Create(std::vector<int8_t> entries) {
  if (entries.empty()) {
    return absl::InvalidArgumentError("BitVector needs dimension >= 1");
  }
  for (int8_t e : entries) {
    if (e != 1 && e != -1) {
      return absl::InvalidArgumentError(
          absl::StrCat("BitVector entries must be +-1, got ", e));
    }
  }
  return BitVector(std::move(entries));
}

BitVector BitVector::FromIndex(uint64_t index, int dimension) {
  std::vector<int8_t> entries(dimension);
  for (int i = 0; i < dimension; ++i) {
    const int bit = (index >> (dimension - 1 - i)) & 1;
    entries[i] = bit ? -1 : 1;
  }
  return BitVector(std::move(entries));
}

BitVector BitVector::AllPlus(int dimension) {
  return BitVector(std::vector<int8_t>(dimension, 1));
}

BitVector BitVector::Random(int dimension, Rng& rng) {
  std::vector<int8_t> entries(dimension);
  uint64_t bits = 0;
  for (int i = 0; i < dimension; ++i) {
    if (i % 64 == 0) bits = rng();
    entries[i] = (bits & 1) ? -1 : 1;
    bits >>= 1;
  }
  return BitVector(std::move(entries));
}

uint64_t BitVector::Index() const {
  uint64_t index = 0;
  for (int8_t e : entries_) index = (index << 1) | (e < 0 ? 1 : 0);
  return index;
}

int BitVector::Parity(const std::vector<int>& subset) const {
  int product = 1;
  for (int j : subset) product *= entries_[j - 1];
  return product;
}

BitVector BitVector::Append(int value) const {
  std::vector<int8_t> entries = entries_;
  entries.push_back(static_cast<int8_t>(value));
  return BitVector(std::move(entries));
}

std::string BitVector::ToString() const {
  std::string out;
  out.reserve(entries_.size());
  for (int8_t e : entries_) out.push_back(e > 0 ? '+' : '-');
  return out;
}

absl::StatusOr<ParityIndex> ParityIndex::Create(std::vector<int> subset,
                                                int sign, int dimension,
                                                bool allow_empty) {
  if (sign != 1 && sign != -1) {
    return absl::InvalidArgumentError("parity sign must be +-1");
  }
  if (subset.empty() && !allow_empty) {
    return absl::InvalidArgumentError("parity subset must be non-empty");
  }
  std::sort(subset.begin(), subset.end());
  if (std::adjacent_find(subset.begin(), subset.end()) != subset.end()) {
    return absl::InvalidArgumentError("parity subset has duplicates");
  }
  for (int j : subset) {
    if (j < 1 || j > dimension) {
      return absl::InvalidArgumentError(
          absl::StrCat("parity index ", j, " outside [1, ", dimension, "]"));
    }
  }
  return ParityIndex{std::move(subset), sign};
}

namespace {

void ExtendSubsets(int d, int size, int next, std::vector<int>& current,
                   std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == size) {
    out.push_back(current);
    return;
  }
  for (int j = next; j <= d; ++j) {
    current.push_back(j);
    ExtendSubsets(d, size, j + 1, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<std::vector<int>> SubsetsBySize(int d, int min_size,
                                            int max_size) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  for (int size = std::max(min_size, 0); size <= std::min(max_size, d);
       ++size) {
    ExtendSubsets(d, size, 1, current, out);
  }
  return out;
}

uint64_t BinomialSumUpTo(int d, int k) {
  uint64_t total = 0;
  uint64_t choose = 1;  // C(d, 0)
  for (int j = 1; j <= std::min(k, d); ++j) {
    choose = choose * (d - j + 1) / j;
    total += choose;
  }
  return total;
}

}  // namespace shufflepan
