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

#ifndef SHUFFLEPAN_BIT_VECTOR_H_
#define SHUFFLEPAN_BIT_VECTOR_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "shufflepan/random.h"

namespace shufflepan {

// A point of the hypercube {-1,+1}^d.
//
// Dense pmfs over the hypercube use a fixed lexicographic order: +1 is bit 0,
// -1 is bit 1, and coordinate 1 is the most significant bit. So for d = 2 the
// order is (+1,+1), (+1,-1), (-1,+1), (-1,-1).
class BitVector {
 public:
  static absl::StatusOr<BitVector> Create(std::vector<int8_t> entries);
  static BitVector FromIndex(uint64_t index, int dimension);
  static BitVector AllPlus(int dimension);
  static BitVector Random(int dimension, Rng& rng);

  int dimension() const { return static_cast<int>(entries_.size()); }
  // Zero-based access.
  int operator[](int i) const { return entries_[i]; }
  void Set(int i, int value) { entries_[i] = static_cast<int8_t>(value); }
  std::span<const int8_t> entries() const { return entries_; }

  // Position in the lexicographic order described above. Requires d <= 63.
  uint64_t Index() const;

  // Product of the coordinates in `subset` (one-based indices). The empty
  // product is +1.
  int Parity(const std::vector<int>& subset) const;

  // Appends one coordinate; used for label and augmentation coordinates.
  BitVector Append(int value) const;

  // "+-+" style rendering.
  std::string ToString() const;

  friend bool operator==(const BitVector& a, const BitVector& b) {
    return a.entries_ == b.entries_;
  }

 private:
  explicit BitVector(std::vector<int8_t> entries)
      : entries_(std::move(entries)) {}

  std::vector<int8_t> entries_;
};

// A parity character together with its sign: the pair (ell, b).
struct ParityIndex {
  std::vector<int> subset;  // sorted, one-based, no duplicates
  int sign = 1;

  // Validates against dimension d. The empty subset is only accepted when
  // `allow_empty` is set (signed parities of the labelled family).
  static absl::StatusOr<ParityIndex> Create(std::vector<int> subset, int sign,
                                            int dimension,
                                            bool allow_empty = false);

  friend bool operator==(const ParityIndex& a, const ParityIndex& b) {
    return a.subset == b.subset && a.sign == b.sign;
  }
};

// All subsets of [d] with size in [min_size, max_size], ordered by size and
// then lexicographically. Indices are one-based.
std::vector<std::vector<int>> SubsetsBySize(int d, int min_size, int max_size);

// Sum_{j=1..k} C(d, j), the number of non-empty subsets of size at most k.
uint64_t BinomialSumUpTo(int d, int k);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_BIT_VECTOR_H_
