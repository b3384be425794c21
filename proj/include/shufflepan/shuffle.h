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

#ifndef SHUFFLEPAN_SHUFFLE_H_
#define SHUFFLEPAN_SHUFFLE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "shufflepan/random.h"

namespace shufflepan {

// A message multiset over the alphabet {0, ..., m-1}, stored as counts.
using MessageCounts = std::vector<int64_t>;

// Exact law of a message multiset.
using CountLaw = std::map<MessageCounts, double>;

// Bound on the support of any law carried by the exact engines, and on the
// number of (support point, branch) pairs expanded in one step.
inline constexpr int64_t kMaxExactSupport = 10'000'000;

struct RandomizerOutcome {
  std::vector<int> messages;
  double prob = 0;
};

// Local randomizer: input in {0, ..., input_size-1} to a finite list of
// messages from {0, ..., alphabet_size-1}. Tabular randomizers support exact
// enumeration; sampler-backed ones only support sampling.
class Randomizer {
 public:
  using Sampler = std::function<std::vector<int>(int input, Rng& rng)>;

  // table[x] lists the outcomes for input x; probabilities sum to 1.
  static absl::StatusOr<Randomizer> FromTable(
      int alphabet_size, std::vector<std::vector<RandomizerOutcome>> table);
  // max_messages < 0 declares an unbounded message count.
  static Randomizer FromSampler(int input_size, int alphabet_size,
                                int max_messages, Sampler sampler);
  static Randomizer Identity(int alphabet_size);
  // One message: the input bit, flipped with probability `flip`.
  static absl::StatusOr<Randomizer> BinaryRandomizedResponse(double flip);

  int input_size() const { return input_size_; }
  int alphabet_size() const { return alphabet_size_; }
  int max_messages() const { return max_messages_; }
  bool tabular() const { return !table_.empty(); }

  // Fails if the emitted messages leave the alphabet.
  absl::StatusOr<std::vector<int>> Apply(int input, Rng& rng) const;

  // Adds one application's messages to `counts` without materializing them.
  absl::Status ApplyInto(int input, Rng& rng, MessageCounts& counts) const;

  absl::StatusOr<std::span<const RandomizerOutcome>> Outcomes(int input) const;

  // Law of one user's message counts when the input is drawn from
  // `input_law` (a pmf over inputs).
  absl::StatusOr<CountLaw> MessageLaw(std::span<const double> input_law) const;

 private:
  Randomizer() = default;

  int input_size_ = 0;
  int alphabet_size_ = 0;
  int max_messages_ = 0;
  std::vector<std::vector<RandomizerOutcome>> table_;
  Sampler sampler_;
};

// Consumes only counts, so it is permutation-invariant by construction.
using Analyzer = std::function<double(const MessageCounts&)>;

// Sum of message values.
Analyzer SumAnalyzer();

struct ShuffleProtocol {
  Randomizer randomizer;
  Analyzer analyzer;
  // Intended cohort size.
  int n = 0;
  // Robustness fraction: the smallest participating share the protocol is
  // declared private for.
  double gamma = 1;
};

struct ShuffleRun {
  MessageCounts counts;
  double output = 0;
};

// Cohort size left after removing a `dropout_fraction` share of n users,
// rounded down.
int64_t SurvivingCohort(int64_t n, double dropout_fraction);

// Honest execution over the surviving users' `dataset`.
absl::StatusOr<ShuffleRun> RunShuffle(const ShuffleProtocol& protocol,
                                      std::span<const int> dataset,
                                      double dropout_fraction, uint64_t seed);

// The messages of `counts` in uniformly random order.
std::vector<int> Materialize(const MessageCounts& counts, Rng& rng);
MessageCounts CountMessages(std::span<const int> messages, int alphabet_size);

// Law of the sum of independent multisets.
absl::StatusOr<CountLaw> Convolve(const CountLaw& a, const CountLaw& b);

// Exact law of the shuffled multiset when user u's input has law
// input_laws[u].
absl::StatusOr<CountLaw> ExactShuffleView(
    const Randomizer& randomizer,
    std::span<const std::vector<double>> input_laws);
absl::StatusOr<CountLaw> ExactShuffleViewOnDataset(
    const Randomizer& randomizer, std::span<const int> dataset);

// Law of the analyzer output.
std::map<double, double> PushThroughAnalyzer(const CountLaw& law,
                                             const Analyzer& analyzer);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_SHUFFLE_H_
