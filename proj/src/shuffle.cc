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

#include "shufflepan/shuffle.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "shufflepan/finite_distribution.h"

namespace shufflepan {

absl::StatusOr<Randomizer> Randomizer::FromTable(
    int alphabet_size, std::vector<std::vector<RandomizerOutcome>> table) {
  if (alphabet_size < 1 || table.empty()) {
    return absl::InvalidArgumentError("empty randomizer");
  }
  int max_messages = 0;
  for (size_t x = 0; x < table.size(); ++x) {
    if (table[x].empty()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("input %d has no outcomes", x));
    }
    std::vector<double> probs;
    for (const RandomizerOutcome& o : table[x]) {
      if (!(o.prob >= 0)) {
        return absl::InvalidArgumentError("negative outcome probability");
      }
      for (int m : o.messages) {
        if (m < 0 || m >= alphabet_size) {
          return absl::InvalidArgumentError(
              absl::StrFormat("message %d outside alphabet of size %d", m,
                              alphabet_size));
        }
      }
      max_messages = std::max<int>(max_messages, o.messages.size());
      probs.push_back(o.prob);
    }
    if (std::fabs(StableSum(probs) - 1.0) > kMassTolerance) {
      return absl::InvalidArgumentError(
          absl::StrFormat("outcomes of input %d do not sum to 1", x));
    }
  }
  Randomizer r;
  r.input_size_ = static_cast<int>(table.size());
  r.alphabet_size_ = alphabet_size;
  r.max_messages_ = max_messages;
  r.table_ = std::move(table);
  return r;
}

Randomizer Randomizer::FromSampler(int input_size, int alphabet_size,
                                   int max_messages, Sampler sampler) {
  Randomizer r;
  r.input_size_ = input_size;
  r.alphabet_size_ = alphabet_size;
  r.max_messages_ = max_messages;
  r.sampler_ = std::move(sampler);
  return r;
}

Randomizer Randomizer::Identity(int alphabet_size) {
  std::vector<std::vector<RandomizerOutcome>> table;
  for (int x = 0; x < alphabet_size; ++x) table.push_back({{{x}, 1.0}});
  return *FromTable(alphabet_size, std::move(table));
}

absl::StatusOr<Randomizer> Randomizer::BinaryRandomizedResponse(double flip) {
  if (!(flip >= 0 && flip <= 1)) {
    return absl::InvalidArgumentError("flip probability outside [0, 1]");
  }
  std::vector<std::vector<RandomizerOutcome>> table = {
      {{{0}, 1 - flip}, {{1}, flip}}, {{{1}, 1 - flip}, {{0}, flip}}};
  return FromTable(2, std::move(table));
}

absl::StatusOr<std::vector<int>> Randomizer::Apply(int input, Rng& rng) const {
  if (input < 0 || input >= input_size_) {
    return absl::InvalidArgumentError(
        absl::StrFormat("input %d outside [0, %d)", input, input_size_));
  }
  std::vector<int> messages;
  if (tabular()) {
    const std::vector<RandomizerOutcome>& outcomes = table_[input];
    const double u = rng.Uniform53();
    double cumulative = 0;
    size_t pick = outcomes.size() - 1;
    for (size_t i = 0; i < outcomes.size(); ++i) {
      cumulative += outcomes[i].prob;
      if (u < cumulative) {
        pick = i;
        break;
      }
    }
    messages = outcomes[pick].messages;
  } else {
    messages = sampler_(input, rng);
  }
  for (int m : messages) {
    if (m < 0 || m >= alphabet_size_) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "randomizer emitted %d outside alphabet of size %d", m,
          alphabet_size_));
    }
  }
  if (max_messages_ >= 0 && static_cast<int>(messages.size()) > max_messages_) {
    return absl::InvalidArgumentError("randomizer exceeded its message count");
  }
  return messages;
}

absl::Status Randomizer::ApplyInto(int input, Rng& rng,
                                   MessageCounts& counts) const {
  if (!tabular()) {
    absl::StatusOr<std::vector<int>> messages = Apply(input, rng);
    if (!messages.ok()) return messages.status();
    for (int m : *messages) ++counts[m];
    return absl::OkStatus();
  }
  if (input < 0 || input >= input_size_) {
    return absl::InvalidArgumentError(
        absl::StrFormat("input %d outside [0, %d)", input, input_size_));
  }
  // Same draw as Apply, so both paths consume identical randomness.
  const std::vector<RandomizerOutcome>& outcomes = table_[input];
  const double u = rng.Uniform53();
  double cumulative = 0;
  size_t pick = outcomes.size() - 1;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    cumulative += outcomes[i].prob;
    if (u < cumulative) {
      pick = i;
      break;
    }
  }
  for (int m : outcomes[pick].messages) ++counts[m];
  return absl::OkStatus();
}

absl::StatusOr<std::span<const RandomizerOutcome>> Randomizer::Outcomes(
    int input) const {
  if (!tabular()) {
    return absl::FailedPreconditionError("randomizer is not tabular");
  }
  if (input < 0 || input >= input_size_) {
    return absl::InvalidArgumentError("input outside the randomizer domain");
  }
  return std::span<const RandomizerOutcome>(table_[input]);
}

absl::StatusOr<CountLaw> Randomizer::MessageLaw(
    std::span<const double> input_law) const {
  if (!tabular()) {
    return absl::FailedPreconditionError("randomizer is not tabular");
  }
  if (static_cast<int>(input_law.size()) != input_size_) {
    return absl::InvalidArgumentError("input law has the wrong size");
  }
  CountLaw law;
  for (int x = 0; x < input_size_; ++x) {
    if (input_law[x] == 0) continue;
    for (const RandomizerOutcome& o : table_[x]) {
      if (o.prob == 0) continue;
      law[CountMessages(o.messages, alphabet_size_)] += input_law[x] * o.prob;
    }
  }
  return law;
}

Analyzer SumAnalyzer() {
  return [](const MessageCounts& counts) {
    double sum = 0;
    for (size_t m = 0; m < counts.size(); ++m) {
      sum += static_cast<double>(m) * static_cast<double>(counts[m]);
    }
    return sum;
  };
}

int64_t SurvivingCohort(int64_t n, double dropout_fraction) {
  // Small tolerance so that e.g. n = 9, dropout 2/3 keeps 3 users.
  return static_cast<int64_t>(
      std::floor(static_cast<double>(n) * (1 - dropout_fraction) + 1e-9));
}

absl::StatusOr<ShuffleRun> RunShuffle(const ShuffleProtocol& protocol,
                                      std::span<const int> dataset,
                                      double dropout_fraction, uint64_t seed) {
  if (!(dropout_fraction >= 0 &&
        dropout_fraction <= 1 - protocol.gamma + 1e-12)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dropout fraction %g outside [0, 1 - gamma] with gamma = %g",
        dropout_fraction, protocol.gamma));
  }
  const int64_t cohort = SurvivingCohort(protocol.n, dropout_fraction);
  if (static_cast<int64_t>(dataset.size()) != cohort) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dataset has %d rows, surviving cohort is %d", dataset.size(), cohort));
  }
  Rng rng(seed);
  ShuffleRun run;
  run.counts.assign(protocol.randomizer.alphabet_size(), 0);
  for (int x : dataset) {
    if (absl::Status s = protocol.randomizer.ApplyInto(x, rng, run.counts);
        !s.ok()) {
      return s;
    }
  }
  run.output = protocol.analyzer ? protocol.analyzer(run.counts) : 0.0;
  return run;
}

std::vector<int> Materialize(const MessageCounts& counts, Rng& rng) {
  std::vector<int> messages;
  for (size_t m = 0; m < counts.size(); ++m) {
    messages.insert(messages.end(), counts[m], static_cast<int>(m));
  }
  std::shuffle(messages.begin(), messages.end(), rng);
  return messages;
}

MessageCounts CountMessages(std::span<const int> messages, int alphabet_size) {
  MessageCounts counts(alphabet_size, 0);
  for (int m : messages) ++counts[m];
  return counts;
}

absl::StatusOr<CountLaw> Convolve(const CountLaw& a, const CountLaw& b) {
  if (static_cast<double>(a.size()) * static_cast<double>(b.size()) >
      static_cast<double>(kMaxExactSupport)) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "convolution of supports %d x %d exceeds the exact-mode guard",
        a.size(), b.size()));
  }
  CountLaw out;
  for (const auto& [ca, pa] : a) {
    for (const auto& [cb, pb] : b) {
      MessageCounts sum = ca;
      for (size_t m = 0; m < sum.size(); ++m) sum[m] += cb[m];
      out[std::move(sum)] += pa * pb;
    }
  }
  return out;
}

absl::StatusOr<CountLaw> ExactShuffleView(
    const Randomizer& randomizer,
    std::span<const std::vector<double>> input_laws) {
  CountLaw law = {{MessageCounts(randomizer.alphabet_size(), 0), 1.0}};
  for (const std::vector<double>& input_law : input_laws) {
    absl::StatusOr<CountLaw> user = randomizer.MessageLaw(input_law);
    if (!user.ok()) return user.status();
    absl::StatusOr<CountLaw> next = Convolve(law, *user);
    if (!next.ok()) return next.status();
    law = *std::move(next);
  }
  return law;
}

absl::StatusOr<CountLaw> ExactShuffleViewOnDataset(
    const Randomizer& randomizer, std::span<const int> dataset) {
  std::vector<std::vector<double>> laws;
  for (int x : dataset) {
    if (x < 0 || x >= randomizer.input_size()) {
      return absl::InvalidArgumentError("dataset entry outside the domain");
    }
    std::vector<double> point(randomizer.input_size(), 0.0);
    point[x] = 1;
    laws.push_back(std::move(point));
  }
  return ExactShuffleView(randomizer, laws);
}

std::map<double, double> PushThroughAnalyzer(const CountLaw& law,
                                             const Analyzer& analyzer) {
  std::map<double, double> out;
  for (const auto& [counts, p] : law) out[analyzer(counts)] += p;
  return out;
}

}  // namespace shufflepan
