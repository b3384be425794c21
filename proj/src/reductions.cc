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

#include "shufflepan/reductions.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <map>
#include <memory>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "shufflepan/info_metrics.h"
#include "shufflepan/parallel.h"

namespace shufflepan {
namespace {

int SampleIndex(std::span<const double> pmf, Rng& rng) {
  const double u = rng.Uniform53();
  double cumulative = 0;
  int last_positive = 0;
  for (size_t i = 0; i < pmf.size(); ++i) {
    cumulative += pmf[i];
    if (pmf[i] > 0) last_positive = static_cast<int>(i);
    if (u < cumulative) return static_cast<int>(i);
  }
  return last_positive;
}

void AddInto(MessageCounts& into, const MessageCounts& add) {
  for (size_t m = 0; m < into.size(); ++m) into[m] += add[m];
}

}  // namespace

absl::StatusOr<ShuffleToPan> ShuffleToPan::Create(ShuffleProtocol protocol) {
  if (protocol.n < 3 || protocol.n % 3 != 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "the wrapped protocol must expect a multiple of 3 users, got %d",
        protocol.n));
  }
  if (protocol.gamma > 1.0 / 3 + 1e-12) {
    return absl::InvalidArgumentError(
        "the wrapped protocol must be declared robust down to n/3 users");
  }
  return ShuffleToPan(std::move(protocol));
}

void ShuffleToPan::AddMessages(int x, Rng& coins,
                               MessageCounts& counts) const {
  if (absl::Status s = protocol_.randomizer.ApplyInto(x, coins, counts);
      !s.ok()) {
    throw std::invalid_argument(std::string(s.message()));
  }
}

int ShuffleToPan::UniformInput(Rng& rng) const {
  return static_cast<int>(rng.UniformInt(protocol_.randomizer.input_size()));
}

WrapperState ShuffleToPan::Init(WrapperStreams streams) const {
  WrapperState s;
  s.counts.assign(protocol_.randomizer.alphabet_size(), 0);
  for (int u = 0; u < stream_length(); ++u) {
    AddMessages(UniformInput(*streams.uniform), *streams.coins, s.counts);
  }
  s.n_prime = std::min<int64_t>(
      streams.binomial->Binomial(protocol_.n, kDilution), stream_length());
  return s;
}

void ShuffleToPan::UpdateInPlace(int step, int x, WrapperState& s,
                                 WrapperStreams streams) const {
  const int w = step <= s.n_prime ? x : UniformInput(*streams.uniform);
  AddMessages(w, *streams.coins, s.counts);
}

WrapperState ShuffleToPan::Update(int step, int x, const WrapperState& s,
                                  WrapperStreams streams) const {
  WrapperState next = s;
  UpdateInPlace(step, x, next, streams);
  return next;
}

MessageCounts ShuffleToPan::Pad(const WrapperState& s,
                                WrapperStreams streams) const {
  MessageCounts y = s.counts;
  for (int u = 0; u < stream_length(); ++u) {
    AddMessages(UniformInput(*streams.uniform), *streams.coins, y);
  }
  return y;
}

OnlineAlgorithm<int, WrapperState, double> ShuffleToPan::AsOnline() const {
  const ShuffleToPan self = *this;
  OnlineAlgorithm<int, WrapperState, double> online;
  online.init = [self](Rng& rng) { return self.Init({&rng, &rng, &rng}); };
  online.update = [self](int step, const int& x, const WrapperState& s,
                         Rng& rng) {
    return self.Update(step, x, s, {&rng, &rng, &rng});
  };
  online.output = [self](const WrapperState& s, Rng& rng) {
    return self.protocol_.analyzer(self.Pad(s, {&rng, &rng, &rng}));
  };
  return online;
}

absl::StatusOr<AdversaryView<WrapperState, double>> ShuffleToPan::Run(
    std::span<const int> stream, int t, uint64_t seed) const {
  if (static_cast<int>(stream.size()) != stream_length()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "stream has length %d, expected n/3 = %d", stream.size(),
        stream_length()));
  }
  try {
    return RunPan(AsOnline(), stream, t, seed);
  } catch (const std::invalid_argument& e) {
    return absl::InvalidArgumentError(e.what());
  }
}

absl::StatusOr<MessageCounts> ShuffleToPan::FinalMessages(
    std::span<const int> stream, WrapperStreams streams) const {
  if (static_cast<int>(stream.size()) != stream_length()) {
    return absl::InvalidArgumentError("stream must have length n/3");
  }
  try {
    WrapperState s = Init(streams);
    for (int i = 0; i < stream_length(); ++i) {
      UpdateInPlace(i + 1, stream[i], s, streams);
    }
    return Pad(s, streams);
  } catch (const std::invalid_argument& e) {
    return absl::InvalidArgumentError(e.what());
  }
}

CountLaw ExactShuffleToPan::OutputCountLaw(
    std::span<const double> output_law) const {
  CountLaw law;
  for (size_t o = 0; o < output_law.size(); ++o) {
    if (output_law[o] > 0) law[outputs[o]] += output_law[o];
  }
  return law;
}

absl::StatusOr<ExactShuffleToPan> BuildExactShuffleToPan(
    const ShuffleProtocol& protocol) {
  absl::StatusOr<ShuffleToPan> wrapper = ShuffleToPan::Create(protocol);
  if (!wrapper.ok()) return wrapper.status();
  const Randomizer& r = protocol.randomizer;
  if (!r.tabular()) {
    return absl::FailedPreconditionError("exact mode needs a tabular randomizer");
  }
  const int inputs = r.input_size();
  const int third = protocol.n / 3;
  const std::vector<double> uniform(inputs, 1.0 / inputs);
  absl::StatusOr<CountLaw> law_u = r.MessageLaw(uniform);
  if (!law_u.ok()) return law_u.status();
  std::vector<CountLaw> law_x;
  for (int x = 0; x < inputs; ++x) {
    std::vector<double> point(inputs, 0.0);
    point[x] = 1;
    law_x.push_back(*r.MessageLaw(point));
  }
  const std::vector<std::vector<double>> pad_laws(third, uniform);
  absl::StatusOr<CountLaw> pad = ExactShuffleView(r, pad_laws);
  if (!pad.ok()) return pad.status();
  const std::vector<double> n_prime =
      ClippedBinomialPmf(protocol.n, kDilution, third);

  ExactShuffleToPan exact;
  std::map<std::pair<int64_t, MessageCounts>, int> state_ids;
  auto intern = [&](int64_t k, MessageCounts c) {
    auto [it, inserted] = state_ids.try_emplace({k, c}, 0);
    if (inserted) {
      it->second = static_cast<int>(exact.states.size());
      exact.states.push_back({k, std::move(c)});
    }
    return it->second;
  };
  std::vector<int> frontier;
  for (int k = 0; k <= third; ++k) {
    if (n_prime[k] == 0) continue;
    for (const auto& [c, p] : *pad) {
      const int id = intern(k, c);
      exact.alg.initial.emplace_back(id, n_prime[k] * p);
      frontier.push_back(id);
    }
  }
  using StepTable = std::map<int, std::vector<SparseLaw>>;
  auto transitions = std::make_shared<std::vector<StepTable>>(third);
  for (int step = 1; step <= third; ++step) {
    std::vector<int> next;
    for (int id : frontier) {
      std::vector<SparseLaw> per_input(inputs);
      for (int x = 0; x < inputs; ++x) {
        const WrapperState s = exact.states[id];
        const CountLaw& law = step <= s.n_prime ? law_x[x] : *law_u;
        for (const auto& [c, p] : law) {
          MessageCounts merged = s.counts;
          AddInto(merged, c);
          const int id2 = intern(s.n_prime, std::move(merged));
          per_input[x].emplace_back(id2, p);
          next.push_back(id2);
        }
      }
      (*transitions)[step - 1][id] = std::move(per_input);
    }
    if (static_cast<int64_t>(exact.states.size()) > kMaxExactSupport) {
      return absl::ResourceExhaustedError("wrapper state space exceeds guard");
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    frontier = std::move(next);
  }
  std::map<MessageCounts, int> output_ids;
  auto output_table =
      std::make_shared<std::vector<SparseLaw>>(exact.states.size());
  for (int id : frontier) {
    for (const auto& [c, p] : *pad) {
      MessageCounts y = exact.states[id].counts;
      AddInto(y, c);
      auto [it, inserted] =
          output_ids.try_emplace(y, static_cast<int>(exact.outputs.size()));
      if (inserted) exact.outputs.push_back(y);
      (*output_table)[id].emplace_back(it->second, p);
    }
  }
  exact.alg.num_inputs = inputs;
  exact.alg.num_states = static_cast<int>(exact.states.size());
  exact.alg.num_outputs = static_cast<int>(exact.outputs.size());
  exact.alg.update = [transitions](int step, int x, int s) -> SparseLaw {
    const StepTable& table = (*transitions)[step - 1];
    auto it = table.find(s);
    if (it == table.end()) return {};
    return it->second[x];
  };
  exact.alg.output = [output_table](int s) { return (*output_table)[s]; };
  return exact;
}

absl::StatusOr<double> ExactDilutionTv(const ShuffleProtocol& protocol,
                                       std::span<const double> data_law) {
  const Randomizer& r = protocol.randomizer;
  if (!r.tabular() || r.alphabet_size() != 2) {
    return absl::FailedPreconditionError(
        "exact dilution TV needs a binary tabular randomizer");
  }
  if (static_cast<int>(data_law.size()) != r.input_size()) {
    return absl::InvalidArgumentError("data law has the wrong size");
  }
  double q_data = 0, q_uniform = 0;
  for (int x = 0; x < r.input_size(); ++x) {
    double one = 0;
    for (const RandomizerOutcome& o : *r.Outcomes(x)) {
      if (o.messages.size() != 1) {
        return absl::FailedPreconditionError(
            "exact dilution TV needs exactly one message per user");
      }
      if (o.messages[0] == 1) one += o.prob;
    }
    q_data += data_law[x] * one;
    q_uniform += one / r.input_size();
  }
  const int n = protocol.n;
  std::vector<std::vector<double>> given_k(n + 1);
  for (int k = 0; k <= n; ++k) {
    given_k[k] = ConvolvePmf(BinomialPmf(k, q_data),
                             BinomialPmf(n - k, q_uniform));
  }
  const std::vector<double> clipped = ClippedBinomialPmf(n, kDilution, n / 3);
  const std::vector<double> full = BinomialPmf(n, kDilution);
  std::vector<double> wrapper(n + 1, 0.0), direct(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    for (int j = 0; j <= n; ++j) {
      if (k < static_cast<int>(clipped.size())) {
        wrapper[j] += clipped[k] * given_k[k][j];
      }
      direct[j] += full[k] * given_k[k][j];
    }
  }
  return TvDistance(wrapper, direct);
}

absl::StatusOr<DilutionEstimate> EstimateDilutionTv(
    const ShuffleProtocol& protocol, std::span<const double> data_law,
    int64_t trials, uint64_t seed, int threads) {
  absl::StatusOr<ShuffleToPan> wrapper = ShuffleToPan::Create(protocol);
  if (!wrapper.ok()) return wrapper.status();
  const Randomizer& r = protocol.randomizer;
  if (static_cast<int>(data_law.size()) != r.input_size()) {
    return absl::InvalidArgumentError("data law has the wrong size");
  }
  if (trials < 1) return absl::InvalidArgumentError("need at least one trial");
  const int n = protocol.n;
  const int third = n / 3;
  const std::vector<double> law(data_law.begin(), data_law.end());
  std::vector<uint8_t> differ(trials, 0);
  std::atomic<bool> failed{false};
  ParallelFor(trials, threads, [&](int64_t trial) {
    const uint64_t base = TrialSeed(seed, static_cast<uint64_t>(n), trial);
    auto streams = [base]() {
      return std::array<Rng, 4>{Rng(SplitMix64(base ^ 1)),
                                Rng(SplitMix64(base ^ 2)),
                                Rng(SplitMix64(base ^ 3)),
                                Rng(SplitMix64(base ^ 4))};
    };
    // World 1: M^Pi on a stream from the data law.
    std::array<Rng, 4> a = streams();
    std::vector<int> stream(third);
    for (int& x : stream) x = SampleIndex(law, a[3]);
    absl::StatusOr<MessageCounts> via_wrapper =
        wrapper->FinalMessages(stream, {&a[0], &a[1], &a[2]});
    // World 2: Pi on n users from the diluted law, with slots laid out as in
    // the wrapper so that both worlds agree whenever no clipping happens.
    std::array<Rng, 4> b = streams();
    const int64_t from_data = b[0].Binomial(n, kDilution);
    std::vector<uint8_t> is_data(n, 0);
    int64_t left = from_data;
    for (int block : {1, 2, 0}) {
      for (int i = block * third; i < (block + 1) * third && left > 0; ++i) {
        is_data[i] = 1;
        --left;
      }
    }
    MessageCounts direct(r.alphabet_size(), 0);
    for (int slot = 0; slot < n; ++slot) {
      const int x = is_data[slot]
                        ? SampleIndex(law, b[3])
                        : static_cast<int>(b[1].UniformInt(r.input_size()));
      if (!r.ApplyInto(x, b[2], direct).ok()) {
        failed = true;
        return;
      }
    }
    if (!via_wrapper.ok()) {
      failed = true;
      return;
    }
    differ[trial] = *via_wrapper != direct;
  });
  if (failed) return absl::InvalidArgumentError("randomizer failed");
  DilutionEstimate est;
  est.n = n;
  est.trials = trials;
  for (uint8_t d : differ) est.differ += d;
  est.estimate = static_cast<double>(est.differ) / trials;
  est.ci = WilsonInterval(est.differ, trials);
  est.clip_tail = BinomialUpperTail(n, kDilution, third);
  absl::StatusOr<double> exact = ExactDilutionTv(protocol, data_law);
  if (exact.ok()) est.exact_tv = *exact;
  return est;
}

BitVector AugmentRow(const BitVector& x, double alpha, Rng& rng) {
  return x.Append(rng.Rademacher(alpha));
}

absl::StatusOr<FiniteDistribution> AugmentedLaw(const FiniteDistribution& base,
                                                double alpha) {
  if (!base.HypercubeDimension().has_value()) {
    return absl::InvalidArgumentError("base law is not on a hypercube");
  }
  if (!(alpha > 0 && alpha < 0.5)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1/2)");
  }
  std::vector<double> pmf(2 * base.size());
  for (size_t i = 0; i < base.size(); ++i) {
    // The appended coordinate is the least significant bit; +1 is bit 0.
    pmf[2 * i] = base[i] * (1 + alpha) / 2;
    pmf[2 * i + 1] = base[i] * (1 - alpha) / 2;
  }
  return FiniteDistribution::FromWeights(std::move(pmf));
}

int64_t TestPhaseLength(double alpha, double epsilon) {
  return static_cast<int64_t>(std::ceil(4.0 / (alpha * epsilon) - 1e-9));
}

OnlineAlgorithm<BitVector, int, ParityIndex> PlantedLearner(
    ParityIndex hypothesis) {
  OnlineAlgorithm<BitVector, int, ParityIndex> learner;
  learner.init = [](Rng&) { return 0; };
  learner.update = [](int, const BitVector&, const int& s, Rng&) { return s; };
  learner.output = [hypothesis](const int&, Rng&) { return hypothesis; };
  return learner;
}

double SampleCountConvolution(int64_t trials, double rate, double epsilon,
                              Rng& rng) {
  const double scale = std::isinf(epsilon) ? 0.0 : 1.0 / epsilon;
  const double count = static_cast<double>(rng.Binomial(trials, rate));
  const double first = rng.Laplace(scale);
  return count + first + rng.Laplace(scale);
}

std::string ThresholdReport::ToJson() const {
  nlohmann::ordered_json j;
  j["tau"] = tau;
  j["adv"] = advantage;
  j["ci_low"] = ci.low;
  j["ci_high"] = ci.high;
  return j.dump();
}

namespace {

// Number of entries of the sorted sample strictly above tau.
int64_t CountAbove(const std::vector<double>& sorted, double tau) {
  return sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), tau);
}

}  // namespace

absl::StatusOr<ThresholdReport> ThresholdDistinguisher(
    std::span<const double> z_mixture, std::span<const double> z_uniform) {
  if (static_cast<int64_t>(z_mixture.size()) < kMinThresholdSamples ||
      static_cast<int64_t>(z_uniform.size()) < kMinThresholdSamples) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need at least %d samples per world", kMinThresholdSamples));
  }
  // Even positions pick tau, odd positions score it.
  std::vector<double> fit_a, fit_b, eval_a, eval_b;
  for (size_t i = 0; i < z_mixture.size(); ++i) {
    (i % 2 == 0 ? fit_a : eval_a).push_back(z_mixture[i]);
  }
  for (size_t i = 0; i < z_uniform.size(); ++i) {
    (i % 2 == 0 ? fit_b : eval_b).push_back(z_uniform[i]);
  }
  for (auto* v : {&fit_a, &fit_b, &eval_a, &eval_b}) {
    std::sort(v->begin(), v->end());
  }
  std::vector<double> candidates = fit_a;
  candidates.insert(candidates.end(), fit_b.begin(), fit_b.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  ThresholdReport report;
  report.tau = -std::numeric_limits<double>::infinity();
  double best = 0;
  const double na = static_cast<double>(fit_a.size());
  const double nb = static_cast<double>(fit_b.size());
  for (double tau : candidates) {
    const double adv = CountAbove(fit_a, tau) / na - CountAbove(fit_b, tau) / nb;
    if (adv > best) {
      best = adv;
      report.tau = tau;
    }
  }
  const int64_t above_a = CountAbove(eval_a, report.tau);
  const int64_t above_b = CountAbove(eval_b, report.tau);
  const int64_t ea = eval_a.size(), eb = eval_b.size();
  report.advantage = static_cast<double>(above_a) / ea -
                     static_cast<double>(above_b) / eb;
  report.ci = DifferenceInterval(above_a, ea, above_b, eb);
  return report;
}

std::string DistinguishRecord(const std::string& world, uint64_t seed,
                              double z) {
  nlohmann::ordered_json j;
  j["world"] = world;
  j["seed"] = seed;
  j["z"] = z;
  return j.dump();
}

}  // namespace shufflepan
