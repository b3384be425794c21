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

#ifndef SHUFFLEPAN_REDUCTIONS_H_
#define SHUFFLEPAN_REDUCTIONS_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "shufflepan/bit_vector.h"
#include "shufflepan/finite_distribution.h"
#include "shufflepan/pan.h"
#include "shufflepan/random.h"
#include "shufflepan/shuffle.h"
#include "shufflepan/stats.h"

namespace shufflepan {

// Mixing weight of the data distribution in the diluted law.
inline constexpr double kDilution = 2.0 / 9;

// Internal state of the shuffle-to-pan wrapper: the clipped sample count N'
// and the merged message multiset.
struct WrapperState {
  int64_t n_prime = 0;
  MessageCounts counts;
  bool operator==(const WrapperState&) const = default;
};

// Randomness sources of one wrapper execution. All three may alias.
struct WrapperStreams {
  Rng* binomial;  // N'
  Rng* uniform;   // fresh inputs from U
  Rng* coins;     // randomizer coins
};

// Online algorithm M^Pi built from a shuffle protocol Pi expecting n users;
// runs over streams of length n/3.
class ShuffleToPan {
 public:
  static absl::StatusOr<ShuffleToPan> Create(ShuffleProtocol protocol);

  const ShuffleProtocol& protocol() const { return protocol_; }
  int stream_length() const { return protocol_.n / 3; }

  // The three phases with explicit streams. May throw std::invalid_argument
  // when the randomizer misbehaves.
  WrapperState Init(WrapperStreams streams) const;
  WrapperState Update(int step, int x, const WrapperState& s,
                      WrapperStreams streams) const;
  // Adds the n/3 padding users and returns the final multiset Y.
  MessageCounts Pad(const WrapperState& s, WrapperStreams streams) const;

  OnlineAlgorithm<int, WrapperState, double> AsOnline() const;

  absl::StatusOr<AdversaryView<WrapperState, double>> Run(
      std::span<const int> stream, int t, uint64_t seed) const;

  // Final multiset of one execution with separate streams.
  absl::StatusOr<MessageCounts> FinalMessages(std::span<const int> stream,
                                              WrapperStreams streams) const;

 private:
  explicit ShuffleToPan(ShuffleProtocol protocol)
      : protocol_(std::move(protocol)) {}
  void AddMessages(int x, Rng& coins, MessageCounts& counts) const;
  void UpdateInPlace(int step, int x, WrapperState& s,
                     WrapperStreams streams) const;
  int UniformInput(Rng& rng) const;

  ShuffleProtocol protocol_;
};

// Exact finite form of M^Pi for tabular randomizers. States are interned
// (N', multiset) pairs and outputs are interned final multisets Y.
struct ExactShuffleToPan {
  FinitePanAlgorithm alg;
  std::vector<WrapperState> states;
  std::vector<MessageCounts> outputs;

  // Re-keys a dense output law by multiset.
  CountLaw OutputCountLaw(std::span<const double> output_law) const;
};

absl::StatusOr<ExactShuffleToPan> BuildExactShuffleToPan(
    const ShuffleProtocol& protocol);

// Comparison of M^Pi(P^{n/3}) with Pi(P^n_(2/9)).
struct DilutionEstimate {
  int n = 0;
  int64_t trials = 0;
  // Coupled executions whose final multisets differ; this upper bounds the
  // TV between the two output laws.
  int64_t differ = 0;
  double estimate = 0;
  Interval ci;
  // Pr[Bin(n, 2/9) > n/3], the clipping probability.
  double clip_tail = 0;
  // Exact TV for single-message binary randomizers, NaN otherwise.
  double exact_tv = std::numeric_limits<double>::quiet_NaN();
};

// `data_law` is a pmf over the randomizer's inputs. Trials are seeded by
// TrialSeed(seed, n, trial) and split over `threads` workers.
absl::StatusOr<DilutionEstimate> EstimateDilutionTv(
    const ShuffleProtocol& protocol, std::span<const double> data_law,
    int64_t trials, uint64_t seed, int threads = 1);

// Exact TV between the final multisets for binary single-message
// randomizers.
absl::StatusOr<double> ExactDilutionTv(const ShuffleProtocol& protocol,
                                       std::span<const double> data_law);

// x with an independent Rademacher(alpha) coordinate appended.
BitVector AugmentRow(const BitVector& x, double alpha, Rng& rng);

// Appends a Rademacher(alpha) coordinate to each row and delegates to a
// (d+1)-dimensional algorithm.
template <typename State, typename Output>
OnlineAlgorithm<BitVector, State, Output> SelectionAugment(
    OnlineAlgorithm<BitVector, State, Output> inner, double alpha) {
  OnlineAlgorithm<BitVector, State, Output> outer;
  outer.init = inner.init;
  outer.output = inner.output;
  outer.update = [inner, alpha](int step, const BitVector& x, const State& s,
                                Rng& rng) {
    return inner.update(step, AugmentRow(x, alpha, rng), s, rng);
  };
  return outer;
}

// Exact law of an augmented row when x has law `base` on {+-1}^d.
absl::StatusOr<FiniteDistribution> AugmentedLaw(const FiniteDistribution& base,
                                                double alpha);

// Test phase of the learner-to-distinguisher construction.
struct TestPhaseState {
  ParityIndex hypothesis;
  double count = 0;
};

template <typename LearnerState>
using DistinguisherState = std::variant<LearnerState, TestPhaseState>;

// Test-phase length m - n = ceil(4 / (alpha eps)).
int64_t TestPhaseLength(double alpha, double epsilon);

// M' from a learner M with budget n over rows of {+-1}^{d+1}: train on the
// first n rows, then keep a Laplace-noised count of correct predictions.
// The output is Z = C + Lap(1/eps). eps = +inf disables the noise.
template <typename LearnerState>
OnlineAlgorithm<BitVector, DistinguisherState<LearnerState>, double>
LearnerToDistinguisher(
    OnlineAlgorithm<BitVector, LearnerState, ParityIndex> learner, int n,
    int d, double epsilon) {
  using S = DistinguisherState<LearnerState>;
  const double scale = std::isinf(epsilon) ? 0.0 : 1.0 / epsilon;
  OnlineAlgorithm<BitVector, S, double> m;
  m.init = [learner](Rng& rng) { return S(learner.init(rng)); };
  m.update = [learner, n, d, scale](int step, const BitVector& x, const S& s,
                                    Rng& rng) -> S {
    if (step <= n) {
      return S(learner.update(step, x, std::get<LearnerState>(s), rng));
    }
    TestPhaseState test;
    if (step == n + 1) {
      test.hypothesis = learner.output(std::get<LearnerState>(s), rng);
      for (int j : test.hypothesis.subset) {
        if (j < 1 || j > d) {
          throw std::invalid_argument("learner output is not a parity on [d]");
        }
      }
      if (test.hypothesis.sign != 1 && test.hypothesis.sign != -1) {
        throw std::invalid_argument("learner sign is not +-1");
      }
      test.count = rng.Laplace(scale);
    } else {
      test = std::get<TestPhaseState>(s);
    }
    if (x.Parity(test.hypothesis.subset) == x[d] * test.hypothesis.sign) {
      test.count += 1;
    }
    return S(std::move(test));
  };
  m.output = [scale](const S& s, Rng& rng) {
    return std::get<TestPhaseState>(s).count + rng.Laplace(scale);
  };
  return m;
}

// Runs M' on a stream, converting learner failures into errors.
template <typename LearnerState>
absl::StatusOr<AdversaryView<DistinguisherState<LearnerState>, double>>
RunLearnerDistinguisher(
    const OnlineAlgorithm<BitVector, DistinguisherState<LearnerState>, double>&
        m,
    int n, std::span<const BitVector> stream, int t, uint64_t seed) {
  if (static_cast<int>(stream.size()) <= n) {
    return absl::InvalidArgumentError("stream must be longer than n");
  }
  try {
    return RunPan(m, stream, t, seed);
  } catch (const std::invalid_argument& e) {
    return absl::InvalidArgumentError(e.what());
  } catch (const std::bad_variant_access&) {
    return absl::InternalError("distinguisher state in the wrong phase");
  }
}

// Learner that ignores its data and returns a fixed hypothesis.
OnlineAlgorithm<BitVector, int, ParityIndex> PlantedLearner(
    ParityIndex hypothesis);

// Direct draw from Bin(trials, rate) + Lap(1/eps) + Lap(1/eps).
double SampleCountConvolution(int64_t trials, double rate, double epsilon,
                              Rng& rng);

struct ThresholdReport {
  double tau = 0;
  double advantage = 0;
  Interval ci;
  std::string ToJson() const;  // {tau, adv, ci_low, ci_high}
};

// Threshold maximizing Pr[Z > tau | mixture] - Pr[Z > tau | uniform] on the
// even-indexed samples; the advantage and its interval are measured on the
// odd-indexed ones.
absl::StatusOr<ThresholdReport> ThresholdDistinguisher(
    std::span<const double> z_mixture, std::span<const double> z_uniform);

inline constexpr int64_t kMinThresholdSamples = 10000;

// One JSONL record {world, seed, z}.
std::string DistinguishRecord(const std::string& world, uint64_t seed,
                              double z);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_REDUCTIONS_H_
