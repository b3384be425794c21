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

#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "shufflepan/audit.h"
#include "shufflepan/finite_distribution.h"
#include "shufflepan/hard_family.h"
#include "shufflepan/info_metrics.h"
#include "shufflepan/pan.h"
#include "shufflepan/random.h"
#include "shufflepan/shuffle.h"

namespace shufflepan {
namespace {

using ::testing::ElementsAre;

ShuffleProtocol RrSumProtocol(double flip, int n, double gamma = 1) {
  return ShuffleProtocol{*Randomizer::BinaryRandomizedResponse(flip),
                         SumAnalyzer(), n, gamma};
}

// P_{1,{1},b,alpha} as a law over the binary input index (0 is +1).
std::vector<std::vector<double>> OneBitFamily(double alpha) {
  return {{0.5 + alpha, 0.5 - alpha}, {0.5 - alpha, 0.5 + alpha}};
}

TEST(RunShuffleTest, IdentityOnOneUser) {
  ShuffleProtocol p{Randomizer::Identity(4), SumAnalyzer(), 1};
  const std::vector<int> data = {3};
  const ShuffleRun run = *RunShuffle(p, data, 0, 1);
  EXPECT_THAT(run.counts, ElementsAre(0, 0, 0, 1));
}

TEST(RunShuffleTest, NoiselessRandomizedResponseSum) {
  const std::vector<int> data = {1, 1, 0};
  const ShuffleRun run = *RunShuffle(RrSumProtocol(0, 3), data, 0, 5);
  EXPECT_THAT(run.counts, ElementsAre(1, 2));
  EXPECT_EQ(run.output, 2);
}

TEST(RunShuffleTest, OutOfAlphabetMessageIsAnError) {
  ShuffleProtocol p{Randomizer::FromSampler(
                        2, 2, 1, [](int x, Rng&) { return std::vector<int>{x + 1}; }),
                    SumAnalyzer(), 2};
  const std::vector<int> data = {0, 1};
  EXPECT_FALSE(RunShuffle(p, data, 0, 1).ok());
  EXPECT_FALSE(Randomizer::FromTable(2, {{{{2}, 1.0}}}).ok());
}

TEST(RunShuffleTest, DropoutValidation) {
  const ShuffleProtocol p = RrSumProtocol(0.2, 9, 1.0 / 3);
  const std::vector<int> three = {1, 0, 1};
  EXPECT_TRUE(RunShuffle(p, three, 2.0 / 3, 1).ok());
  EXPECT_FALSE(RunShuffle(p, three, 0.7, 1).ok());
  EXPECT_FALSE(RunShuffle(p, three, 0.5, 1).ok());  // cohort of 4 expected
  EXPECT_FALSE(RunShuffle(p, three, -0.1, 1).ok());
}

TEST(RunShuffleTest, DropoutMatchesHonestRunOfSurvivors) {
  const std::vector<int> survivors = {1, 0, 1, 1};
  const ShuffleProtocol robust = RrSumProtocol(0.3, 12, 1.0 / 3);
  const ShuffleProtocol honest = RrSumProtocol(0.3, 4);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_EQ(RunShuffle(robust, survivors, 2.0 / 3, seed)->counts,
              RunShuffle(honest, survivors, 0, seed)->counts);
  }
  // In law: the shuffled view depends only on the survivors.
  const CountLaw law =
      *ExactShuffleViewOnDataset(robust.randomizer, survivors);
  Rng rng(3);
  constexpr int kTrials = 200000;
  std::vector<double> freq(5, 0);
  for (int i = 0; i < kTrials; ++i) {
    freq[RunShuffle(robust, survivors, 2.0 / 3, rng())->counts[1]] += 1;
  }
  for (const auto& [counts, p] : law) {
    EXPECT_NEAR(freq[counts[1]] / kTrials, p,
                4 * std::sqrt(p * (1 - p) / kTrials) + 1e-12);
  }
}

TEST(RunShuffleTest, AnalyzerInvariantUnderReordering) {
  Rng rng(8);
  const std::vector<int> data = {0, 1, 1, 0, 1, 1, 1};
  const ShuffleProtocol p = RrSumProtocol(0.25, 7);
  for (int trial = 0; trial < 100; ++trial) {
    const ShuffleRun run = *RunShuffle(p, data, 0, rng());
    std::vector<int> messages = Materialize(run.counts, rng);
    std::shuffle(messages.begin(), messages.end(), rng);
    EXPECT_EQ(p.analyzer(CountMessages(messages, 2)), run.output);
  }
}

TEST(ExactShuffleTest, ConvolutionOracle) {
  const Randomizer rr = *Randomizer::BinaryRandomizedResponse(0.25);
  const std::vector<int> data = {1, 1, 0};
  const CountLaw law = *ExactShuffleViewOnDataset(rr, data);
  // Direct convolution of Bern(.75), Bern(.75), Bern(.25).
  const double a = 0.75, c = 0.25;
  const std::vector<double> oracle = {
      (1 - a) * (1 - a) * (1 - c),
      2 * a * (1 - a) * (1 - c) + (1 - a) * (1 - a) * c,
      a * a * (1 - c) + 2 * a * (1 - a) * c, a * a * c};
  ASSERT_EQ(law.size(), 4u);
  for (const auto& [counts, p] : law) {
    EXPECT_EQ(counts[0] + counts[1], 3);
    EXPECT_NEAR(p, oracle[counts[1]], 1e-15);
  }
}

TEST(ExactShuffleTest, DeterministicMechanismIsPointMass) {
  const std::vector<int> data = {2, 0, 2};
  const CountLaw law = *ExactShuffleViewOnDataset(Randomizer::Identity(3), data);
  ASSERT_EQ(law.size(), 1u);
  EXPECT_EQ(law.begin()->first, (MessageCounts{1, 0, 2}));
  EXPECT_EQ(law.begin()->second, 1.0);
}

TEST(ExactShuffleTest, Guard) {
  CountLaw wide;
  for (int i = 0; i < 5000; ++i) wide[{i, 0}] = 1.0 / 5000;
  EXPECT_EQ(Convolve(wide, wide).status().code(),
            absl::StatusCode::kResourceExhausted);
}

TEST(RunPanTest, FullIntrusionSeesFinalState) {
  const FinitePanAlgorithm chain = *MakeRandomizedResponseChain(4, 0.2);
  const std::vector<int> stream = {1, 0, 1, 1};
  const OnlineAlgorithm<int, int, int> online = AsOnline(chain);
  const std::span<const int> span(stream);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const auto view = *RunPan(online, span, 4, seed);
    EXPECT_EQ(view.state, view.output);  // output map is the identity
  }
  EXPECT_FALSE(RunPan(online, span, 0, 1).ok());
  EXPECT_FALSE(RunPan(online, span, 5, 1).ok());
}

TEST(RunPanTest, SameExecutionForStateAndOutput) {
  // Output = state after the last update; with t = n both come from one run,
  // for t < n the state is a prefix of the same run.
  OnlineAlgorithm<int, std::vector<int>, int> recorder;
  recorder.init = [](Rng&) { return std::vector<int>{}; };
  recorder.update = [](int, const int& x, const std::vector<int>& s, Rng& rng) {
    std::vector<int> next = s;
    next.push_back(x + 10 * static_cast<int>(rng.UniformInt(10)));
    return next;
  };
  recorder.output = [](const std::vector<int>& s, Rng&) {
    int total = 0;
    for (int v : s) total = total * 100 + v;
    return total;
  };
  const std::vector<int> stream = {1, 2, 3};
  const auto view = *RunPan(recorder, std::span<const int>(stream), 2, 9);
  ASSERT_EQ(view.state.size(), 2u);
  EXPECT_EQ(view.output / 100, view.state[0] * 100 + view.state[1]);
}

TEST(ExactPanTest, NoisyCounterOnZerosKeepsInitialNoise) {
  const QuantizedCounter counter = *MakeQuantizedCounter(3, 1.0);
  const std::vector<int> zeros = {0, 0, 0};
  const std::vector<double> law =
      *ExactStateLaw(counter.alg, PointLaws(zeros, 2), 3);
  const int h = counter.noise.half_width;
  for (int s = 0; s < counter.alg.num_states; ++s) {
    EXPECT_EQ(law[s], s <= 2 * h ? counter.noise.pmf[s] : 0.0);
  }
  EXPECT_NEAR(counter.StateValue(h), 0.0, 1e-15);
  EXPECT_EQ(counter.noise.pmf.size(), 8193u);
}

TEST(ExactPanTest, ParityChainMatchesMonteCarlo) {
  const FinitePanAlgorithm chain = *MakeParityChain(0.3);
  const std::vector<int> stream = {1, 0};
  const std::vector<double> exact =
      *ExactOutputLaw(chain, PointLaws(stream, 2));
  // Pr[output = 1] = Pr[exactly one of the two bits is flipped relative to
  // the xor of the inputs] combination: 1 with prob .7*.7 + .3*.3.
  EXPECT_NEAR(exact[1], 0.58, 1e-15);
  constexpr int kTrials = 10000000;
  const OnlineAlgorithm<int, int, int> online = AsOnline(chain);
  Rng rng(77);
  int64_t ones = 0;
  for (int i = 0; i < kTrials; ++i) {
    int s = online.init(rng);
    s = online.update(1, stream[0], s, rng);
    s = online.update(2, stream[1], s, rng);
    ones += online.output(s, rng);
  }
  const double sigma = std::sqrt(exact[1] * exact[0] / kTrials);
  EXPECT_NEAR(static_cast<double>(ones) / kTrials, exact[1], 3 * sigma);
}

TEST(ExactPanTest, DeclaredSpaceIsEnforced) {
  FinitePanAlgorithm bad = MakeConstantAlgorithm(2);
  bad.update = [](int, int, int s) -> SparseLaw { return {{s + 1, 1.0}}; };
  const std::vector<int> stream = {0};
  EXPECT_EQ(ExactStateLaw(bad, PointLaws(stream, 2), 1).status().code(),
            absl::StatusCode::kOutOfRange);
}

const std::vector<double> kGrid = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0};

TEST(AuditTest, IdenticalInputsHaveZeroDelta) {
  const Randomizer rr = *Randomizer::BinaryRandomizedResponse(0.2);
  const std::vector<int> x = {1, 0, 1};
  const AuditCurve curve = *AuditShuffle(rr, x, x, kGrid);
  ASSERT_EQ(curve.size(), kGrid.size());
  for (const AuditPoint& p : curve) {
    EXPECT_EQ(p.delta_max(), 0.0);
  }
}

TEST(AuditTest, SingleUserRandomizedResponse) {
  for (double flip : {0.1, 0.25, 0.4}) {
    const Randomizer rr = *Randomizer::BinaryRandomizedResponse(flip);
    const double eps = std::log((1 - flip) / flip);
    const std::vector<double> grid = {0.0, eps / 2, eps, eps + 0.5};
    const AuditCurve curve = *AuditShuffleWorstCase(rr, 1, grid);
    EXPECT_NEAR(curve[0].delta_max(), 1 - 2 * flip, 1e-12);  // TV
    EXPECT_GT(curve[1].delta_max(), 1e-3);
    EXPECT_NEAR(curve[2].delta_max(), 0.0, 1e-9);
    EXPECT_EQ(curve[3].delta_max(), 0.0);
  }
}

TEST(AuditTest, ShufflingAmplifies) {
  const double flip = 0.2;
  const Randomizer rr = *Randomizer::BinaryRandomizedResponse(flip);
  const AuditCurve local = *AuditShuffleWorstCase(rr, 1, kGrid);
  const AuditCurve shuffled = *AuditShuffleWorstCase(rr, 3, kGrid);
  bool strictly_below = false;
  for (size_t i = 0; i < kGrid.size(); ++i) {
    EXPECT_LE(shuffled[i].delta_max(), local[i].delta_max() + 1e-15);
    strictly_below |= shuffled[i].delta_max() < local[i].delta_max() - 1e-6;
  }
  EXPECT_TRUE(strictly_below);
}

TEST(AuditTest, CurveIsNonincreasingAndStartsAtTv) {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Randomizer rr =
        *Randomizer::BinaryRandomizedResponse(0.05 + 0.4 * rng.Uniform53());
    std::vector<int> x(5), y(5);
    for (int i = 0; i < 5; ++i) x[i] = y[i] = static_cast<int>(rng.UniformInt(2));
    y[rng.UniformInt(5)] ^= 1;
    const AuditCurve curve = *AuditShuffle(rr, x, y, kGrid);
    const CountLaw px = *ExactShuffleViewOnDataset(rr, x);
    const CountLaw py = *ExactShuffleViewOnDataset(rr, y);
    const AuditCurve tv = AuditLaws(px, py, std::vector<double>{0.0});
    EXPECT_NEAR(curve[0].delta_forward, tv[0].delta_forward, 1e-15);
    EXPECT_NEAR(curve[0].delta_forward, curve[0].delta_backward, 1e-14);
    for (size_t i = 1; i < curve.size(); ++i) {
      EXPECT_LE(curve[i].delta_max(), curve[i - 1].delta_max() + 1e-15);
    }
  }
}

TEST(AuditTest, PostProcessingNeverIncreasesDelta) {
  Rng rng(13);
  const Analyzer parity = [](const MessageCounts& c) {
    return static_cast<double>(c[1] % 2);
  };
  const Analyzer sum = SumAnalyzer();
  for (int trial = 0; trial < 20; ++trial) {
    const Randomizer rr =
        *Randomizer::BinaryRandomizedResponse(0.05 + 0.4 * rng.Uniform53());
    std::vector<int> x(4), y(4);
    for (int i = 0; i < 4; ++i) x[i] = y[i] = static_cast<int>(rng.UniformInt(2));
    y[0] ^= 1;
    const CountLaw px = *ExactShuffleViewOnDataset(rr, x);
    const CountLaw py = *ExactShuffleViewOnDataset(rr, y);
    const AuditCurve view = AuditLaws(px, py, kGrid);
    for (const Analyzer& a : {parity, sum}) {
      const AuditCurve post = AuditLaws(PushThroughAnalyzer(px, a),
                                        PushThroughAnalyzer(py, a), kGrid);
      for (size_t i = 0; i < kGrid.size(); ++i) {
        EXPECT_LE(post[i].delta_max(), view[i].delta_max() + 1e-15);
      }
    }
  }
}

TEST(AuditTest, CsvHeader) {
  const AuditCurve curve = {{0.5, 0.25, 0.125}};
  EXPECT_EQ(AuditCurveToCsv(curve),
            "epsilon,delta_forward,delta_backward,delta_max\n"
            "0.5,0.25,0.125,0.25\n");
}

TEST(PanAuditTest, RandomizedResponseChainIsPure) {
  const double flip = 0.2;
  const FinitePanAlgorithm chain = *MakeRandomizedResponseChain(3, flip);
  const double eps = std::log((1 - flip) / flip);
  const std::vector<double> grid = {0.0, eps / 2, eps};
  const std::vector<int> x = {1, 0, 1};
  for (int i = 0; i < 3; ++i) {
    std::vector<int> y = x;
    y[i] ^= 1;
    const AuditCurve curve = *AuditPan(chain, x, y, grid);
    EXPECT_GT(curve[1].delta_max(), 0.0);
    EXPECT_NEAR(curve[2].delta_max(), 0.0, 1e-12);
  }
}

TEST(PanAuditTest, IntrusionBeforeChangeStillSeesOutput) {
  // A non-private counter: the final output reveals the last element even
  // though the intrusion at t=1 does not.
  FinitePanAlgorithm leaky = *MakeRandomizedResponseChain(2, 0.0);
  const std::vector<int> x = {0, 0};
  const std::vector<int> y = {0, 1};
  const std::vector<double> grid = {1.0};
  EXPECT_NEAR((*AuditPanAt(leaky, x, y, 1, grid))[0].delta_max(), 1.0, 1e-15);
}

TEST(PanAuditTest, QuantizedCounterMeetsBudget) {
  const double eps = 1.0;
  const QuantizedCounter counter = *MakeQuantizedCounter(2, eps);
  EXPECT_GT(counter.slack(), 0.0);
  EXPECT_LT(counter.slack(), 1e-25);
  const std::vector<double> grid = {0.5, eps};
  const std::vector<int> x = {1, 0};
  const std::vector<int> y = {1, 1};
  const AuditCurve curve = *AuditPan(counter.alg, x, y, grid);
  EXPECT_GT(curve[0].delta_max(), 0.05);
  EXPECT_LE(curve[1].delta_max(), counter.slack() + 1e-12);
}

TEST(HybridCertificateTest, SingleStep) {
  const FinitePanAlgorithm chain = *MakeRandomizedResponseChain(1, 0.3);
  const HybridReport r = *HybridTvCertificate(chain, OneBitFamily(0.2), 1);
  ASSERT_EQ(r.steps.size(), 1u);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.total_tv, r.steps[0].tv, 1e-15);
}

TEST(HybridCertificateTest, RandomizedResponseCounterThreeSteps) {
  const FinitePanAlgorithm chain = *MakeRandomizedResponseChain(3, 0.25);
  const HybridReport r = *HybridTvCertificate(chain, OneBitFamily(0.25), 3);
  ASSERT_EQ(r.steps.size(), 3u);
  for (const HybridStep& s : r.steps) {
    EXPECT_LE(s.tv, s.bound + 1e-10) << "step " << s.i;
    EXPECT_GT(s.mutual_information, 0.0);
  }
  EXPECT_TRUE(r.holds);
  EXPECT_LE(r.total_tv, r.sum_tv + 1e-15);
}

TEST(HybridCertificateTest, ConstantAlgorithmIsZero) {
  const HybridReport r =
      *HybridTvCertificate(MakeConstantAlgorithm(2), OneBitFamily(0.3), 3);
  for (const HybridStep& s : r.steps) {
    EXPECT_EQ(s.tv, 0.0);
    EXPECT_NEAR(s.mutual_information, 0.0, 1e-15);
  }
  EXPECT_TRUE(r.holds);
}

TEST(HybridCertificateTest, MutualInformationOracle) {
  // n = 1, RR chain: S_1 = RR(X_1) with X_1 from a random member.
  const double flip = 0.1, alpha = 0.2;
  const FinitePanAlgorithm chain = *MakeRandomizedResponseChain(1, flip);
  const HybridReport r = *HybridTvCertificate(chain, OneBitFamily(alpha), 1);
  // Pr[S = 1 | v] for v = +1 (index 0 favoured) and v = -1.
  const double p_plus = (0.5 + alpha) * flip + (0.5 - alpha) * (1 - flip);
  const double p_minus = (0.5 - alpha) * flip + (0.5 + alpha) * (1 - flip);
  auto h = [](double p) { return -p * std::log(p) - (1 - p) * std::log(1 - p); };
  const double oracle = h(0.5) - 0.5 * h(p_plus) - 0.5 * h(p_minus);
  EXPECT_NEAR(r.steps[0].mutual_information, oracle, 1e-14);
}

TEST(HybridCertificateTest, NonUniformMixtureRejected) {
  const std::vector<std::vector<double>> family = {{0.6, 0.4}};
  EXPECT_FALSE(
      HybridTvCertificate(MakeConstantAlgorithm(2), family, 2).ok());
}

}  // namespace
}  // namespace shufflepan
