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

#include "boost/math/distributions/chi_squared.hpp"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "shufflepan/bit_vector.h"
#include "shufflepan/finite_distribution.h"
#include "shufflepan/fourier.h"
#include "shufflepan/hard_family.h"

namespace shufflepan {
namespace {

using ::testing::DoubleNear;
using ::testing::Each;
using ::testing::SizeIs;

HardDistribution Member(FamilyTag tag, int d, std::vector<int> ell, int b,
                        double alpha, bool test_mode = false) {
  absl::StatusOr<HardDistribution> h = HardDistribution::Create(
      tag, d, ParityIndex{std::move(ell), b}, alpha, test_mode);
  EXPECT_TRUE(h.ok()) << h.status();
  return *h;
}

BitVector Point(std::vector<int8_t> entries) {
  return *BitVector::Create(std::move(entries));
}

TEST(BitVectorTest, RejectsNonSigns) {
  EXPECT_FALSE(BitVector::Create({1, 0, -1}).ok());
  EXPECT_FALSE(BitVector::Create({}).ok());
}

TEST(BitVectorTest, IndexOrderIsLexicographicPlusFirst) {
  EXPECT_EQ(Point({1, 1}).Index(), 0u);
  EXPECT_EQ(Point({1, -1}).Index(), 1u);
  EXPECT_EQ(Point({-1, 1}).Index(), 2u);
  EXPECT_EQ(Point({-1, -1}).Index(), 3u);
  for (uint64_t i = 0; i < 32; ++i) {
    EXPECT_EQ(BitVector::FromIndex(i, 5).Index(), i);
  }
}

TEST(ParityIndexTest, Validation) {
  EXPECT_FALSE(ParityIndex::Create({}, 1, 3).ok());
  EXPECT_TRUE(ParityIndex::Create({}, 1, 3, /*allow_empty=*/true).ok());
  EXPECT_FALSE(ParityIndex::Create({1, 1}, 1, 3).ok());
  EXPECT_FALSE(ParityIndex::Create({4}, 1, 3).ok());
  EXPECT_FALSE(ParityIndex::Create({0}, 1, 3).ok());
  EXPECT_FALSE(ParityIndex::Create({1}, 0, 3).ok());
  EXPECT_EQ(ParityIndex::Create({3, 1}, -1, 3)->subset,
            (std::vector<int>{1, 3}));
}

TEST(PmfEvalTest, ClosedFormValues) {
  const HardDistribution p = Member(FamilyTag::kParity, 3, {1}, 1, 0.1);
  EXPECT_DOUBLE_EQ(*p.Pmf(Point({1, -1, 1})), 0.15);
  EXPECT_DOUBLE_EQ(*p.Pmf(Point({-1, -1, 1})), 0.10);
}

TEST(PmfEvalTest, Errors) {
  const HardDistribution p = Member(FamilyTag::kParity, 3, {1}, 1, 0.1);
  EXPECT_FALSE(p.Pmf(Point({1, 1})).ok());
  EXPECT_FALSE(HardDistribution::Create(FamilyTag::kParity, 3,
                                        ParityIndex{{1}, 1}, 0.5)
                   .ok());
  EXPECT_FALSE(HardDistribution::Create(FamilyTag::kParity, 3,
                                        ParityIndex{{1}, 1}, 0.0)
                   .ok());
  EXPECT_FALSE(HardDistribution::Create(FamilyTag::kParity, 3,
                                        ParityIndex{{}, 1}, 0.1)
                   .ok());
  // Q admits the empty subset, its label coordinate is implicit.
  const HardDistribution q = Member(FamilyTag::kSignedParity, 3, {}, 1, 0.1);
  EXPECT_FALSE(q.Pmf(Point({1, 1, 1})).ok());
  EXPECT_TRUE(q.Pmf(Point({1, 1, 1, 1})).ok());
}

TEST(PmfEvalTest, ZeroBiasInTestModeIsUniform) {
  const HardDistribution p =
      Member(FamilyTag::kParity, 4, {1, 3}, -1, 0.0, /*test_mode=*/true);
  for (uint64_t i = 0; i < 16; ++i) {
    EXPECT_DOUBLE_EQ(*p.Pmf(BitVector::FromIndex(i, 4)), 1.0 / 16);
  }
}

TEST(PmfEvalTest, EveryMassTakesOneOfTwoValuesAndSumsToOne) {
  for (FamilyTag tag : {FamilyTag::kParity, FamilyTag::kSignedParity}) {
    for (int d = 1; d <= 5; ++d) {
      for (double alpha : {0.05, 0.25, 0.49}) {
        absl::StatusOr<std::vector<HardDistribution>> family =
            EnumerateFamily(d, d, alpha, tag);
        ASSERT_TRUE(family.ok());
        for (const HardDistribution& h : *family) {
          const int dim = h.domain_dimension();
          const double hi = (1 + 2 * alpha) * std::ldexp(1.0, -dim);
          const double lo = (1 - 2 * alpha) * std::ldexp(1.0, -dim);
          std::vector<double> masses;
          for (uint64_t i = 0; i < (uint64_t{1} << dim); ++i) {
            const double m = *h.Pmf(BitVector::FromIndex(i, dim));
            EXPECT_TRUE(m == hi || m == lo) << m;
            masses.push_back(m);
          }
          EXPECT_NEAR(StableSum(masses), 1.0, 1e-12);
        }
      }
    }
  }
}

TEST(SampleTest, EmptyRequest) {
  Rng rng(1);
  EXPECT_THAT(SampleMany(Member(FamilyTag::kParity, 4, {2}, 1, 0.1), 0, rng),
              SizeIs(0));
}

TEST(SampleTest, CoordinateMeansMatchBias) {
  constexpr int kDraws = 1000000;
  const double alpha = 0.2;
  for (int b : {1, -1}) {
    const HardDistribution p = Member(FamilyTag::kParity, 6, {3}, b, alpha);
    Rng rng(7 + b);
    std::vector<double> sums(6, 0.0);
    for (int i = 0; i < kDraws; ++i) {
      const BitVector x = p.Sample(rng);
      for (int j = 0; j < 6; ++j) sums[j] += x[j];
    }
    for (int j = 0; j < 6; ++j) {
      const double expected = j == 2 ? 2 * alpha * b : 0.0;
      EXPECT_NEAR(sums[j] / kDraws, expected, 3e-3) << "coordinate " << j + 1;
    }
  }
}

TEST(SampleTest, LargeDimensionParityBias) {
  constexpr int kDraws = 200000;
  const HardDistribution p =
      Member(FamilyTag::kParity, 200, {5, 77, 150}, -1, 0.3);
  Rng rng(3);
  double parity_sum = 0;
  for (int i = 0; i < kDraws; ++i) {
    parity_sum += p.Sample(rng).Parity({5, 77, 150});
  }
  EXPECT_NEAR(parity_sum / kDraws, -0.6, 5e-3);
}

// Pearson goodness of fit against the dense pmf at significance 1e-3.
void ExpectGoodnessOfFit(const DistributionHandle& dist, uint64_t seed) {
  constexpr int kDraws = 1000000;
  const FiniteDistribution dense = *Densify(dist);
  std::vector<double> counts(dense.size(), 0.0);
  Rng rng(seed);
  for (int i = 0; i < kDraws; ++i) counts[SampleOne(dist, rng).Index()] += 1;
  double statistic = 0;
  for (size_t x = 0; x < dense.size(); ++x) {
    const double expected = kDraws * dense[x];
    statistic += (counts[x] - expected) * (counts[x] - expected) / expected;
  }
  const boost::math::chi_squared chi(static_cast<double>(dense.size() - 1));
  EXPECT_LT(statistic, boost::math::quantile(boost::math::complement(chi, 1e-3)));
}

TEST(SampleTest, ChiSquareAgainstDensify) {
  ExpectGoodnessOfFit(Member(FamilyTag::kParity, 3, {1, 3}, 1, 0.2), 11);
  ExpectGoodnessOfFit(Member(FamilyTag::kParity, 8, {2, 5, 8}, -1, 0.1), 12);
  ExpectGoodnessOfFit(Member(FamilyTag::kParity, 12, {1, 12}, 1, 0.05), 13);
  ExpectGoodnessOfFit(Member(FamilyTag::kSignedParity, 5, {2, 4}, -1, 0.3),
                      14);
  ExpectGoodnessOfFit(Member(FamilyTag::kSignedParity, 4, {}, 1, 0.1), 15);
}

TEST(SampleTest, MixtureDraws) {
  absl::StatusOr<Mixture> diluted =
      Mixture::Dilute(Member(FamilyTag::kParity, 3, {2}, 1, 0.25), 2.0 / 9);
  ASSERT_TRUE(diluted.ok());
  // P_(b) has coordinate mean 2 alpha b.
  Rng rng(5);
  double sum = 0;
  constexpr int kDraws = 400000;
  for (int i = 0; i < kDraws; ++i) sum += diluted->Sample(rng)[1];
  EXPECT_NEAR(sum / kDraws, 0.5 * 2.0 / 9, 5e-3);
  const FiniteDistribution dense = *diluted->Densify();
  EXPECT_NEAR(*FourierCoefficient(dense, {2}), 0.5 * 2.0 / 9, 1e-15);
  EXPECT_FALSE(Mixture::Dilute(UniformCube{3}, 1.5).ok());
}

TEST(SampleTest, CoordinateCountsAgreeWithRowSampling) {
  const HardDistribution p = Member(FamilyTag::kParity, 5, {4}, 1, 0.2);
  constexpr int kTrials = 4000;
  constexpr int kRows = 50;
  Rng rng(9);
  double fast = 0, slow = 0, fast_sq = 0, slow_sq = 0;
  for (int t = 0; t < kTrials; ++t) {
    const double c = static_cast<double>((*SampleCoordinatePlusCounts(p, kRows, rng))[3]);
    double r = 0;
    for (const BitVector& x : SampleMany(p, kRows, rng)) r += x[3] > 0;
    fast += c;
    slow += r;
    fast_sq += c * c;
    slow_sq += r * r;
  }
  // Bin(50, 0.7): mean 35, variance 10.5.
  EXPECT_NEAR(fast / kTrials, 35, 0.3);
  EXPECT_NEAR(slow / kTrials, 35, 0.3);
  EXPECT_NEAR(fast_sq / kTrials - (fast / kTrials) * (fast / kTrials), 10.5, 1.0);
  EXPECT_NEAR(slow_sq / kTrials - (slow / kTrials) * (slow / kTrials), 10.5, 1.0);
  EXPECT_FALSE(SampleCoordinatePlusCounts(
                   Member(FamilyTag::kParity, 5, {1, 2}, 1, 0.2), 10, rng)
                   .ok());
}

TEST(DensifyTest, SingleCoordinate) {
  const FiniteDistribution dense =
      *Member(FamilyTag::kParity, 1, {1}, 1, 0.25).Densify();
  ASSERT_EQ(dense.size(), 2u);
  EXPECT_DOUBLE_EQ(dense[0], 0.75);  // x_1 = +1
  EXPECT_DOUBLE_EQ(dense[1], 0.25);
}

TEST(DensifyTest, FamilyMixtureIsUniform) {
  for (FamilyTag tag : {FamilyTag::kParity, FamilyTag::kSignedParity}) {
    for (int d = 1; d <= 5; ++d) {
      for (int k = 1; k <= d; ++k) {
        std::vector<FiniteDistribution> dense;
        const std::vector<HardDistribution> family =
            *EnumerateFamily(d, k, 0.3, tag);
        for (const HardDistribution& h : family) {
          dense.push_back(*h.Densify());
        }
        std::vector<double> weights(dense.size(), 1.0 / dense.size());
        const FiniteDistribution mix = *FiniteDistribution::Mix(dense, weights);
        EXPECT_THAT(std::vector<double>(mix.pmf().begin(), mix.pmf().end()), Each(DoubleNear(1.0 / mix.size(), 1e-12)));
      }
    }
  }
  const FiniteDistribution d2 = *Mixture::Uniform({
      Member(FamilyTag::kParity, 2, {1}, 1, 0.1),
      Member(FamilyTag::kParity, 2, {1}, -1, 0.1),
      Member(FamilyTag::kParity, 2, {2}, 1, 0.1),
      Member(FamilyTag::kParity, 2, {2}, -1, 0.1)})->Densify();
  EXPECT_THAT(std::vector<double>(d2.pmf().begin(), d2.pmf().end()), Each(DoubleNear(0.25, 1e-15)));
}

TEST(DensifyTest, AgreesWithPmfPointwise) {
  const HardDistribution q =
      Member(FamilyTag::kSignedParity, 6, {1, 2, 6}, -1, 0.37);
  const FiniteDistribution dense = *q.Densify();
  for (uint64_t i = 0; i < dense.size(); ++i) {
    EXPECT_NEAR(dense[i], *q.Pmf(BitVector::FromIndex(i, 7)), 1e-15);
  }
}

TEST(DensifyTest, DimensionGuard) {
  absl::StatusOr<FiniteDistribution> big =
      Member(FamilyTag::kParity, 21, {1}, 1, 0.1).Densify();
  EXPECT_EQ(big.status().code(), absl::StatusCode::kOutOfRange);
  EXPECT_EQ(Member(FamilyTag::kSignedParity, 20, {1}, 1, 0.1)
                .Densify()
                .status()
                .code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_TRUE(Member(FamilyTag::kParity, 20, {1}, 1, 0.1).Densify().ok());
}

TEST(FamilyEnumerateTest, Sizes) {
  EXPECT_THAT(*EnumerateFamily(4, 2, 0.1, FamilyTag::kParity), SizeIs(20));
  EXPECT_THAT(*EnumerateFamily(2, 1, 0.1, FamilyTag::kParity), SizeIs(4));
  EXPECT_THAT(*EnumerateFamily(3, 3, 0.1, FamilyTag::kSignedParity),
              SizeIs(16));
  for (int d = 1; d <= 7; ++d) {
    for (int k = 1; k <= d; ++k) {
      const uint64_t c = BinomialSumUpTo(d, k);
      EXPECT_EQ(EnumerateFamily(d, k, 0.1, FamilyTag::kParity)->size(), 2 * c);
      EXPECT_EQ(EnumerateFamily(d, k, 0.1, FamilyTag::kSignedParity)->size(),
                2 * c + 2);
    }
  }
  EXPECT_FALSE(EnumerateFamily(3, 4, 0.1, FamilyTag::kParity).ok());
  EXPECT_FALSE(EnumerateFamily(3, 0, 0.1, FamilyTag::kParity).ok());
}

TEST(FourierTest, UniformHasNoNonTrivialCoefficients) {
  const FiniteDistribution u = FiniteDistribution::Uniform(16);
  for (const std::vector<int>& t : SubsetsBySize(4, 1, 4)) {
    EXPECT_NEAR(*FourierCoefficient(u, t), 0.0, 1e-15);
  }
  EXPECT_DOUBLE_EQ(*FourierCoefficient(u, {}), 1.0);
}

TEST(FourierTest, HardMemberHasOneBiasedCharacter) {
  const double alpha = 0.15;
  for (int b : {1, -1}) {
    const std::vector<int> ell = {2, 4};
    const FiniteDistribution p =
        *Member(FamilyTag::kParity, 4, ell, b, alpha).Densify();
    for (const std::vector<int>& t : SubsetsBySize(4, 1, 4)) {
      const double expected = t == ell ? 2 * alpha * b : 0.0;
      EXPECT_NEAR(*FourierCoefficient(p, t), expected, 1e-15);
    }
  }
}

TEST(FourierTest, NonHypercubeDomain) {
  EXPECT_FALSE(FourierCoefficient(FiniteDistribution::Uniform(6), {1}).ok());
}

TEST(FourierTest, ParsevalOnRandomBooleanFunctions) {
  Rng rng(21);
  for (int d = 1; d <= 4; ++d) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> f(size_t{1} << d);
      for (double& v : f) v = rng.Sign();
      const std::vector<double> coefficients = *WalshHadamard(f);
      double energy = 0;
      for (double c : coefficients) energy += c * c;
      EXPECT_NEAR(energy, 1.0, 1e-12);  // E[f^2] = 1 for +-1 valued f
      // Coefficient of subset t equals E_U[f chi_t] computed directly.
      for (uint64_t t = 0; t < f.size(); ++t) {
        double direct = 0;
        for (uint64_t x = 0; x < f.size(); ++x) {
          direct += f[x] * BitVector::FromIndex(x, d).Parity([&] {
            std::vector<int> s;
            for (int j = 1; j <= d; ++j) {
              if ((t >> (d - j)) & 1) s.push_back(j);
            }
            return s;
          }());
        }
        EXPECT_NEAR(coefficients[t], direct / f.size(), 1e-12);
      }
    }
  }
}

TEST(DescriptorTest, JsonRoundTrip) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const FamilyTag tag =
        rng.Bernoulli(0.5) ? FamilyTag::kParity : FamilyTag::kSignedParity;
    const int d = 1 + static_cast<int>(rng.UniformInt(6));
    const std::vector<HardDistribution> family =
        *EnumerateFamily(d, d, 0.01 + 0.48 * rng.Uniform53(), tag);
    const HardDistribution& h = family[rng.UniformInt(family.size())];
    const nlohmann::json j = h.ToJson(d);
    EXPECT_EQ(j.at("k").get<int>(), d);
    absl::StatusOr<HardDistribution> back = HardDistribution::FromJson(j);
    ASSERT_TRUE(back.ok());
    EXPECT_EQ(back->tag(), h.tag());
    EXPECT_EQ(back->index(), h.index());
    EXPECT_EQ(back->alpha(), h.alpha());
  }
  EXPECT_FALSE(HardDistribution::FromJson(nlohmann::json{{"family", "R"}}).ok());
}

TEST(DescriptorTest, CsvDump) {
  const FiniteDistribution dense =
      *Member(FamilyTag::kParity, 1, {1}, 1, 0.25).Densify();
  EXPECT_EQ(dense.ToCsv(), "index,x,prob\n0,+,0.75\n1,-,0.25\n");
}

TEST(FiniteDistributionTest, Validation) {
  EXPECT_FALSE(FiniteDistribution::Create({0.5, 0.6}).ok());
  EXPECT_FALSE(FiniteDistribution::Create({-0.1, 1.1}).ok());
  EXPECT_FALSE(FiniteDistribution::Create({}).ok());
  EXPECT_TRUE(FiniteDistribution::Create({0.25, 0.75}).ok());
}

}  // namespace
}  // namespace shufflepan
