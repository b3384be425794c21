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

#ifndef SHUFFLEPAN_STATS_H_
#define SHUFFLEPAN_STATS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace shufflepan {

struct Interval {
  double low = 0;
  double high = 0;
};

// Wilson score interval for a binomial proportion; z = 1.96 gives 95%.
Interval WilsonInterval(int64_t successes, int64_t trials, double z = 1.96);

// Newcombe's hybrid score interval for p1 - p2.
Interval DifferenceInterval(int64_t s1, int64_t n1, int64_t s2, int64_t n2,
                            double z = 1.96);

// Pmf of Bin(n, p) on 0..n, by the multiplicative recurrence in log space.
std::vector<double> BinomialPmf(int n, double p);

// Law of Bin(n, p) clipped at `cap`: mass above cap moves to cap.
std::vector<double> ClippedBinomialPmf(int n, double p, int cap);

// Pr[Bin(n, p) > k].
double BinomialUpperTail(int n, double p, int k);

// Discrete convolution.
std::vector<double> ConvolvePmf(std::span<const double> a,
                                std::span<const double> b);

// Kolmogorov distribution tail Pr[K > lambda] = 2 sum (-1)^(k-1) e^(-2k^2
// lambda^2).
double KolmogorovTail(double lambda);

struct KsResult {
  double statistic = 0;
  double p_value = 0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value and the
// small-sample correction lambda = (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) D.
absl::StatusOr<KsResult> KsTwoSample(std::vector<double> a,
                                     std::vector<double> b);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
};

// Ordinary least squares y = intercept + slope * x.
absl::StatusOr<LinearFit> FitLine(std::span<const double> x,
                                  std::span<const double> y);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_STATS_H_
