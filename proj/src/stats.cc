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

#include "shufflepan/stats.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"

namespace shufflepan {

Interval WilsonInterval(int64_t successes, int64_t trials, double z) {
  if (trials <= 0) return {0, 1};
  const double n = static_cast<double>(trials);
  const double p = successes / n;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half =
      z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

Interval DifferenceInterval(int64_t s1, int64_t n1, int64_t s2, int64_t n2,
                            double z) {
  const double p1 = static_cast<double>(s1) / n1;
  const double p2 = static_cast<double>(s2) / n2;
  const Interval w1 = WilsonInterval(s1, n1, z);
  const Interval w2 = WilsonInterval(s2, n2, z);
  const double d = p1 - p2;
  return {d - std::sqrt((p1 - w1.low) * (p1 - w1.low) +
                        (w2.high - p2) * (w2.high - p2)),
          d + std::sqrt((w1.high - p1) * (w1.high - p1) +
                        (p2 - w2.low) * (p2 - w2.low))};
}

std::vector<double> BinomialPmf(int n, double p) {
  std::vector<double> pmf(n + 1, 0.0);
  if (p <= 0) {
    pmf[0] = 1;
    return pmf;
  }
  if (p >= 1) {
    pmf[n] = 1;
    return pmf;
  }
  const double lp = std::log(p), lq = std::log1p(-p);
  for (int k = 0; k <= n; ++k) {
    const double log_choose =
        std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    pmf[k] = std::exp(log_choose + k * lp + (n - k) * lq);
  }
  return pmf;
}

std::vector<double> ClippedBinomialPmf(int n, double p, int cap) {
  const std::vector<double> pmf = BinomialPmf(n, p);
  cap = std::clamp(cap, 0, n);
  std::vector<double> out(pmf.begin(), pmf.begin() + cap + 1);
  double tail = 0;
  for (int k = n; k > cap; --k) tail += pmf[k];
  out[cap] += tail;
  return out;
}

double BinomialUpperTail(int n, double p, int k) {
  const std::vector<double> pmf = BinomialPmf(n, p);
  double tail = 0;
  for (int j = n; j > k; --j) tail += pmf[j];
  return tail;
}

std::vector<double> ConvolvePmf(std::span<const double> a,
                                std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

double KolmogorovTail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2 * sum, 0.0, 1.0);
}

absl::StatusOr<KsResult> KsTwoSample(std::vector<double> a,
                                     std::vector<double> b) {
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError("KS test needs two nonempty samples");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return KsResult{d, KolmogorovTail((ne + 0.12 + 0.11 / ne) * d)};
}

absl::StatusOr<LinearFit> FitLine(std::span<const double> x,
                                  std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    return absl::InvalidArgumentError("need at least two paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) return absl::InvalidArgumentError("degenerate x values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
  }
  return fit;
}

}  // namespace shufflepan
