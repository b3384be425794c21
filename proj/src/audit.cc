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

#include "shufflepan/audit.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace shufflepan {
namespace {

// Calls `visit` on every composition of `total` into `parts` parts.
void ForEachComposition(int total, int parts,
                        const std::function<void(const std::vector<int>&)>&
                            visit) {
  std::vector<int> c(parts, 0);
  std::function<void(int, int)> rec = [&](int index, int left) {
    if (index == parts - 1) {
      c[index] = left;
      visit(c);
      return;
    }
    for (int v = left; v >= 0; --v) {
      c[index] = v;
      rec(index + 1, left - v);
    }
  };
  rec(0, total);
}

}  // namespace

std::string AuditCurveToCsv(const AuditCurve& curve) {
  std::string out = "epsilon,delta_forward,delta_backward,delta_max\n";
  for (const AuditPoint& p : curve) {
    absl::StrAppendFormat(&out, "%.17g,%.17g,%.17g,%.17g\n", p.epsilon,
                          p.delta_forward, p.delta_backward, p.delta_max());
  }
  return out;
}

AuditCurve MaxCurve(const AuditCurve& a, const AuditCurve& b) {
  if (a.empty()) return b;
  AuditCurve out = a;
  for (size_t i = 0; i < out.size() && i < b.size(); ++i) {
    out[i].delta_forward = std::max(out[i].delta_forward, b[i].delta_forward);
    out[i].delta_backward =
        std::max(out[i].delta_backward, b[i].delta_backward);
  }
  return out;
}

AuditCurve AuditDense(std::span<const double> p, std::span<const double> q,
                      std::span<const double> epsilons) {
  AuditCurve curve;
  for (double eps : epsilons) {
    curve.push_back({eps, HockeyStick(p, q, eps), HockeyStick(q, p, eps)});
  }
  return curve;
}

absl::StatusOr<AuditCurve> AuditShuffle(const Randomizer& randomizer,
                                        std::span<const int> x,
                                        std::span<const int> x_prime,
                                        std::span<const double> epsilons) {
  absl::StatusOr<CountLaw> p = ExactShuffleViewOnDataset(randomizer, x);
  if (!p.ok()) return p.status();
  absl::StatusOr<CountLaw> q = ExactShuffleViewOnDataset(randomizer, x_prime);
  if (!q.ok()) return q.status();
  return AuditLaws(*p, *q, epsilons);
}

absl::StatusOr<AuditCurve> AuditShuffleWorstCase(
    const Randomizer& randomizer, int n, std::span<const double> epsilons) {
  if (n < 1) return absl::InvalidArgumentError("cohort must be nonempty");
  const int m = randomizer.input_size();
  std::vector<CountLaw> single(m);
  for (int a = 0; a < m; ++a) {
    std::vector<double> point(m, 0.0);
    point[a] = 1;
    absl::StatusOr<CountLaw> law = randomizer.MessageLaw(point);
    if (!law.ok()) return law.status();
    single[a] = *std::move(law);
  }
  AuditCurve worst;
  absl::Status status;
  ForEachComposition(n - 1, m, [&](const std::vector<int>& others) {
    if (!status.ok()) return;
    std::vector<int> dataset;
    for (int a = 0; a < m; ++a) dataset.insert(dataset.end(), others[a], a);
    absl::StatusOr<CountLaw> rest =
        ExactShuffleViewOnDataset(randomizer, dataset);
    if (!rest.ok()) {
      status = rest.status();
      return;
    }
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        absl::StatusOr<CountLaw> p = Convolve(*rest, single[a]);
        absl::StatusOr<CountLaw> q = Convolve(*rest, single[b]);
        if (!p.ok() || !q.ok()) {
          status = p.ok() ? q.status() : p.status();
          return;
        }
        worst = MaxCurve(worst, AuditLaws(*p, *q, epsilons));
      }
    }
  });
  if (!status.ok()) return status;
  return worst;
}

absl::StatusOr<AuditCurve> AuditPanAt(const FinitePanAlgorithm& alg,
                                      std::span<const int> x,
                                      std::span<const int> x_prime, int t,
                                      std::span<const double> epsilons) {
  if (x.size() != x_prime.size()) {
    return absl::InvalidArgumentError("streams differ in length");
  }
  const int n = static_cast<int>(x.size());
  if (t < 1 || t > n) return absl::OutOfRangeError("intrusion time out of range");
  const std::vector<std::vector<double>> lx = PointLaws(x, alg.num_inputs);
  const std::vector<std::vector<double>> ly = PointLaws(x_prime, alg.num_inputs);
  absl::StatusOr<std::vector<double>> sx = ExactStateLaw(alg, lx, t);
  if (!sx.ok()) return sx.status();
  absl::StatusOr<std::vector<double>> sy = ExactStateLaw(alg, ly, t);
  if (!sy.ok()) return sy.status();
  const bool same_suffix =
      std::equal(x.begin() + t, x.end(), x_prime.begin() + t);

  std::vector<double> factors;
  for (double eps : epsilons) factors.push_back(std::exp(eps));
  std::vector<double> forward(epsilons.size(), 0.0);
  std::vector<double> backward(epsilons.size(), 0.0);
  for (int s = 0; s < alg.num_states; ++s) {
    const double ps = (*sx)[s];
    const double qs = (*sy)[s];
    if (ps == 0 && qs == 0) continue;
    SparseLaw a, b;
    if (ps > 0) {
      absl::StatusOr<SparseLaw> c = ContinuationOutputLaw(alg, lx, t, s);
      if (!c.ok()) return c.status();
      a = *std::move(c);
    }
    if (qs > 0) {
      if (same_suffix && ps > 0) {
        b = a;
      } else {
        absl::StatusOr<SparseLaw> c = ContinuationOutputLaw(alg, ly, t, s);
        if (!c.ok()) return c.status();
        b = *std::move(c);
      }
    }
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      double pa = 0, qb = 0;
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
        pa = a[i++].second;
      } else if (i == a.size() || b[j].first < a[i].first) {
        qb = b[j++].second;
      } else {
        pa = a[i++].second;
        qb = b[j++].second;
      }
      const double u = ps * pa;
      const double v = qs * qb;
      for (size_t e = 0; e < factors.size(); ++e) {
        forward[e] += std::max(u - factors[e] * v, 0.0);
        backward[e] += std::max(v - factors[e] * u, 0.0);
      }
    }
  }
  AuditCurve curve;
  for (size_t e = 0; e < epsilons.size(); ++e) {
    curve.push_back({epsilons[e], forward[e], backward[e]});
  }
  return curve;
}

absl::StatusOr<AuditCurve> AuditPan(const FinitePanAlgorithm& alg,
                                    std::span<const int> x,
                                    std::span<const int> x_prime,
                                    std::span<const double> epsilons) {
  AuditCurve worst;
  for (int t = 1; t <= static_cast<int>(x.size()); ++t) {
    absl::StatusOr<AuditCurve> at = AuditPanAt(alg, x, x_prime, t, epsilons);
    if (!at.ok()) return at.status();
    worst = MaxCurve(worst, *at);
  }
  return worst;
}

}  // namespace shufflepan
