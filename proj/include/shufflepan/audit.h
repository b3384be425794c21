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

#ifndef SHUFFLEPAN_AUDIT_H_
#define SHUFFLEPAN_AUDIT_H_

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "shufflepan/info_metrics.h"
#include "shufflepan/pan.h"
#include "shufflepan/shuffle.h"

namespace shufflepan {

struct AuditPoint {
  double epsilon = 0;
  double delta_forward = 0;   // M(x) against M(x')
  double delta_backward = 0;  // M(x') against M(x)
  double delta_max() const { return std::max(delta_forward, delta_backward); }
};

using AuditCurve = std::vector<AuditPoint>;

// CSV with header epsilon,delta_forward,delta_backward,delta_max.
std::string AuditCurveToCsv(const AuditCurve& curve);

// Pointwise maximum of curves over the same grid.
AuditCurve MaxCurve(const AuditCurve& a, const AuditCurve& b);

// Hockey-stick curve between two laws keyed by view.
template <typename K>
AuditCurve AuditLaws(const std::map<K, double>& p, const std::map<K, double>& q,
                     std::span<const double> epsilons) {
  std::vector<double> pv, qv;
  auto ip = p.begin();
  auto iq = q.begin();
  while (ip != p.end() || iq != q.end()) {
    if (iq == q.end() || (ip != p.end() && ip->first < iq->first)) {
      pv.push_back(ip->second);
      qv.push_back(0);
      ++ip;
    } else if (ip == p.end() || iq->first < ip->first) {
      pv.push_back(0);
      qv.push_back(iq->second);
      ++iq;
    } else {
      pv.push_back(ip->second);
      qv.push_back(iq->second);
      ++ip;
      ++iq;
    }
  }
  AuditCurve curve;
  for (double eps : epsilons) {
    curve.push_back({eps, HockeyStick(pv, qv, eps), HockeyStick(qv, pv, eps)});
  }
  return curve;
}

AuditCurve AuditDense(std::span<const double> p, std::span<const double> q,
                      std::span<const double> epsilons);

// Shuffled-multiset view on two datasets.
absl::StatusOr<AuditCurve> AuditShuffle(const Randomizer& randomizer,
                                        std::span<const int> x,
                                        std::span<const int> x_prime,
                                        std::span<const double> epsilons);

// Worst case over all neighboring datasets of size n: every multiset of the
// other n-1 inputs and every pair of values for the remaining user.
absl::StatusOr<AuditCurve> AuditShuffleWorstCase(
    const Randomizer& randomizer, int n, std::span<const double> epsilons);

// Joint (S_t, output) view of one intrusion at time t.
absl::StatusOr<AuditCurve> AuditPanAt(const FinitePanAlgorithm& alg,
                                      std::span<const int> x,
                                      std::span<const int> x_prime, int t,
                                      std::span<const double> epsilons);

// Worst case over t in [1, |x|].
absl::StatusOr<AuditCurve> AuditPan(const FinitePanAlgorithm& alg,
                                    std::span<const int> x,
                                    std::span<const int> x_prime,
                                    std::span<const double> epsilons);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_AUDIT_H_
