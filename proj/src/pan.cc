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

#include "shufflepan/pan.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shufflepan/finite_distribution.h"
#include "shufflepan/info_metrics.h"
#include "shufflepan/shuffle.h"

namespace shufflepan {
namespace {

int SampleSparse(const SparseLaw& law, Rng& rng) {
  const double u = rng.Uniform53();
  double cumulative = 0;
  for (const auto& [value, p] : law) {
    cumulative += p;
    if (u < cumulative) return value;
  }
  for (auto it = law.rbegin(); it != law.rend(); ++it) {
    if (it->second > 0) return it->first;
  }
  return law.back().first;
}

// Sorts by value and merges duplicates.
void Canonicalize(SparseLaw& law) {
  if (std::is_sorted(law.begin(), law.end(),
                     [](const auto& a, const auto& b) {
                       return a.first < b.first;
                     }) &&
      std::adjacent_find(law.begin(), law.end(), [](const auto& a,
                                                    const auto& b) {
        return a.first == b.first;
      }) == law.end()) {
    return;
  }
  std::sort(law.begin(), law.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  size_t out = 0;
  for (size_t i = 0; i < law.size(); ++i) {
    if (out > 0 && law[out - 1].first == law[i].first) {
      law[out - 1].second += law[i].second;
    } else {
      law[out++] = law[i];
    }
  }
  law.resize(out);
}

absl::Status ValidateLaws(const FinitePanAlgorithm& alg,
                          std::span<const std::vector<double>> input_laws) {
  if (alg.num_states > kMaxExactSupport ||
      alg.num_outputs > kMaxExactSupport) {
    return absl::ResourceExhaustedError(
        "state or output space exceeds the exact-mode guard");
  }
  for (const std::vector<double>& law : input_laws) {
    if (static_cast<int>(law.size()) != alg.num_inputs) {
      return absl::InvalidArgumentError("input law has the wrong size");
    }
  }
  return absl::OkStatus();
}

absl::Status CheckIndex(int value, int limit, const char* what) {
  if (value < 0 || value >= limit) {
    return absl::OutOfRangeError(
        absl::StrFormat("%s %d outside the declared space [0, %d)", what,
                        value, limit));
  }
  return absl::OkStatus();
}

}  // namespace

OnlineAlgorithm<int, int, int> AsOnline(const FinitePanAlgorithm& alg) {
  OnlineAlgorithm<int, int, int> online;
  online.init = [alg](Rng& rng) { return SampleSparse(alg.initial, rng); };
  online.update = [alg](int step, const int& x, const int& s, Rng& rng) {
    return SampleSparse(alg.update(step, x, s), rng);
  };
  online.output = [alg](const int& s, Rng& rng) {
    return SampleSparse(alg.output(s), rng);
  };
  return online;
}

std::vector<std::vector<double>> PointLaws(std::span<const int> stream,
                                           int num_inputs) {
  std::vector<std::vector<double>> laws;
  for (int x : stream) {
    std::vector<double> law(num_inputs, 0.0);
    law[x] = 1;
    laws.push_back(std::move(law));
  }
  return laws;
}

absl::StatusOr<std::vector<double>> ExactStateLaw(
    const FinitePanAlgorithm& alg,
    std::span<const std::vector<double>> input_laws, int t) {
  if (absl::Status s = ValidateLaws(alg, input_laws); !s.ok()) return s;
  if (t < 0 || t > static_cast<int>(input_laws.size())) {
    return absl::OutOfRangeError("time outside the stream");
  }
  std::vector<double> current(alg.num_states, 0.0);
  for (const auto& [s, p] : alg.initial) {
    if (absl::Status st = CheckIndex(s, alg.num_states, "state"); !st.ok()) {
      return st;
    }
    current[s] += p;
  }
  for (int step = 1; step <= t; ++step) {
    const std::vector<double>& law = input_laws[step - 1];
    std::vector<double> next(alg.num_states, 0.0);
    for (int s = 0; s < alg.num_states; ++s) {
      if (current[s] == 0) continue;
      for (int x = 0; x < alg.num_inputs; ++x) {
        if (law[x] == 0) continue;
        const double w = current[s] * law[x];
        for (const auto& [s2, q] : alg.update(step, x, s)) {
          if (absl::Status st = CheckIndex(s2, alg.num_states, "state");
              !st.ok()) {
            return st;
          }
          next[s2] += w * q;
        }
      }
    }
    current = std::move(next);
  }
  return current;
}

absl::StatusOr<std::vector<double>> ExactOutputLaw(
    const FinitePanAlgorithm& alg,
    std::span<const std::vector<double>> input_laws) {
  absl::StatusOr<std::vector<double>> states =
      ExactStateLaw(alg, input_laws, static_cast<int>(input_laws.size()));
  if (!states.ok()) return states.status();
  std::vector<double> out(alg.num_outputs, 0.0);
  for (int s = 0; s < alg.num_states; ++s) {
    if ((*states)[s] == 0) continue;
    for (const auto& [o, q] : alg.output(s)) {
      if (absl::Status st = CheckIndex(o, alg.num_outputs, "output");
          !st.ok()) {
        return st;
      }
      out[o] += (*states)[s] * q;
    }
  }
  return out;
}

absl::StatusOr<SparseLaw> ContinuationOutputLaw(
    const FinitePanAlgorithm& alg,
    std::span<const std::vector<double>> input_laws, int t, int s) {
  if (absl::Status st = ValidateLaws(alg, input_laws); !st.ok()) return st;
  const int n = static_cast<int>(input_laws.size());
  if (t < 0 || t > n) return absl::OutOfRangeError("time outside the stream");
  if (absl::Status st = CheckIndex(s, alg.num_states, "state"); !st.ok()) {
    return st;
  }
  SparseLaw current = {{s, 1.0}};
  for (int step = t + 1; step <= n; ++step) {
    const std::vector<double>& law = input_laws[step - 1];
    SparseLaw next;
    for (const auto& [state, p] : current) {
      for (int x = 0; x < alg.num_inputs; ++x) {
        if (law[x] == 0) continue;
        for (const auto& [s2, q] : alg.update(step, x, state)) {
          if (absl::Status st = CheckIndex(s2, alg.num_states, "state");
              !st.ok()) {
            return st;
          }
          next.emplace_back(s2, p * law[x] * q);
        }
      }
    }
    if (static_cast<int64_t>(next.size()) > kMaxExactSupport) {
      return absl::ResourceExhaustedError("continuation exceeds the guard");
    }
    Canonicalize(next);
    current = std::move(next);
  }
  SparseLaw out;
  if (current.size() == 1) {
    out = alg.output(current[0].first);
    for (auto& [o, q] : out) q *= current[0].second;
  } else {
    for (const auto& [state, p] : current) {
      for (const auto& [o, q] : alg.output(state)) out.emplace_back(o, p * q);
    }
  }
  for (const auto& [o, q] : out) {
    if (absl::Status st = CheckIndex(o, alg.num_outputs, "output"); !st.ok()) {
      return st;
    }
  }
  Canonicalize(out);
  return out;
}

absl::StatusOr<QuantizedLaplace> QuantizedLaplace::Create(double scale,
                                                          double step,
                                                          double range_scales) {
  if (!(scale > 0) || !(step > 0) || !(range_scales > 0)) {
    return absl::InvalidArgumentError("quantized Laplace needs positive scale");
  }
  QuantizedLaplace q;
  q.scale = scale;
  q.step = step;
  const double half = std::round(range_scales * scale / step);
  if (half > 5e6) {
    return absl::ResourceExhaustedError("quantization grid too large");
  }
  q.half_width = static_cast<int>(half);
  q.pmf.resize(2 * q.half_width + 1);
  for (int k = -q.half_width; k <= q.half_width; ++k) {
    q.pmf[k + q.half_width] = std::exp(-std::abs(k) * step / scale);
  }
  const double total = StableSum(q.pmf);
  for (double& p : q.pmf) p /= total;
  q.truncated_mass = std::exp(-range_scales);
  return q;
}

double QuantizedLaplace::EdgeMass(int shift) const {
  std::vector<double> edge(pmf.begin(),
                           pmf.begin() + std::min<size_t>(shift, pmf.size()));
  return StableSum(edge);
}

double QuantizedCounter::StateValue(int s) const {
  return (s - noise.half_width) * noise.step;
}

double QuantizedCounter::OutputValue(int o) const {
  return (o - 2 * noise.half_width) * noise.step;
}

double QuantizedCounter::slack() const {
  return noise.EdgeMass(static_cast<int>(std::lround(1 / noise.step)));
}

absl::StatusOr<QuantizedCounter> MakeQuantizedCounter(int n, double epsilon) {
  if (n < 1 || !(epsilon > 0)) {
    return absl::InvalidArgumentError("counter needs n >= 1 and eps > 0");
  }
  absl::StatusOr<QuantizedLaplace> noise = QuantizedLaplace::Create(1 / epsilon);
  if (!noise.ok()) return noise.status();
  QuantizedCounter counter;
  counter.noise = *std::move(noise);
  const int h = counter.noise.half_width;
  const int unit = static_cast<int>(std::lround(1 / counter.noise.step));
  FinitePanAlgorithm& alg = counter.alg;
  alg.num_inputs = 2;
  alg.num_states = 2 * h + 1 + unit * n;
  alg.num_outputs = 4 * h + 1 + unit * n;
  for (int k = 0; k <= 2 * h; ++k) {
    alg.initial.emplace_back(k, counter.noise.pmf[k]);
  }
  alg.update = [unit](int, int x, int s) -> SparseLaw {
    return {{s + unit * x, 1.0}};
  };
  const std::vector<double> pmf = counter.noise.pmf;
  alg.output = [pmf](int s) {
    SparseLaw out;
    out.reserve(pmf.size());
    for (size_t j = 0; j < pmf.size(); ++j) {
      out.emplace_back(s + static_cast<int>(j), pmf[j]);
    }
    return out;
  };
  return counter;
}

absl::StatusOr<FinitePanAlgorithm> MakeRandomizedResponseChain(int n,
                                                               double flip) {
  if (n < 1 || !(flip >= 0 && flip <= 1)) {
    return absl::InvalidArgumentError("bad randomized-response chain");
  }
  FinitePanAlgorithm alg;
  alg.num_inputs = 2;
  alg.num_states = n + 1;
  alg.num_outputs = n + 1;
  alg.initial = {{0, 1.0}};
  alg.update = [flip](int, int x, int s) -> SparseLaw {
    return {{s + x, 1 - flip}, {s + 1 - x, flip}};
  };
  alg.output = [](int s) -> SparseLaw { return {{s, 1.0}}; };
  return alg;
}

absl::StatusOr<FinitePanAlgorithm> MakeParityChain(double flip) {
  if (!(flip >= 0 && flip <= 1)) {
    return absl::InvalidArgumentError("flip probability outside [0, 1]");
  }
  FinitePanAlgorithm alg;
  alg.num_inputs = 2;
  alg.num_states = 2;
  alg.num_outputs = 2;
  alg.initial = {{0, 1.0}};
  alg.update = [flip](int, int x, int s) -> SparseLaw {
    return {{s ^ x, 1 - flip}, {s ^ x ^ 1, flip}};
  };
  alg.output = [](int s) -> SparseLaw { return {{s, 1.0}}; };
  return alg;
}

FinitePanAlgorithm MakeConstantAlgorithm(int num_inputs) {
  FinitePanAlgorithm alg;
  alg.num_inputs = num_inputs;
  alg.num_states = 1;
  alg.num_outputs = 1;
  alg.initial = {{0, 1.0}};
  alg.update = [](int, int, int) -> SparseLaw { return {{0, 1.0}}; };
  alg.output = [](int) -> SparseLaw { return {{0, 1.0}}; };
  return alg;
}

absl::StatusOr<HybridReport> HybridTvCertificate(
    const FinitePanAlgorithm& alg,
    std::span<const std::vector<double>> family, int n) {
  if (family.empty() || n < 1) {
    return absl::InvalidArgumentError("need a family and n >= 1");
  }
  const size_t v_count = family.size();
  const std::vector<double> uniform(alg.num_inputs, 1.0 / alg.num_inputs);
  std::vector<double> mixture(alg.num_inputs, 0.0);
  for (const std::vector<double>& p : family) {
    if (static_cast<int>(p.size()) != alg.num_inputs) {
      return absl::InvalidArgumentError("family member has the wrong size");
    }
    for (int x = 0; x < alg.num_inputs; ++x) mixture[x] += p[x] / v_count;
  }
  for (int x = 0; x < alg.num_inputs; ++x) {
    if (std::fabs(mixture[x] - uniform[x]) > kMassTolerance) {
      return absl::InvalidArgumentError("family mixture is not uniform");
    }
  }
  // laws(i, v): the first i elements uniform, the rest from member v.
  auto laws = [&](int i, size_t v) {
    std::vector<std::vector<double>> out(n, family[v]);
    for (int j = 0; j < i; ++j) out[j] = uniform;
    return out;
  };
  std::vector<std::vector<double>> q(n + 1);
  for (int i = 0; i <= n; ++i) {
    q[i].assign(alg.num_outputs, 0.0);
    for (size_t v = 0; v < v_count; ++v) {
      absl::StatusOr<std::vector<double>> out = ExactOutputLaw(alg, laws(i, v));
      if (!out.ok()) return out.status();
      for (int o = 0; o < alg.num_outputs; ++o) {
        q[i][o] += (*out)[o] / v_count;
      }
    }
  }
  HybridReport report;
  report.total_tv = TvDistance(q[0], q[n]);
  report.min_slack = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= n; ++i) {
    HybridStep step;
    step.i = i;
    step.tv = TvDistance(q[i - 1], q[i]);
    std::vector<double> joint;
    joint.reserve(v_count * alg.num_states);
    for (size_t v = 0; v < v_count; ++v) {
      absl::StatusOr<std::vector<double>> s =
          ExactStateLaw(alg, laws(i - 1, v), i);
      if (!s.ok()) return s.status();
      for (double p : *s) joint.push_back(p / v_count);
    }
    absl::StatusOr<JointDistribution> sv =
        JointDistribution::Create(v_count, alg.num_states, std::move(joint));
    if (!sv.ok()) return sv.status();
    step.mutual_information = MutualInformation(*sv);
    step.bound = std::sqrt(0.5 * step.mutual_information);
    report.sum_tv += step.tv;
    report.sum_bound += step.bound;
    report.min_slack = std::min(report.min_slack, step.slack());
    report.steps.push_back(step);
  }
  report.holds = report.min_slack >= -1e-10 &&
                 report.sum_tv >= report.total_tv - 1e-12 &&
                 report.sum_bound >= report.total_tv - 1e-10;
  return report;
}

}  // namespace shufflepan
