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

#ifndef SHUFFLEPAN_PAN_H_
#define SHUFFLEPAN_PAN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_format.h"
#include "shufflepan/random.h"

namespace shufflepan {

// Online algorithm M = (M_1, M_2, ..., M_Out) with an explicit initial state.
// `update` receives the 1-based position of the element.
template <typename Input, typename State, typename Output>
struct OnlineAlgorithm {
  std::function<State(Rng&)> init;
  std::function<State(int step, const Input& x, const State& s, Rng& rng)>
      update;
  std::function<Output(const State&, Rng&)> output;
};

// What a single intrusion at time t reveals, plus the final output of the
// same execution.
template <typename State, typename Output>
struct AdversaryView {
  int t = 0;
  State state;
  Output output;
};

template <typename Input, typename State, typename Output>
absl::StatusOr<AdversaryView<State, Output>> RunPan(
    const OnlineAlgorithm<Input, State, Output>& alg,
    std::span<const Input> stream, int t, uint64_t seed) {
  if (t < 1 || t > static_cast<int>(stream.size())) {
    return absl::OutOfRangeError(absl::StrFormat(
        "intrusion time %d outside [1, %d]", t, stream.size()));
  }
  Rng rng(seed);
  State s = alg.init(rng);
  AdversaryView<State, Output> view;
  view.t = t;
  for (size_t i = 0; i < stream.size(); ++i) {
    s = alg.update(static_cast<int>(i + 1), stream[i], s, rng);
    if (static_cast<int>(i + 1) == t) view.state = s;
  }
  view.output = alg.output(s, rng);
  return view;
}

// Sparse pmf: (value, probability) pairs.
using SparseLaw = std::vector<std::pair<int, double>>;

// Pan-private algorithm with finite input, state and output spaces, given by
// its kernels. Used by the exact engine.
struct FinitePanAlgorithm {
  int num_inputs = 0;
  int num_states = 0;
  int num_outputs = 0;
  SparseLaw initial;
  std::function<SparseLaw(int step, int x, int s)> update;
  std::function<SparseLaw(int s)> output;
};

// Sampling adapter for RunPan.
OnlineAlgorithm<int, int, int> AsOnline(const FinitePanAlgorithm& alg);

// Point-mass input laws for a fixed stream.
std::vector<std::vector<double>> PointLaws(std::span<const int> stream,
                                           int num_inputs);

// Law of S_t (dense over states) when element i has law input_laws[i-1].
// t = 0 gives the initial law.
absl::StatusOr<std::vector<double>> ExactStateLaw(
    const FinitePanAlgorithm& alg,
    std::span<const std::vector<double>> input_laws, int t);

// Law of the final output (dense over outputs).
absl::StatusOr<std::vector<double>> ExactOutputLaw(
    const FinitePanAlgorithm& alg,
    std::span<const std::vector<double>> input_laws);

// Law of the final output given S_t = s, sorted by output.
absl::StatusOr<SparseLaw> ContinuationOutputLaw(
    const FinitePanAlgorithm& alg,
    std::span<const std::vector<double>> input_laws, int t, int s);

// Laplace noise on the grid step * Z, truncated to [-range, range] and
// renormalized.
struct QuantizedLaplace {
  double scale = 0;
  double step = 0;
  int half_width = 0;
  // pmf[k + half_width] is the mass at k * step.
  std::vector<double> pmf;
  // Continuous Laplace mass outside [-range, range].
  double truncated_mass = 0;

  // Defaults: step 1/64 and range 64 * scale.
  static absl::StatusOr<QuantizedLaplace> Create(double scale,
                                                 double step = 1.0 / 64,
                                                 double range_scales = 64);
  // Mass of the `shift` outermost grid points on one side, which is the
  // hockey-stick excess a shift by that many points can produce.
  double EdgeMass(int shift) const;
};

// Counter over binary inputs: S_0 = noise, S_i = S_{i-1} + x_i, output
// S_n + fresh noise, both noises quantized Laplace(1/eps). States and outputs
// are grid indices; every intrusion view is (eps, slack)-private.
struct QuantizedCounter {
  FinitePanAlgorithm alg;
  QuantizedLaplace noise;
  // Grid value of a state or output index.
  double StateValue(int s) const;
  double OutputValue(int o) const;
  // Privacy slack from truncation at the configured eps.
  double slack() const;
};
absl::StatusOr<QuantizedCounter> MakeQuantizedCounter(int n, double epsilon);

// Running sum of randomized-response bits; output is the final sum.
absl::StatusOr<FinitePanAlgorithm> MakeRandomizedResponseChain(int n,
                                                               double flip);
// Two-state chain: S_i = S_{i-1} xor RR(x_i), output S_n.
absl::StatusOr<FinitePanAlgorithm> MakeParityChain(double flip);
// Ignores its input.
FinitePanAlgorithm MakeConstantAlgorithm(int num_inputs);

struct HybridStep {
  int i = 0;
  double tv = 0;                  // dtv(Q_{i-1}, Q_i)
  double mutual_information = 0;  // I(S_i; V) in the Q_{i-1} world
  double bound = 0;               // sqrt(I / 2)
  double slack() const { return bound - tv; }
};

struct HybridReport {
  std::vector<HybridStep> steps;
  double total_tv = 0;  // dtv(Q_0, Q_n)
  double sum_tv = 0;
  double sum_bound = 0;
  double min_slack = 0;
  bool holds = false;
};

// Q_i is the output law with the first i elements from the uniform input law
// and the rest from a uniformly chosen family member. The family's mixture
// must be uniform.
absl::StatusOr<HybridReport> HybridTvCertificate(
    const FinitePanAlgorithm& alg,
    std::span<const std::vector<double>> family, int n);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_PAN_H_
