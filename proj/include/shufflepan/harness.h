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

// Experiment orchestration: JSON specs, seeded sweeps, scaling fits and
// artifact manifests.
//
// Seeding: trial t of experiment e under master seed s uses
// TrialSeed(s, e, t) = SplitMix64(s ^ SplitMix64(e ^ SplitMix64(t))).
// Results are gathered per trial index, so outputs do not depend on the
// thread count.

#ifndef SHUFFLEPAN_HARNESS_H_
#define SHUFFLEPAN_HARNESS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "shufflepan/baselines.h"
#include "shufflepan/bit_vector.h"
#include "shufflepan/hard_family.h"
#include "shufflepan/stats.h"

namespace shufflepan {

inline constexpr char kVersion[] = "1.0.0";

std::string Sha256Hex(std::string_view data);
absl::StatusOr<std::string> FileSha256(const std::string& path);

enum class ExperimentKind {
  kAudit,
  kNorm,
  kReductionCheck,
  kDistinguish,
  kSweep,
};

std::string ExperimentKindName(ExperimentKind kind);
absl::StatusOr<ExperimentKind> ParseExperimentKind(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kSweep;
  nlohmann::json params = nlohmann::json::object();
  int64_t trials = 1;
  uint64_t seed = 0;
  std::string out;  // output directory
  int threads = 1;

  // Required: kind, out. Defaults: params {}, trials 1, seed 0, threads 1.
  static absl::StatusOr<ExperimentSpec> FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
  // SHA-256 of the fields that determine the data (kind, params, trials,
  // seed); out and threads are excluded.
  std::string Hash() const;
};

struct Artifact {
  std::string name;
  std::string sha256;
};

struct RunReport {
  std::vector<Artifact> files;  // data files, manifest excluded
  std::vector<std::string> failed_assertions;
  nlohmann::json summary;
  bool passed() const { return failed_assertions.empty(); }
};

// Executes the experiment and writes its data files and manifest.json into
// spec.out. Identical specs produce byte-identical data files.
absl::StatusOr<RunReport> RunSpec(const ExperimentSpec& spec);

// Sweep of n*(d): the smallest cohort whose success rate reaches `target`.
struct SweepConfig {
  Problem problem = Problem::kSelection;
  Model model = Model::kPan;
  std::vector<int> d_values;
  int k = 1;
  double alpha = 0.2;
  Budget budget{1.0, 1e-6};
  int64_t trials = 1000;
  double target = 0.99;
  // Bisection stops when hi - lo <= max(1, precision * lo).
  double precision = 0.02;
  int64_t n_max = int64_t{1} << 34;
  // Corridor check at n* / divisor.
  int64_t corridor_divisor = 8;
  double corridor_ceiling = 0.9;
  int max_confirmations = 8;

  static absl::StatusOr<SweepConfig> FromJson(const nlohmann::json& j);
  nlohmann::json ToJson() const;
};

struct SweepCell {
  std::string phase;  // pilot, confirm or corridor
  int d = 0;
  int64_t n = 0;
  int64_t trials = 0;
  int64_t successes = 0;
  bool feasible = true;
  double rate() const {
    return trials > 0 ? static_cast<double>(successes) / trials : 0.0;
  }
  Interval ci() const;
};

struct SweepPoint {
  int d = 0;
  int64_t n_star = 0;
  bool confirmed = false;
  SweepCell confirmation;
  SweepCell corridor;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepPoint> points;
  std::optional<LinearFit> fit;  // present with >= 4 points
};

// The member used for problem `problem` at dimension d: the planted
// coordinate or parity sits at the highest indices, sign +1.
absl::StatusOr<ProblemInstance> CanonicalInstance(Problem problem, int d, int k,
                                                  double alpha);

// Success count of `trials` runs; trial t uses TrialSeed(seed, experiment, t).
absl::StatusOr<SweepCell> EvaluateCell(const ProblemInstance& instance,
                                       Model model, int64_t n, Budget budget,
                                       int64_t trials, uint64_t seed,
                                       uint64_t experiment, int threads);

// Pilot doubling then bisection on common seeds (pass: Wilson lower bound
// >= target), confirmation at fresh seeds (pass: rate >= target, otherwise
// n grows by the precision step), then the corridor cell.
absl::StatusOr<SweepResult> RunSweep(const SweepConfig& config, uint64_t seed,
                                     int threads);

// Least squares of log n* on log d. Needs >= 4 points.
absl::StatusOr<LinearFit> FitScaling(std::span<const double> d,
                                     std::span<const double> n_star);
absl::StatusOr<LinearFit> FitScaling(const SweepResult& result);

// problem,model,d,k,alpha,eps,delta,n,success_rate,ci_low,ci_high,seed
std::string SweepCsv(const SweepConfig& config, const SweepResult& result,
                     uint64_t seed);

// Z draws of the learner-to-distinguisher construction around a planted
// learner; draw i uses TrialSeed(seed, 0, i).
absl::StatusOr<std::vector<double>> PlantedDistinguisherDraws(
    const DistributionHandle& world, const ParityIndex& planted, int d, int n,
    double alpha, double epsilon, int64_t count, uint64_t seed, int threads);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_HARNESS_H_
