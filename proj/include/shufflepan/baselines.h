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

// Statistical-query baselines in the shuffle and pan-private models, and
// solvers for selection, sparse mean estimation, parity release, simple
// hypothesis testing and parity learning built on them.

#ifndef SHUFFLEPAN_BASELINES_H_
#define SHUFFLEPAN_BASELINES_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "shufflepan/bit_vector.h"
#include "shufflepan/hard_family.h"
#include "shufflepan/pan.h"
#include "shufflepan/random.h"
#include "shufflepan/shuffle.h"

namespace shufflepan {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Cohorts up to this size are calibrated by exact audit.
inline constexpr int kMaxExactCalibrationCohort = 12;

enum class CalibrationPath {
  kNoPrivacy,   // epsilon = +inf, flip = 0
  kExactAudit,  // binary search on the exact worst-case audit
  kClosedForm,  // min(closed form, exact flip at the largest audited cohort)
};

std::string CalibrationPathName(CalibrationPath path);

// Shuffled binary randomized response over a cohort of n users.
struct CalibratedRRSum {
  int64_t n = 0;
  double epsilon = 0;
  double delta = 0;
  double flip = 0;
  CalibrationPath path = CalibrationPath::kNoPrivacy;
  double audited_delta = std::numeric_limits<double>::quiet_NaN();

  // Estimated number of ones is scale() * report_sum + offset().
  // Undefined at flip = 1/2.
  double scale() const { return 1.0 / (1.0 - 2.0 * flip); }
  double offset() const { return -static_cast<double>(n) * flip * scale(); }
  double DebiasSum(double report_sum) const {
    return scale() * report_sum + offset();
  }
  bool estimable() const { return flip < 0.5; }
};

// min(1/2, 14 ln(4 / delta) / (eps^2 (n - 1))).
double ClosedFormFlip(int64_t n, double epsilon, double delta);

// Exact worst-case delta(eps) of shuffled RR with the given flip, over all
// neighbouring binary datasets of size n.
absl::StatusOr<double> AuditedRRDelta(int n, double flip, double epsilon);

// Smallest flip p in (0, 1/2] meeting (epsilon, delta). Errors when n < 2.
absl::StatusOr<CalibratedRRSum> CalibrateRR(int64_t n, double epsilon,
                                            double delta);

// Per-query budget for `queries` queries under total (epsilon, delta).
struct CompositionSplit {
  int queries = 1;
  double factor = 1;   // epsilon per query = epsilon / factor
  double epsilon = 0;  // per query
  double delta = 0;    // per query
};

// One query: no split. Otherwise the advanced-composition rule
// factor = sqrt(8 D ln(2 / delta)) with per-query delta = delta / (2D); with
// delta = 0, basic composition (factor = D).
CompositionSplit SplitBudget(int queries, double epsilon, double delta);

// Debiased coordinate means of a +-1 dataset; one shuffled RR sum per
// coordinate.
absl::StatusOr<std::vector<double>> ShuffleMeanVector(
    std::span<const BitVector> dataset, double epsilon, double delta,
    uint64_t seed);

// Same estimator from the per-feature counts of +1, using the exact law of
// the report sum: Bin(c, 1 - p) + Bin(n - c, p).
absl::StatusOr<std::vector<double>> ShuffleMeansFromCounts(
    std::span<const int64_t> plus_counts, int64_t n,
    const CalibratedRRSum& sum, Rng& rng);

// Row to +-1 feature vector.
using FeatureMap = std::function<std::vector<int>(const BitVector&)>;

FeatureMap CoordinateFeatures();
// chi_ell(x) for each subset, in order.
FeatureMap ParityFeatures(std::vector<std::vector<int>> subsets);
// chi_ell(x) * x_{d+1} for each subset, in order.
FeatureMap LabelledParityFeatures(std::vector<std::vector<int>> subsets,
                                  int d);

// Pan-private noisy sums. The state is the vector of running sums,
// initialized with Laplace(noise_scale) noise; the output adds fresh
// Laplace(noise_scale) noise and divides by the stream length.
class PanNoisyAccumulator {
 public:
  // noise_scale = Delta / (eps / 2), Delta = 2 * SplitBudget(features).factor.
  static absl::StatusOr<PanNoisyAccumulator> Create(int features,
                                                    FeatureMap map,
                                                    int64_t stream_length,
                                                    double epsilon,
                                                    double delta);

  int features() const { return features_; }
  int64_t stream_length() const { return stream_length_; }
  double noise_scale() const { return noise_scale_; }

  std::vector<double> Init(Rng& rng) const;
  // Throws std::invalid_argument on a feature vector of the wrong size.
  std::vector<double> Update(const BitVector& x,
                             const std::vector<double>& state) const;
  std::vector<double> Output(const std::vector<double>& state, Rng& rng) const;

  OnlineAlgorithm<BitVector, std::vector<double>, std::vector<double>>
  AsOnline() const;

 private:
  PanNoisyAccumulator(int features, FeatureMap map, int64_t stream_length,
                      double noise_scale)
      : features_(features),
        map_(std::move(map)),
        stream_length_(stream_length),
        noise_scale_(noise_scale) {}

  int features_;
  FeatureMap map_;
  int64_t stream_length_;
  double noise_scale_;
};

// Runs the accumulator over the whole stream, whose length must match the
// accumulator's. An empty stream yields the two noise draws unnormalized.
absl::StatusOr<std::vector<double>> PanMeanVector(
    std::span<const BitVector> stream, const PanNoisyAccumulator& accumulator,
    uint64_t seed);

// Same estimator from per-feature counts of +1.
std::vector<double> PanMeansFromCounts(std::span<const int64_t> plus_counts,
                                       int64_t n, double noise_scale,
                                       Rng& rng);

enum class Problem {
  kSelection,
  kSparseMean,
  kParityRelease,
  kHypothesisTest,
  kParityLearning,
};

enum class Model { kShuffle, kPan };

std::string ProblemName(Problem problem);
absl::StatusOr<Problem> ParseProblem(const std::string& name);
std::string ModelName(Model model);
absl::StatusOr<Model> ParseModel(const std::string& name);

// A problem together with the data law used to score answers.
//
// Selection, sparse-mean and hypothesis-test data are products of
// Rademacher(means[j]). Parity release uses a P-family member, parity
// learning a Q-family member.
struct ProblemInstance {
  Problem problem = Problem::kSelection;
  int d = 1;
  int k = 1;
  double alpha = 0.1;
  std::vector<double> means;
  std::optional<HardDistribution> member;

  static absl::StatusOr<ProblemInstance> Selection(std::vector<double> means,
                                                   double alpha);
  // means must be k-sparse.
  static absl::StatusOr<ProblemInstance> SparseMean(std::vector<double> means,
                                                    int k, double alpha);
  // Truth is U (coordinate = 0) or P_{d,{coordinate},sign,alpha}.
  static absl::StatusOr<ProblemInstance> HypothesisTest(int d, double alpha,
                                                        int coordinate,
                                                        int sign);
  static absl::StatusOr<ProblemInstance> ParityRelease(
      int k, const HardDistribution& member);
  static absl::StatusOr<ProblemInstance> ParityLearning(
      int k, const HardDistribution& member);

  // Number of released statistics.
  int num_features() const;
  FeatureMap features() const;
  // Exact expectation of every feature under the data law.
  std::vector<double> FeatureMeans() const;
  // Feature subsets for the parity problems (one-based), else empty.
  std::vector<std::vector<int>> FeatureSubsets() const;
  // Candidates are U, then P_{d,{j},+1}, P_{d,{j},-1} for j = 1..d.
  int HypothesisTruth() const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<ProblemInstance> FromJson(const nlohmann::json& j);
};

// Random small instance of the given problem, for oracle comparisons.
ProblemInstance RandomInstance(Problem problem, Rng& rng);

struct Answer {
  // Selection: one-based coordinate. Hypothesis test: candidate index.
  // Parity learning: index into FeatureSubsets().
  int index = -1;
  int sign = 0;                // parity learning
  std::vector<double> values;  // sparse mean, parity release
  friend bool operator==(const Answer& a, const Answer& b) {
    return a.index == b.index && a.sign == b.sign && a.values == b.values;
  }
};

// Decodes estimated feature means into an answer. Ties go to the lowest
// index.
Answer DecodeAnswer(const ProblemInstance& instance,
                    std::span<const double> estimates);

bool ScoreAnswer(const ProblemInstance& instance, const Answer& answer);

// err_P(L, B) = Pr[B chi_L(x) != x_{d+1}] for the parity-learning member.
double ParityError(const ProblemInstance& instance, int feature, int sign);

struct Budget {
  double epsilon = kInfinity;
  double delta = 0;
};

struct SolveResult {
  Answer answer;
  bool correct = false;
};

// Draws n samples from the instance and counts +1 per feature. Product laws
// use per-feature binomials; parity members are sampled row by row.
std::vector<int64_t> DrawFeatureCounts(const ProblemInstance& instance,
                                       int64_t n, Rng& rng);

class Solver {
 public:
  // Calibrates once per cohort. Shuffle-model cohorts too small for the
  // budget fail with FailedPrecondition ("insufficient cohort").
  static absl::StatusOr<Solver> Create(ProblemInstance instance, Model model,
                                       int64_t n, Budget budget);

  const ProblemInstance& instance() const { return instance_; }
  Model model() const { return model_; }
  int64_t n() const { return n_; }
  const Budget& budget() const { return budget_; }
  const CompositionSplit& split() const { return split_; }
  // Shuffle model only.
  const std::optional<CalibratedRRSum>& calibration() const {
    return calibration_;
  }
  // Pan model only.
  double noise_scale() const { return noise_scale_; }

  // Data comes from stream SplitMix64(seed ^ 1), noise from
  // SplitMix64(seed ^ 2).
  SolveResult Run(uint64_t seed) const;
  std::vector<double> Privatize(std::span<const int64_t> counts,
                                Rng& noise) const;

 private:
  Solver(ProblemInstance instance, Model model, int64_t n, Budget budget)
      : instance_(std::move(instance)),
        model_(model),
        n_(n),
        budget_(budget) {}

  ProblemInstance instance_;
  Model model_;
  int64_t n_;
  Budget budget_;
  CompositionSplit split_;
  std::optional<CalibratedRRSum> calibration_;
  double noise_scale_ = 0;
};

// Noiseless empirical-mean solver on the same data draw as Solver::Run.
SolveResult PlugInSolve(const ProblemInstance& instance, int64_t n,
                        uint64_t seed);

}  // namespace shufflepan

#endif  // SHUFFLEPAN_BASELINES_H_
