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

#include "shufflepan/baselines.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/synchronization/mutex.h"
#include "shufflepan/audit.h"

namespace shufflepan {
namespace {

constexpr int kCalibrationIterations = 60;
constexpr double kScoreTolerance = 1e-12;

// (2c - n) / n. Every estimator funnels through this so that the
// noiseless paths agree bit for bit with the plug-in solver.
double CountToMean(double plus_count, int64_t n) {
  const double nd = static_cast<double>(n);
  return (2.0 * plus_count - nd) / nd;
}

absl::Status CheckBudget(double epsilon, double delta) {
  if (!(epsilon > 0)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  if (!(delta >= 0 && delta < 1)) {
    return absl::InvalidArgumentError("delta must lie in [0, 1)");
  }
  return absl::OkStatus();
}

absl::StatusOr<CalibratedRRSum> SearchExact(int n, double epsilon,
                                            double delta) {
  double lo = 0;
  double hi = 0.5;
  for (int it = 0; it < kCalibrationIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    absl::StatusOr<double> d = AuditedRRDelta(n, mid, epsilon);
    if (!d.ok()) return d.status();
    if (*d <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  absl::StatusOr<double> audited = AuditedRRDelta(n, hi, epsilon);
  if (!audited.ok()) return audited.status();
  CalibratedRRSum sum;
  sum.n = n;
  sum.epsilon = epsilon;
  sum.delta = delta;
  sum.flip = hi;
  sum.path = CalibrationPath::kExactAudit;
  sum.audited_delta = *audited;
  return sum;
}

// Sweeps recalibrate the same cohort many times; the search is memoized.
absl::StatusOr<CalibratedRRSum> CalibrateExact(int n, double epsilon,
                                               double delta) {
  static absl::Mutex mu(absl::kConstInit);
  static auto* cache =
      new std::map<std::tuple<int, double, double>, CalibratedRRSum>();
  const auto key = std::make_tuple(n, epsilon, delta);
  {
    absl::MutexLock lock(&mu);
    if (auto it = cache->find(key); it != cache->end()) return it->second;
  }
  absl::StatusOr<CalibratedRRSum> sum = SearchExact(n, epsilon, delta);
  if (!sum.ok()) return sum.status();
  absl::MutexLock lock(&mu);
  cache->emplace(key, *sum);
  return sum;
}

bool IsProductProblem(Problem p) {
  return p == Problem::kSelection || p == Problem::kSparseMean ||
         p == Problem::kHypothesisTest;
}

int ArgMaxFirst(std::span<const double> v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

std::string CalibrationPathName(CalibrationPath path) {
  switch (path) {
    case CalibrationPath::kNoPrivacy:
      return "none";
    case CalibrationPath::kExactAudit:
      return "exact-audit";
    case CalibrationPath::kClosedForm:
      return "closed-form";
  }
  return "unknown";
}

double ClosedFormFlip(int64_t n, double epsilon, double delta) {
  if (std::isinf(epsilon)) return 0;
  if (n < 2 || delta <= 0) return 0.5;
  const double p = 14.0 * std::log(4.0 / delta) /
                   (epsilon * epsilon * static_cast<double>(n - 1));
  return std::min(0.5, p);
}

absl::StatusOr<double> AuditedRRDelta(int n, double flip, double epsilon) {
  absl::StatusOr<Randomizer> rr = Randomizer::BinaryRandomizedResponse(flip);
  if (!rr.ok()) return rr.status();
  const double eps[] = {epsilon};
  absl::StatusOr<AuditCurve> curve = AuditShuffleWorstCase(*rr, n, eps);
  if (!curve.ok()) return curve.status();
  return curve->front().delta_max();
}

absl::StatusOr<CalibratedRRSum> CalibrateRR(int64_t n, double epsilon,
                                            double delta) {
  if (n < 2) return absl::InvalidArgumentError("cohort needs n >= 2");
  if (absl::Status s = CheckBudget(epsilon, delta); !s.ok()) return s;
  if (std::isinf(epsilon)) {
    CalibratedRRSum sum;
    sum.n = n;
    sum.epsilon = epsilon;
    sum.delta = delta;
    return sum;
  }
  if (n <= kMaxExactCalibrationCohort) {
    return CalibrateExact(static_cast<int>(n), epsilon, delta);
  }
  // Adding users is post-processing of a smaller cohort's view, so the
  // largest audited flip stays valid for every n beyond it.
  absl::StatusOr<CalibratedRRSum> anchor =
      CalibrateExact(kMaxExactCalibrationCohort, epsilon, delta);
  if (!anchor.ok()) return anchor.status();
  CalibratedRRSum sum;
  sum.n = n;
  sum.epsilon = epsilon;
  sum.delta = delta;
  sum.flip = std::min(ClosedFormFlip(n, epsilon, delta), anchor->flip);
  sum.path = CalibrationPath::kClosedForm;
  return sum;
}

CompositionSplit SplitBudget(int queries, double epsilon, double delta) {
  CompositionSplit split;
  split.queries = queries;
  if (queries <= 1) {
    split.epsilon = epsilon;
    split.delta = delta;
    return split;
  }
  if (delta > 0) {
    split.factor = std::sqrt(8.0 * queries * std::log(2.0 / delta));
    split.delta = delta / (2.0 * queries);
  } else {
    split.factor = queries;
    split.delta = 0;
  }
  split.epsilon = epsilon / split.factor;
  return split;
}

absl::StatusOr<std::vector<double>> ShuffleMeanVector(
    std::span<const BitVector> dataset, double epsilon, double delta,
    uint64_t seed) {
  if (dataset.empty()) return absl::InvalidArgumentError("empty dataset");
  const int d = dataset.front().dimension();
  const int64_t n = static_cast<int64_t>(dataset.size());
  const CompositionSplit split = SplitBudget(d, epsilon, delta);
  absl::StatusOr<CalibratedRRSum> sum =
      CalibrateRR(n, split.epsilon, split.delta);
  if (!sum.ok()) return sum.status();
  if (!sum->estimable()) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "insufficient cohort: n=%d needs flip 1/2 at eps'=%g", n,
        split.epsilon));
  }
  absl::StatusOr<Randomizer> rr =
      Randomizer::BinaryRandomizedResponse(sum->flip);
  if (!rr.ok()) return rr.status();
  ShuffleProtocol protocol{*rr, SumAnalyzer(), static_cast<int>(n)};
  std::vector<double> means(d);
  std::vector<int> bits(n);
  for (int j = 0; j < d; ++j) {
    for (int64_t i = 0; i < n; ++i) {
      if (dataset[i].dimension() != d) {
        return absl::InvalidArgumentError("rows differ in dimension");
      }
      bits[i] = dataset[i][j] > 0 ? 1 : 0;
    }
    absl::StatusOr<ShuffleRun> run =
        RunShuffle(protocol, bits, 0.0, TrialSeed(seed, 0, j));
    if (!run.ok()) return run.status();
    means[j] = CountToMean(sum->DebiasSum(run->counts[1]), n);
  }
  return means;
}

absl::StatusOr<std::vector<double>> ShuffleMeansFromCounts(
    std::span<const int64_t> plus_counts, int64_t n,
    const CalibratedRRSum& sum, Rng& rng) {
  if (!sum.estimable()) {
    return absl::FailedPreconditionError("insufficient cohort");
  }
  std::vector<double> means(plus_counts.size());
  for (size_t j = 0; j < plus_counts.size(); ++j) {
    const int64_t c = plus_counts[j];
    if (c < 0 || c > n) return absl::InvalidArgumentError("count outside [0, n]");
    const int64_t reports =
        rng.Binomial(c, 1.0 - sum.flip) + rng.Binomial(n - c, sum.flip);
    means[j] = CountToMean(sum.DebiasSum(static_cast<double>(reports)), n);
  }
  return means;
}

FeatureMap CoordinateFeatures() {
  return [](const BitVector& x) {
    return std::vector<int>(x.entries().begin(), x.entries().end());
  };
}

FeatureMap ParityFeatures(std::vector<std::vector<int>> subsets) {
  return [subsets = std::move(subsets)](const BitVector& x) {
    std::vector<int> f;
    f.reserve(subsets.size());
    for (const auto& s : subsets) f.push_back(x.Parity(s));
    return f;
  };
}

FeatureMap LabelledParityFeatures(std::vector<std::vector<int>> subsets,
                                  int d) {
  return [subsets = std::move(subsets), d](const BitVector& x) {
    std::vector<int> f;
    f.reserve(subsets.size());
    for (const auto& s : subsets) f.push_back(x.Parity(s) * x[d]);
    return f;
  };
}

absl::StatusOr<PanNoisyAccumulator> PanNoisyAccumulator::Create(
    int features, FeatureMap map, int64_t stream_length, double epsilon,
    double delta) {
  if (features < 1) return absl::InvalidArgumentError("need a feature");
  if (stream_length < 0) {
    return absl::InvalidArgumentError("negative stream length");
  }
  if (absl::Status s = CheckBudget(epsilon, delta); !s.ok()) return s;
  const double sensitivity =
      2.0 * SplitBudget(features, epsilon, delta).factor;
  const double scale =
      std::isinf(epsilon) ? 0.0 : sensitivity / (epsilon / 2.0);
  return PanNoisyAccumulator(features, std::move(map), stream_length, scale);
}

std::vector<double> PanNoisyAccumulator::Init(Rng& rng) const {
  std::vector<double> state(features_);
  for (double& v : state) v = rng.Laplace(noise_scale_);
  return state;
}

std::vector<double> PanNoisyAccumulator::Update(
    const BitVector& x, const std::vector<double>& state) const {
  const std::vector<int> f = map_(x);
  if (static_cast<int>(f.size()) != features_) {
    throw std::invalid_argument("feature map returned the wrong size");
  }
  std::vector<double> next = state;
  for (int i = 0; i < features_; ++i) next[i] += f[i];
  return next;
}

std::vector<double> PanNoisyAccumulator::Output(
    const std::vector<double>& state, Rng& rng) const {
  const double denominator =
      stream_length_ > 0 ? static_cast<double>(stream_length_) : 1.0;
  std::vector<double> out(features_);
  for (int i = 0; i < features_; ++i) {
    out[i] = (state[i] + rng.Laplace(noise_scale_)) / denominator;
  }
  return out;
}

OnlineAlgorithm<BitVector, std::vector<double>, std::vector<double>>
PanNoisyAccumulator::AsOnline() const {
  OnlineAlgorithm<BitVector, std::vector<double>, std::vector<double>> alg;
  const PanNoisyAccumulator self = *this;
  alg.init = [self](Rng& rng) { return self.Init(rng); };
  alg.update = [self](int, const BitVector& x, const std::vector<double>& s,
                      Rng&) { return self.Update(x, s); };
  alg.output = [self](const std::vector<double>& s, Rng& rng) {
    return self.Output(s, rng);
  };
  return alg;
}

absl::StatusOr<std::vector<double>> PanMeanVector(
    std::span<const BitVector> stream, const PanNoisyAccumulator& accumulator,
    uint64_t seed) {
  if (static_cast<int64_t>(stream.size()) != accumulator.stream_length()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "stream has %d elements, accumulator expects %d", stream.size(),
        accumulator.stream_length()));
  }
  Rng rng(seed);
  std::vector<double> state = accumulator.Init(rng);
  try {
    for (const BitVector& x : stream) state = accumulator.Update(x, state);
  } catch (const std::invalid_argument& e) {
    return absl::InvalidArgumentError(e.what());
  }
  return accumulator.Output(state, rng);
}

std::vector<double> PanMeansFromCounts(std::span<const int64_t> plus_counts,
                                       int64_t n, double noise_scale,
                                       Rng& rng) {
  const double denominator = n > 0 ? static_cast<double>(n) : 1.0;
  std::vector<double> means(plus_counts.size());
  for (size_t j = 0; j < plus_counts.size(); ++j) {
    const double init = rng.Laplace(noise_scale);
    const double sum = 2.0 * plus_counts[j] - static_cast<double>(n);
    means[j] = (init + sum + rng.Laplace(noise_scale)) / denominator;
  }
  return means;
}

std::string ProblemName(Problem problem) {
  switch (problem) {
    case Problem::kSelection:
      return "selection";
    case Problem::kSparseMean:
      return "sparse-mean";
    case Problem::kParityRelease:
      return "parity-release";
    case Problem::kHypothesisTest:
      return "hypothesis-test";
    case Problem::kParityLearning:
      return "parity-learning";
  }
  return "unknown";
}

absl::StatusOr<Problem> ParseProblem(const std::string& name) {
  for (Problem p : {Problem::kSelection, Problem::kSparseMean,
                    Problem::kParityRelease, Problem::kHypothesisTest,
                    Problem::kParityLearning}) {
    if (ProblemName(p) == name) return p;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown problem: ", name));
}

std::string ModelName(Model model) {
  return model == Model::kShuffle ? "shuffle" : "pan";
}

absl::StatusOr<Model> ParseModel(const std::string& name) {
  if (name == "shuffle") return Model::kShuffle;
  if (name == "pan") return Model::kPan;
  return absl::InvalidArgumentError(absl::StrCat("unknown model: ", name));
}

absl::StatusOr<ProblemInstance> ProblemInstance::Selection(
    std::vector<double> means, double alpha) {
  const int d = static_cast<int>(means.size());
  absl::StatusOr<ProblemInstance> p = SparseMean(std::move(means), d, alpha);
  if (!p.ok()) return p.status();
  p->problem = Problem::kSelection;
  p->k = 1;
  return p;
}

absl::StatusOr<ProblemInstance> ProblemInstance::SparseMean(
    std::vector<double> means, int k, double alpha) {
  const int d = static_cast<int>(means.size());
  if (d < 1) return absl::InvalidArgumentError("need d >= 1");
  if (k < 1 || k > d) return absl::InvalidArgumentError("need 1 <= k <= d");
  if (!(alpha > 0 && alpha <= 1)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1]");
  }
  int support = 0;
  for (double m : means) {
    if (!(std::fabs(m) <= 1)) {
      return absl::InvalidArgumentError("coordinate mean outside [-1, 1]");
    }
    support += m != 0;
  }
  if (support > k) return absl::InvalidArgumentError("means are not k-sparse");
  ProblemInstance p;
  p.problem = Problem::kSparseMean;
  p.d = d;
  p.k = k;
  p.alpha = alpha;
  p.means = std::move(means);
  return p;
}

absl::StatusOr<ProblemInstance> ProblemInstance::HypothesisTest(
    int d, double alpha, int coordinate, int sign) {
  if (d < 1) return absl::InvalidArgumentError("need d >= 1");
  if (!(alpha > 0 && alpha <= 0.5)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1/2]");
  }
  if (coordinate < 0 || coordinate > d) {
    return absl::InvalidArgumentError("coordinate outside [0, d]");
  }
  if (sign != 1 && sign != -1) return absl::InvalidArgumentError("sign != +-1");
  ProblemInstance p;
  p.problem = Problem::kHypothesisTest;
  p.d = d;
  p.k = 1;
  p.alpha = alpha;
  p.means.assign(d, 0.0);
  if (coordinate > 0) p.means[coordinate - 1] = 2 * alpha * sign;
  return p;
}

absl::StatusOr<ProblemInstance> ProblemInstance::ParityRelease(
    int k, const HardDistribution& member) {
  if (member.tag() != FamilyTag::kParity) {
    return absl::InvalidArgumentError("parity release needs a P member");
  }
  const int width = static_cast<int>(member.index().subset.size());
  if (k < width || k > member.d()) {
    return absl::InvalidArgumentError("need |ell| <= k <= d");
  }
  ProblemInstance p;
  p.problem = Problem::kParityRelease;
  p.d = member.d();
  p.k = k;
  p.alpha = member.alpha();
  p.member = member;
  return p;
}

absl::StatusOr<ProblemInstance> ProblemInstance::ParityLearning(
    int k, const HardDistribution& member) {
  if (member.tag() != FamilyTag::kSignedParity) {
    return absl::InvalidArgumentError("parity learning needs a Q member");
  }
  const int width = static_cast<int>(member.index().subset.size());
  if (k < std::max(width, 1) || k > member.d()) {
    return absl::InvalidArgumentError("need |ell| <= k <= d, k >= 1");
  }
  ProblemInstance p;
  p.problem = Problem::kParityLearning;
  p.d = member.d();
  p.k = k;
  p.alpha = member.alpha();
  p.member = member;
  return p;
}

std::vector<std::vector<int>> ProblemInstance::FeatureSubsets() const {
  switch (problem) {
    case Problem::kParityRelease:
      return SubsetsBySize(d, 1, k);
    case Problem::kParityLearning:
      return SubsetsBySize(d, 0, k);
    default:
      return {};
  }
}

int ProblemInstance::num_features() const {
  if (IsProductProblem(problem)) return d;
  return static_cast<int>(FeatureSubsets().size());
}

FeatureMap ProblemInstance::features() const {
  switch (problem) {
    case Problem::kParityRelease:
      return ParityFeatures(FeatureSubsets());
    case Problem::kParityLearning:
      return LabelledParityFeatures(FeatureSubsets(), d);
    default:
      return CoordinateFeatures();
  }
}

std::vector<double> ProblemInstance::FeatureMeans() const {
  if (IsProductProblem(problem)) return means;
  const std::vector<std::vector<int>> subsets = FeatureSubsets();
  std::vector<double> out(subsets.size(), 0.0);
  for (size_t i = 0; i < subsets.size(); ++i) {
    if (subsets[i] == member->index().subset) {
      out[i] = 2 * member->alpha() * member->index().sign;
    }
  }
  return out;
}

int ProblemInstance::HypothesisTruth() const {
  for (int j = 0; j < d; ++j) {
    if (means[j] > 0) return 1 + 2 * j;
    if (means[j] < 0) return 2 + 2 * j;
  }
  return 0;
}

nlohmann::json ProblemInstance::ToJson() const {
  nlohmann::json j{{"problem", ProblemName(problem)},
                   {"d", d},
                   {"k", k},
                   {"alpha", alpha}};
  if (member.has_value()) {
    j["member"] = member->ToJson(k);
  } else {
    j["means"] = means;
  }
  if (problem == Problem::kHypothesisTest) {
    const int truth = HypothesisTruth();
    j["coordinate"] = truth == 0 ? 0 : (truth + 1) / 2;
    j["sign"] = truth % 2 == 0 && truth > 0 ? -1 : 1;
  }
  return j;
}

absl::StatusOr<ProblemInstance> ProblemInstance::FromJson(
    const nlohmann::json& j) {
  try {
    absl::StatusOr<Problem> problem =
        ParseProblem(j.at("problem").get<std::string>());
    if (!problem.ok()) return problem.status();
    switch (*problem) {
      case Problem::kSelection:
        return Selection(j.at("means").get<std::vector<double>>(),
                         j.at("alpha").get<double>());
      case Problem::kSparseMean:
        return SparseMean(j.at("means").get<std::vector<double>>(),
                          j.at("k").get<int>(), j.at("alpha").get<double>());
      case Problem::kHypothesisTest:
        return HypothesisTest(j.at("d").get<int>(), j.at("alpha").get<double>(),
                              j.at("coordinate").get<int>(),
                              j.value("sign", 1));
      case Problem::kParityRelease:
      case Problem::kParityLearning: {
        absl::StatusOr<HardDistribution> member =
            HardDistribution::FromJson(j.at("member"));
        if (!member.ok()) return member.status();
        return *problem == Problem::kParityRelease
                   ? ParityRelease(j.at("k").get<int>(), *member)
                   : ParityLearning(j.at("k").get<int>(), *member);
      }
    }
    return absl::InvalidArgumentError("unhandled problem");
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed instance descriptor: ", e.what()));
  }
}

ProblemInstance RandomInstance(Problem problem, Rng& rng) {
  static constexpr double kGrid[] = {-0.4, -0.2, 0.0, 0.2, 0.4};
  static constexpr double kAlphas[] = {0.1, 0.25};
  const int d = 2 + static_cast<int>(rng.UniformInt(4));  // 2..5
  const double alpha = kAlphas[rng.UniformInt(2)];
  auto grid_value = [&] { return kGrid[rng.UniformInt(5)]; };
  switch (problem) {
    case Problem::kSelection: {
      std::vector<double> means(d);
      for (double& m : means) m = grid_value();
      return *ProblemInstance::Selection(std::move(means), alpha);
    }
    case Problem::kSparseMean: {
      const int k = 1 + static_cast<int>(rng.UniformInt(d));
      std::vector<double> means(d, 0.0);
      for (int i = 0; i < k; ++i) means[rng.UniformInt(d)] = grid_value();
      return *ProblemInstance::SparseMean(std::move(means), k, alpha);
    }
    case Problem::kHypothesisTest:
      return *ProblemInstance::HypothesisTest(
          d, alpha, static_cast<int>(rng.UniformInt(d + 1)), rng.Sign());
    case Problem::kParityRelease:
    case Problem::kParityLearning: {
      const bool learning = problem == Problem::kParityLearning;
      const int k = 1 + static_cast<int>(rng.UniformInt(std::min(d, 3)));
      std::vector<std::vector<int>> subsets =
          SubsetsBySize(d, learning ? 0 : 1, k);
      std::vector<int> ell = subsets[rng.UniformInt(subsets.size())];
      const FamilyTag tag =
          learning ? FamilyTag::kSignedParity : FamilyTag::kParity;
      absl::StatusOr<ParityIndex> index =
          ParityIndex::Create(std::move(ell), rng.Sign(), d, learning);
      HardDistribution member =
          *HardDistribution::Create(tag, d, *index, alpha);
      return learning ? *ProblemInstance::ParityLearning(k, member)
                      : *ProblemInstance::ParityRelease(k, member);
    }
  }
  return ProblemInstance{};
}

Answer DecodeAnswer(const ProblemInstance& instance,
                    std::span<const double> estimates) {
  Answer a;
  switch (instance.problem) {
    case Problem::kSelection:
      a.index = ArgMaxFirst(estimates) + 1;
      break;
    case Problem::kSparseMean:
      a.values.reserve(estimates.size());
      for (double e : estimates) a.values.push_back(std::clamp(e, -1.0, 1.0));
      break;
    case Problem::kParityRelease:
      a.values.assign(estimates.begin(), estimates.end());
      break;
    case Problem::kHypothesisTest: {
      // Squared distance to each candidate's mean vector, minus the
      // distance to U: 4 alpha^2 - 4 alpha b e_j.
      const double alpha = instance.alpha;
      double best = 0;
      a.index = 0;
      for (int j = 0; j < instance.d; ++j) {
        for (int b : {1, -1}) {
          const double score = 4 * alpha * alpha - 4 * alpha * b * estimates[j];
          if (score < best) {
            best = score;
            a.index = 1 + 2 * j + (b < 0);
          }
        }
      }
      break;
    }
    case Problem::kParityLearning: {
      std::vector<double> magnitude(estimates.size());
      for (size_t i = 0; i < estimates.size(); ++i) {
        magnitude[i] = std::fabs(estimates[i]);
      }
      a.index = ArgMaxFirst(magnitude);
      a.sign = estimates[a.index] >= 0 ? 1 : -1;
      break;
    }
  }
  return a;
}

double ParityError(const ProblemInstance& instance, int feature, int sign) {
  return 0.5 * (1.0 - sign * instance.FeatureMeans()[feature]);
}

bool ScoreAnswer(const ProblemInstance& instance, const Answer& answer) {
  const std::vector<double> truth = instance.FeatureMeans();
  switch (instance.problem) {
    case Problem::kSelection: {
      if (answer.index < 1 || answer.index > instance.d) return false;
      const double best = *std::max_element(truth.begin(), truth.end());
      return truth[answer.index - 1] >=
             best - instance.alpha - kScoreTolerance;
    }
    case Problem::kSparseMean:
    case Problem::kParityRelease: {
      if (answer.values.size() != truth.size()) return false;
      for (size_t i = 0; i < truth.size(); ++i) {
        if (std::fabs(answer.values[i] - truth[i]) >
            instance.alpha + kScoreTolerance) {
          return false;
        }
      }
      return true;
    }
    case Problem::kHypothesisTest:
      return answer.index == instance.HypothesisTruth();
    case Problem::kParityLearning: {
      if (answer.index < 0 || answer.index >= static_cast<int>(truth.size()) ||
          (answer.sign != 1 && answer.sign != -1)) {
        return false;
      }
      double best = 1;
      for (double t : truth) best = std::min(best, 0.5 * (1.0 - std::fabs(t)));
      return ParityError(instance, answer.index, answer.sign) <
             best + instance.alpha - kScoreTolerance;
    }
  }
  return false;
}

std::vector<int64_t> DrawFeatureCounts(const ProblemInstance& instance,
                                       int64_t n, Rng& rng) {
  if (IsProductProblem(instance.problem)) {
    std::vector<int64_t> counts(instance.d);
    for (int j = 0; j < instance.d; ++j) {
      counts[j] = rng.Binomial(n, 0.5 * (1.0 + instance.means[j]));
    }
    return counts;
  }
  const FeatureMap map = instance.features();
  std::vector<int64_t> counts(instance.num_features(), 0);
  for (int64_t i = 0; i < n; ++i) {
    const std::vector<int> f = map(instance.member->Sample(rng));
    for (size_t j = 0; j < f.size(); ++j) counts[j] += f[j] > 0;
  }
  return counts;
}

absl::StatusOr<Solver> Solver::Create(ProblemInstance instance, Model model,
                                      int64_t n, Budget budget) {
  if (n < 1) return absl::InvalidArgumentError("need n >= 1");
  if (absl::Status s = CheckBudget(budget.epsilon, budget.delta); !s.ok()) {
    return s;
  }
  Solver solver(std::move(instance), model, n, budget);
  solver.split_ = SplitBudget(solver.instance_.num_features(), budget.epsilon,
                              budget.delta);
  if (model == Model::kShuffle) {
    absl::StatusOr<CalibratedRRSum> sum =
        CalibrateRR(n, solver.split_.epsilon, solver.split_.delta);
    if (!sum.ok()) return sum.status();
    if (!sum->estimable()) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "insufficient cohort: n=%d at eps'=%g, delta'=%g", n,
          solver.split_.epsilon, solver.split_.delta));
    }
    solver.calibration_ = *sum;
  } else {
    solver.noise_scale_ = std::isinf(budget.epsilon)
                              ? 0.0
                              : 2.0 * solver.split_.factor /
                                    (budget.epsilon / 2.0);
  }
  return solver;
}

std::vector<double> Solver::Privatize(std::span<const int64_t> counts,
                                      Rng& noise) const {
  if (model_ == Model::kPan) {
    return PanMeansFromCounts(counts, n_, noise_scale_, noise);
  }
  // Estimability was checked at creation.
  return *ShuffleMeansFromCounts(counts, n_, *calibration_, noise);
}

SolveResult Solver::Run(uint64_t seed) const {
  Rng data(SplitMix64(seed ^ 1));
  Rng noise(SplitMix64(seed ^ 2));
  const std::vector<int64_t> counts = DrawFeatureCounts(instance_, n_, data);
  SolveResult result;
  result.answer = DecodeAnswer(instance_, Privatize(counts, noise));
  result.correct = ScoreAnswer(instance_, result.answer);
  return result;
}

SolveResult PlugInSolve(const ProblemInstance& instance, int64_t n,
                        uint64_t seed) {
  Rng data(SplitMix64(seed ^ 1));
  const std::vector<int64_t> counts = DrawFeatureCounts(instance, n, data);
  std::vector<double> means(counts.size());
  for (size_t j = 0; j < counts.size(); ++j) {
    means[j] = CountToMean(static_cast<double>(counts[j]), n);
  }
  SolveResult result;
  result.answer = DecodeAnswer(instance, means);
  result.correct = ScoreAnswer(instance, result.answer);
  return result;
}

}  // namespace shufflepan
