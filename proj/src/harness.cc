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

#include "shufflepan/harness.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "shufflepan/audit.h"
#include "shufflepan/norm.h"
#include "shufflepan/pan.h"
#include "shufflepan/parallel.h"
#include "shufflepan/reductions.h"
#include "shufflepan/shuffle.h"

namespace shufflepan {
namespace {

constexpr uint64_t kConfirmStream = uint64_t{1} << 32;
constexpr uint64_t kCorridorStream = uint64_t{2} << 32;

absl::Status WriteFile(const std::filesystem::path& path,
                       const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    return absl::UnavailableError(
        absl::StrCat("cannot open ", path.string(), " for writing"));
  }
  f << contents;
  f.close();
  if (!f) return absl::DataLossError(absl::StrCat("write failed: ", path.string()));
  return absl::OkStatus();
}

template <typename T>
absl::StatusOr<T> Param(const nlohmann::json& params, const char* key) {
  try {
    return params.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("parameter '", key, "': ", e.what()));
  }
}

template <typename T>
absl::StatusOr<T> Param(const nlohmann::json& params, const char* key,
                        T fallback) {
  if (!params.contains(key)) return fallback;
  return Param<T>(params, key);
}

#define SP_ASSIGN(lhs, expr)              \
  auto lhs##_or = (expr);                 \
  if (!lhs##_or.ok()) return lhs##_or.status(); \
  auto lhs = *std::move(lhs##_or)

struct KindOutput {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  std::vector<std::string> failures;
  nlohmann::json summary = nlohmann::json::object();
};

std::vector<double> EpsilonGrid(const nlohmann::json& params,
                                double fallback) {
  if (params.contains("epsilons")) {
    return params.at("epsilons").get<std::vector<double>>();
  }
  return {fallback};
}

absl::StatusOr<KindOutput> RunAudit(const ExperimentSpec& spec) {
  const nlohmann::json& p = spec.params;
  SP_ASSIGN(mechanism, Param<std::string>(p, "mechanism"));
  KindOutput out;
  AuditCurve curve;
  double target = -1;
  if (mechanism == "shuffle-rr" || mechanism == "local-rr") {
    SP_ASSIGN(n, Param<int>(p, "n", mechanism == "local-rr" ? 1 : 8));
    double flip = 0;
    std::vector<double> grid;
    if (p.contains("calibrate")) {
      SP_ASSIGN(eps, Param<double>(p.at("calibrate"), "epsilon"));
      SP_ASSIGN(delta, Param<double>(p.at("calibrate"), "delta"));
      SP_ASSIGN(sum, CalibrateRR(n, eps, delta));
      flip = sum.flip;
      target = delta;
      grid = EpsilonGrid(p, eps);
      out.summary["calibration"] = {{"flip", flip},
                                    {"path", CalibrationPathName(sum.path)}};
    } else {
      SP_ASSIGN(f, Param<double>(p, "flip"));
      flip = f;
      grid = EpsilonGrid(p, std::log((1 - flip) / flip));
    }
    SP_ASSIGN(rr, Randomizer::BinaryRandomizedResponse(flip));
    SP_ASSIGN(c, AuditShuffleWorstCase(rr, n, grid));
    curve = std::move(c);
  } else if (mechanism == "pan-counter" || mechanism == "rr-chain") {
    SP_ASSIGN(n, Param<int>(p, "n", 2));
    if (n < 1) return absl::InvalidArgumentError("stream length must be >= 1");
    std::vector<int> x(n, 0);
    x[0] = 1;
    std::vector<int> y(n, 0);
    if (p.contains("stream")) x = p.at("stream").get<std::vector<int>>();
    if (p.contains("neighbor")) y = p.at("neighbor").get<std::vector<int>>();
    FinitePanAlgorithm alg;
    std::vector<double> grid;
    if (mechanism == "pan-counter") {
      SP_ASSIGN(eps, Param<double>(p, "epsilon", 1.0));
      SP_ASSIGN(counter, MakeQuantizedCounter(n, eps));
      alg = counter.alg;
      target = counter.slack();
      grid = EpsilonGrid(p, eps);
      out.summary["slack"] = counter.slack();
    } else {
      SP_ASSIGN(flip, Param<double>(p, "flip"));
      SP_ASSIGN(chain, MakeRandomizedResponseChain(n, flip));
      alg = std::move(chain);
      grid = EpsilonGrid(p, std::log((1 - flip) / flip));
    }
    SP_ASSIGN(c, AuditPan(alg, x, y, grid));
    curve = std::move(c);
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown audit mechanism: ", mechanism));
  }
  if (p.contains("expect_delta")) target = p.at("expect_delta").get<double>();
  double worst = 0;
  for (const AuditPoint& pt : curve) worst = std::max(worst, pt.delta_max());
  out.summary["max_delta"] = worst;
  if (target >= 0) {
    out.summary["target_delta"] = target;
    if (!(worst <= target + 1e-12)) {
      out.failures.push_back(absl::StrFormat(
          "audit: delta %.6g exceeds target %.6g", worst, target));
    }
  }
  out.files.emplace_back("audit.csv", AuditCurveToCsv(curve));
  return out;
}

absl::StatusOr<KindOutput> RunNorm(const ExperimentSpec& spec) {
  const nlohmann::json& p = spec.params;
  SP_ASSIGN(family, Param<std::string>(p, "family", "P"));
  SP_ASSIGN(tag, ParseFamilyName(family));
  SP_ASSIGN(d, Param<int>(p, "d"));
  SP_ASSIGN(k, Param<int>(p, "k"));
  SP_ASSIGN(alpha, Param<double>(p, "alpha"));
  SP_ASSIGN(report, InftyToTwoNormForFamily(d, k, alpha, tag, spec.threads));
  KindOutput out;
  nlohmann::json j = report.ToJson();
  const double c = static_cast<double>(BinomialSumUpTo(d, k));
  // P has C distinct characters; Q has C + 1 (the empty set included).
  const double exact =
      4 * alpha * alpha / (tag == FamilyTag::kParity ? c : c + 1);
  j["family"] = family;
  j["d"] = d;
  j["k"] = k;
  j["alpha"] = alpha;
  j["closed_form_sq"] = exact;
  out.summary = j;
  if (p.value("expect_closed_form", false) &&
      std::fabs(report.value_sq - exact) > 1e-9) {
    out.failures.push_back(absl::StrFormat(
        "norm: %.12g differs from closed form %.12g", report.value_sq, exact));
  }
  out.files.emplace_back("norm.json", j.dump(2) + "\n");
  return out;
}

absl::StatusOr<KindOutput> RunReductionCheck(const ExperimentSpec& spec) {
  const nlohmann::json& p = spec.params;
  SP_ASSIGN(flip, Param<double>(p, "flip", 0.1));
  SP_ASSIGN(ns, Param<std::vector<int>>(p, "n", std::vector<int>{30, 60}));
  SP_ASSIGN(law, Param<std::vector<double>>(p, "data_law",
                                            std::vector<double>{0.9, 0.1}));
  SP_ASSIGN(rr, Randomizer::BinaryRandomizedResponse(flip));
  KindOutput out;
  std::string csv =
      "n,trials,differ,estimate,ci_low,ci_high,exact_tv,clip_tail,seed\n";
  std::vector<DilutionEstimate> rows;
  for (int n : ns) {
    ShuffleProtocol protocol{rr, SumAnalyzer(), n, 1.0 / 3};
    absl::StatusOr<DilutionEstimate> e =
        EstimateDilutionTv(protocol, law, spec.trials, spec.seed, spec.threads);
    if (!e.ok()) {
      return absl::Status(e.status().code(),
                          absl::StrCat("cell n=", n, ": ", e.status().message()));
    }
    absl::StrAppendFormat(&csv, "%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                          e->n, e->trials, e->differ, e->estimate, e->ci.low,
                          e->ci.high, e->exact_tv, e->clip_tail, spec.seed);
    rows.push_back(*e);
  }
  if (p.value("expect_nonincreasing", false)) {
    for (size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].estimate > rows[i - 1].estimate) {
        out.failures.push_back(absl::StrFormat(
            "reduction: estimate rises from n=%d to n=%d", rows[i - 1].n,
            rows[i].n));
      }
    }
  }
  if (p.contains("expect_below")) {
    const double bound = p.at("expect_below").value("bound", 1.0 / 6);
    const int from = p.at("expect_below").value("from_n", 60);
    for (const DilutionEstimate& e : rows) {
      if (e.n >= from && !(e.ci.high < bound)) {
        out.failures.push_back(absl::StrFormat(
            "reduction: n=%d upper CI %.6g not below %.6g", e.n, e.ci.high,
            bound));
      }
    }
  }
  out.summary["rows"] = static_cast<int>(rows.size());
  out.files.emplace_back("reduce.csv", std::move(csv));
  return out;
}

absl::StatusOr<KindOutput> RunDistinguish(const ExperimentSpec& spec) {
  const nlohmann::json& p = spec.params;
  SP_ASSIGN(d, Param<int>(p, "d", 3));
  SP_ASSIGN(n, Param<int>(p, "n", 5));
  SP_ASSIGN(alpha, Param<double>(p, "alpha", 0.2));
  SP_ASSIGN(eps, Param<double>(p, "epsilon", 1.0));
  SP_ASSIGN(ell, Param<std::vector<int>>(p, "ell", std::vector<int>{1}));
  SP_ASSIGN(sign, Param<int>(p, "b", 1));
  SP_ASSIGN(planted, ParityIndex::Create(ell, sign, d, true));
  SP_ASSIGN(member, HardDistribution::Create(FamilyTag::kSignedParity, d,
                                             planted, alpha));
  SP_ASSIGN(zq, PlantedDistinguisherDraws(member, planted, d, n, alpha, eps,
                                          spec.trials, spec.seed,
                                          spec.threads));
  SP_ASSIGN(zu, PlantedDistinguisherDraws(UniformCube{d + 1}, planted, d, n,
                                          alpha, eps, spec.trials,
                                          SplitMix64(spec.seed),
                                          spec.threads));
  KindOutput out;
  std::string jsonl;
  for (int64_t i = 0; i < spec.trials; ++i) {
    jsonl += DistinguishRecord("mixture", TrialSeed(spec.seed, 0, i), zq[i]);
    jsonl += "\n";
    jsonl += DistinguishRecord("uniform",
                               TrialSeed(SplitMix64(spec.seed), 0, i), zu[i]);
    jsonl += "\n";
  }
  out.files.emplace_back("distinguish.jsonl", std::move(jsonl));
  if (spec.trials >= kMinThresholdSamples) {
    SP_ASSIGN(report, ThresholdDistinguisher(zq, zu));
    out.files.emplace_back("threshold.json", report.ToJson() + "\n");
    out.summary = nlohmann::json::parse(report.ToJson());
    if (p.contains("min_advantage") &&
        !(report.advantage >= p.at("min_advantage").get<double>())) {
      out.failures.push_back(absl::StrFormat(
          "distinguish: advantage %.4f below %.4f", report.advantage,
          p.at("min_advantage").get<double>()));
    }
  }
  return out;
}

absl::StatusOr<KindOutput> RunSweepKind(const ExperimentSpec& spec) {
  nlohmann::json params = spec.params;
  if (!params.contains("trials")) params["trials"] = spec.trials;
  SP_ASSIGN(config, SweepConfig::FromJson(params));
  KindOutput out;
  if (config.d_values.empty()) return out;  // manifest only
  SP_ASSIGN(result, RunSweep(config, spec.seed, spec.threads));
  out.files.emplace_back("sweep.csv", SweepCsv(config, result, spec.seed));
  nlohmann::json points = nlohmann::json::array();
  for (const SweepPoint& pt : result.points) {
    points.push_back({{"d", pt.d},
                      {"n_star", pt.n_star},
                      {"confirmed", pt.confirmed},
                      {"confirm_rate", pt.confirmation.rate()},
                      {"corridor_n", pt.corridor.n},
                      {"corridor_rate", pt.corridor.rate()},
                      {"corridor_ci_high", pt.corridor.ci().high}});
    if (!(pt.corridor.ci().high < config.corridor_ceiling)) {
      out.failures.push_back(absl::StrFormat(
          "sweep: d=%d success at n*/%d has upper CI %.4f", pt.d,
          config.corridor_divisor, pt.corridor.ci().high));
    }
  }
  nlohmann::json summary{{"config", config.ToJson()}, {"points", points}};
  if (result.fit.has_value()) {
    summary["slope"] = result.fit->slope;
    summary["slope_stderr"] = result.fit->slope_stderr;
    summary["intercept"] = result.fit->intercept;
  }
  if (params.contains("expect_slope")) {
    const auto range = params.at("expect_slope").get<std::vector<double>>();
    if (!result.fit.has_value() || range.size() != 2 ||
        result.fit->slope < range[0] || result.fit->slope > range[1]) {
      out.failures.push_back(absl::StrFormat(
          "sweep: slope %.4f outside expected range",
          result.fit.has_value() ? result.fit->slope : NAN));
    }
  }
  out.summary = summary;
  out.files.emplace_back("sweep.json", summary.dump(2) + "\n");
  return out;
}

#undef SP_ASSIGN

}  // namespace

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    absl::StrAppendFormat(&hex, "%02x", digest[i]);
  }
  return hex;
}

absl::StatusOr<std::string> FileSha256(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  std::stringstream buffer;
  buffer << f.rdbuf();
  return Sha256Hex(buffer.str());
}

std::string ExperimentKindName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kAudit:
      return "audit";
    case ExperimentKind::kNorm:
      return "norm";
    case ExperimentKind::kReductionCheck:
      return "reduction-check";
    case ExperimentKind::kDistinguish:
      return "distinguish";
    case ExperimentKind::kSweep:
      return "sweep";
  }
  return "unknown";
}

absl::StatusOr<ExperimentKind> ParseExperimentKind(const std::string& name) {
  for (ExperimentKind k :
       {ExperimentKind::kAudit, ExperimentKind::kNorm,
        ExperimentKind::kReductionCheck, ExperimentKind::kDistinguish,
        ExperimentKind::kSweep}) {
    if (ExperimentKindName(k) == name) return k;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown experiment kind: ", name));
}

absl::StatusOr<ExperimentSpec> ExperimentSpec::FromJson(
    const nlohmann::json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("spec must be an object");
  static const char* kKnown[] = {"kind", "params", "trials",
                                 "seed", "out",    "threads"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown),
                     [&](const char* k) { return key == k; }) ==
        std::end(kKnown)) {
      return absl::InvalidArgumentError(absl::StrCat("unknown field: ", key));
    }
  }
  ExperimentSpec spec;
  try {
    absl::StatusOr<ExperimentKind> kind =
        ParseExperimentKind(j.at("kind").get<std::string>());
    if (!kind.ok()) return kind.status();
    spec.kind = *kind;
    spec.out = j.at("out").get<std::string>();
    spec.params = j.value("params", nlohmann::json::object());
    spec.trials = j.value("trials", int64_t{1});
    spec.seed = j.value("seed", uint64_t{0});
    spec.threads = j.value("threads", 1);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed spec: ", e.what()));
  }
  if (!spec.params.is_object()) {
    return absl::InvalidArgumentError("params must be an object");
  }
  if (spec.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (spec.threads < 1) return absl::InvalidArgumentError("threads must be >= 1");
  if (spec.out.empty()) return absl::InvalidArgumentError("out is empty");
  return spec;
}

nlohmann::json ExperimentSpec::ToJson() const {
  return {{"kind", ExperimentKindName(kind)}, {"params", params},
          {"trials", trials},                 {"seed", seed},
          {"out", out},                       {"threads", threads}};
}

std::string ExperimentSpec::Hash() const {
  const nlohmann::json data{{"kind", ExperimentKindName(kind)},
                            {"params", params},
                            {"trials", trials},
                            {"seed", seed}};
  return Sha256Hex(data.dump());
}

absl::StatusOr<RunReport> RunSpec(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(spec.out, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", spec.out, ": ", ec.message()));
  }
  absl::StatusOr<KindOutput> output;
  switch (spec.kind) {
    case ExperimentKind::kAudit:
      output = RunAudit(spec);
      break;
    case ExperimentKind::kNorm:
      output = RunNorm(spec);
      break;
    case ExperimentKind::kReductionCheck:
      output = RunReductionCheck(spec);
      break;
    case ExperimentKind::kDistinguish:
      output = RunDistinguish(spec);
      break;
    case ExperimentKind::kSweep:
      output = RunSweepKind(spec);
      break;
  }
  if (!output.ok()) return output.status();
  RunReport report;
  report.failed_assertions = output->failures;
  report.summary = output->summary;
  const std::filesystem::path dir(spec.out);
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [name, contents] : output->files) {
    if (absl::Status s = WriteFile(dir / name, contents); !s.ok()) return s;
    report.files.push_back({name, Sha256Hex(contents)});
    files.push_back({{"name", name}, {"sha256", report.files.back().sha256}});
  }
  const double wall = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  const nlohmann::json manifest{
      {"spec", spec.ToJson()},
      {"spec_sha256", spec.Hash()},
      {"seed", spec.seed},
      {"version", kVersion},
      {"compiler", __VERSION__},
      {"wall_time_s", wall},
      {"files", files},
      {"failed_assertions", report.failed_assertions},
  };
  if (absl::Status s = WriteFile(dir / "manifest.json", manifest.dump(2) + "\n");
      !s.ok()) {
    return s;
  }
  return report;
}

absl::StatusOr<SweepConfig> SweepConfig::FromJson(const nlohmann::json& j) {
  SweepConfig c;
  try {
    absl::StatusOr<Problem> problem =
        ParseProblem(j.value("problem", std::string("selection")));
    if (!problem.ok()) return problem.status();
    absl::StatusOr<Model> model =
        ParseModel(j.value("model", std::string("pan")));
    if (!model.ok()) return model.status();
    c.problem = *problem;
    c.model = *model;
    c.d_values = j.value("d", std::vector<int>{});
    c.k = j.value("k", c.k);
    c.alpha = j.value("alpha", c.alpha);
    c.budget.epsilon = j.value("eps", c.budget.epsilon);
    c.budget.delta = j.value("delta", c.budget.delta);
    c.trials = j.value("trials", c.trials);
    c.target = j.value("target", c.target);
    c.precision = j.value("precision", c.precision);
    c.n_max = j.value("n_max", c.n_max);
    c.corridor_divisor = j.value("corridor_divisor", c.corridor_divisor);
    c.corridor_ceiling = j.value("corridor_ceiling", c.corridor_ceiling);
    c.max_confirmations = j.value("max_confirmations", c.max_confirmations);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed sweep config: ", e.what()));
  }
  if (c.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (!(c.target > 0 && c.target < 1)) {
    return absl::InvalidArgumentError("target must lie in (0, 1)");
  }
  if (!(c.precision > 0)) return absl::InvalidArgumentError("precision <= 0");
  if (c.corridor_divisor < 1) {
    return absl::InvalidArgumentError("corridor divisor must be >= 1");
  }
  for (int d : c.d_values) {
    if (d < 1) return absl::InvalidArgumentError("d values must be >= 1");
  }
  return c;
}

nlohmann::json SweepConfig::ToJson() const {
  return {{"problem", ProblemName(problem)},
          {"model", ModelName(model)},
          {"d", d_values},
          {"k", k},
          {"alpha", alpha},
          {"eps", budget.epsilon},
          {"delta", budget.delta},
          {"trials", trials},
          {"target", target},
          {"precision", precision},
          {"n_max", n_max},
          {"corridor_divisor", corridor_divisor},
          {"corridor_ceiling", corridor_ceiling},
          {"max_confirmations", max_confirmations}};
}

Interval SweepCell::ci() const { return WilsonInterval(successes, trials); }

absl::StatusOr<ProblemInstance> CanonicalInstance(Problem problem, int d, int k,
                                                  double alpha) {
  if (d < 1) return absl::InvalidArgumentError("need d >= 1");
  std::vector<double> planted(d, 0.0);
  planted[d - 1] = 2 * alpha;
  switch (problem) {
    case Problem::kSelection:
      return ProblemInstance::Selection(planted, alpha);
    case Problem::kSparseMean:
      return ProblemInstance::SparseMean(planted, k, alpha);
    case Problem::kHypothesisTest:
      return ProblemInstance::HypothesisTest(d, alpha, d, 1);
    case Problem::kParityRelease:
    case Problem::kParityLearning: {
      if (k < 1 || k > d) return absl::InvalidArgumentError("need 1 <= k <= d");
      std::vector<int> ell;
      for (int j = d - k + 1; j <= d; ++j) ell.push_back(j);
      const bool learning = problem == Problem::kParityLearning;
      absl::StatusOr<ParityIndex> index =
          ParityIndex::Create(ell, 1, d, learning);
      if (!index.ok()) return index.status();
      absl::StatusOr<HardDistribution> member = HardDistribution::Create(
          learning ? FamilyTag::kSignedParity : FamilyTag::kParity, d, *index,
          alpha);
      if (!member.ok()) return member.status();
      return learning ? ProblemInstance::ParityLearning(k, *member)
                      : ProblemInstance::ParityRelease(k, *member);
    }
  }
  return absl::InvalidArgumentError("unknown problem");
}

absl::StatusOr<SweepCell> EvaluateCell(const ProblemInstance& instance,
                                       Model model, int64_t n, Budget budget,
                                       int64_t trials, uint64_t seed,
                                       uint64_t experiment, int threads) {
  SweepCell cell;
  cell.d = instance.d;
  cell.n = n;
  cell.trials = trials;
  absl::StatusOr<Solver> solver = Solver::Create(instance, model, n, budget);
  if (!solver.ok()) {
    if (solver.status().code() == absl::StatusCode::kFailedPrecondition) {
      cell.feasible = false;
      return cell;
    }
    return absl::Status(solver.status().code(),
                        absl::StrFormat("cell d=%d n=%d: %s", instance.d, n,
                                        solver.status().message()));
  }
  std::vector<uint8_t> correct(trials, 0);
  ParallelFor(trials, threads, [&](size_t t) {
    correct[t] = solver->Run(TrialSeed(seed, experiment, t)).correct;
  });
  for (uint8_t c : correct) cell.successes += c;
  return cell;
}

absl::StatusOr<SweepResult> RunSweep(const SweepConfig& config, uint64_t seed,
                                     int threads) {
  SweepResult result;
  const int64_t n_min = config.model == Model::kShuffle ? 2 : 1;
  if (config.trials < 1 ||
      WilsonInterval(config.trials, config.trials).low < config.target) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "target %g unreachable with %d trials per cell", config.target,
        config.trials));
  }
  for (int d : config.d_values) {
    absl::StatusOr<ProblemInstance> instance =
        CanonicalInstance(config.problem, d, config.k, config.alpha);
    if (!instance.ok()) return instance.status();
    auto cell = [&](const char* phase, int64_t n,
                    uint64_t experiment) -> absl::StatusOr<SweepCell> {
      absl::StatusOr<SweepCell> c =
          EvaluateCell(*instance, config.model, n, config.budget,
                       config.trials, seed, experiment, threads);
      if (c.ok()) {
        c->phase = phase;
        result.cells.push_back(*c);
      }
      return c;
    };
    auto pilot_passes = [&](int64_t n) -> absl::StatusOr<bool> {
      absl::StatusOr<SweepCell> c = cell("pilot", n, d);
      if (!c.ok()) return c.status();
      return c->ci().low >= config.target;
    };
    // Doubling bracket, then bisection, all on the pilot seeds.
    int64_t hi = n_min;
    for (;;) {
      absl::StatusOr<bool> pass = pilot_passes(hi);
      if (!pass.ok()) return pass.status();
      if (*pass) break;
      if (hi > config.n_max / 2) {
        return absl::ResourceExhaustedError(absl::StrFormat(
            "cell d=%d: target not reached below n_max=%d", d, config.n_max));
      }
      hi *= 2;
    }
    int64_t lo = hi / 2;
    if (lo >= n_min) {
      while (hi - lo > std::max<int64_t>(
                           1, static_cast<int64_t>(config.precision * lo))) {
        const int64_t mid = lo + (hi - lo) / 2;
        absl::StatusOr<bool> pass = pilot_passes(mid);
        if (!pass.ok()) return pass.status();
        (*pass ? hi : lo) = mid;
      }
    }
    SweepPoint point;
    point.d = d;
    int64_t n_star = hi;
    for (int attempt = 0; attempt < config.max_confirmations; ++attempt) {
      absl::StatusOr<SweepCell> c =
          cell("confirm", n_star,
               kConfirmStream | (static_cast<uint64_t>(attempt) << 40) |
                   static_cast<uint64_t>(d));
      if (!c.ok()) return c.status();
      point.confirmation = *c;
      if (c->rate() >= config.target) {
        point.confirmed = true;
        break;
      }
      n_star += std::max<int64_t>(
          1, static_cast<int64_t>(std::ceil(config.precision * n_star)));
    }
    point.n_star = n_star;
    absl::StatusOr<SweepCell> corridor =
        cell("corridor", std::max(n_min, n_star / config.corridor_divisor),
             kCorridorStream | static_cast<uint64_t>(d));
    if (!corridor.ok()) return corridor.status();
    point.corridor = *corridor;
    result.points.push_back(point);
  }
  if (result.points.size() >= 4) {
    absl::StatusOr<LinearFit> fit = FitScaling(result);
    if (!fit.ok()) return fit.status();
    result.fit = *fit;
  }
  return result;
}

absl::StatusOr<LinearFit> FitScaling(std::span<const double> d,
                                     std::span<const double> n_star) {
  if (d.size() != n_star.size()) {
    return absl::InvalidArgumentError("mismatched d and n* lists");
  }
  if (d.size() < 4) {
    return absl::FailedPreconditionError("scaling fit needs >= 4 points");
  }
  std::vector<double> x, y;
  for (size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0 && n_star[i] > 0)) {
      return absl::InvalidArgumentError("d and n* must be positive");
    }
    x.push_back(std::log(d[i]));
    y.push_back(std::log(n_star[i]));
  }
  return FitLine(x, y);
}

absl::StatusOr<LinearFit> FitScaling(const SweepResult& result) {
  std::vector<double> d, n;
  for (const SweepPoint& p : result.points) {
    d.push_back(p.d);
    n.push_back(static_cast<double>(p.n_star));
  }
  return FitScaling(d, n);
}

std::string SweepCsv(const SweepConfig& config, const SweepResult& result,
                     uint64_t seed) {
  std::string csv =
      "problem,model,d,k,alpha,eps,delta,n,success_rate,ci_low,ci_high,seed\n";
  for (const SweepCell& c : result.cells) {
    const Interval ci = c.ci();
    absl::StrAppendFormat(&csv, "%s,%s,%d,%d,%.10g,%.10g,%.10g,%d,%.10g,%.10g,"
                                "%.10g,%d\n",
                          ProblemName(config.problem), ModelName(config.model),
                          c.d, config.k, config.alpha, config.budget.epsilon,
                          config.budget.delta, c.n, c.rate(), ci.low, ci.high,
                          seed);
  }
  return csv;
}

absl::StatusOr<std::vector<double>> PlantedDistinguisherDraws(
    const DistributionHandle& world, const ParityIndex& planted, int d, int n,
    double alpha, double epsilon, int64_t count, uint64_t seed, int threads) {
  if (DomainDimension(world) != d + 1) {
    return absl::InvalidArgumentError("world must live on {+-1}^{d+1}");
  }
  if (n < 0) return absl::InvalidArgumentError("negative training length");
  const int m = n + static_cast<int>(TestPhaseLength(alpha, epsilon));
  const auto mprime =
      LearnerToDistinguisher(PlantedLearner(planted), n, d, epsilon);
  std::vector<double> z(count);
  std::vector<uint8_t> failed(count, 0);
  ParallelFor(count, threads, [&](size_t i) {
    Rng rng(TrialSeed(seed, 0, i));
    std::vector<BitVector> stream;
    stream.reserve(m);
    for (int j = 0; j < m; ++j) stream.push_back(SampleOne(world, rng));
    absl::StatusOr<AdversaryView<DistinguisherState<int>, double>> view =
        RunLearnerDistinguisher(mprime, n, stream, m, rng());
    if (!view.ok()) {
      failed[i] = 1;
      return;
    }
    z[i] = view->output;
  });
  if (std::find(failed.begin(), failed.end(), 1) != failed.end()) {
    return absl::InternalError("distinguisher run failed");
  }
  return z;
}

}  // namespace shufflepan
