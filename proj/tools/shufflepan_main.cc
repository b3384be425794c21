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


// Command-line front end.
//
// Experiment subcommands (norm, audit, reduce-check, distinguish, sweep)
// build an ExperimentSpec. Precedence, lowest first: the --spec file,
// --params, each --set, then --seed, --trials, --out and --threads.
//
// Exit codes: 0 when every assertion passed, 2 on an assertion failure,
// 1 on usage or guard errors.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "shufflepan/finite_distribution.h"
#include "shufflepan/hard_family.h"
#include "shufflepan/harness.h"
#include "shufflepan/info_metrics.h"
#include "shufflepan/random.h"

namespace shufflepan {
namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitAssertion = 2;

struct CommonFlags {
  std::string spec_path;
  std::string params;
  std::vector<std::string> sets;
  std::optional<uint64_t> seed;
  std::optional<int64_t> trials;
  std::optional<std::string> out;
  std::optional<int> threads;
};

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << "\n";
  return kExitError;
}

absl::StatusOr<nlohmann::json> ReadJsonFile(const std::string& path) {
  std::ifstream f(path);
  if (!f) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", e.what()));
  }
}

absl::StatusOr<nlohmann::json> ParseJsonText(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad JSON '", text, "': ", e.what()));
  }
}

// {"family": "U", "d": n} or a P/Q member descriptor.
absl::StatusOr<DistributionHandle> ParseDistribution(const std::string& text) {
  absl::StatusOr<nlohmann::json> j = ParseJsonText(text);
  if (!j.ok()) return j.status();
  if (j->value("family", std::string()) == "U") {
    const int d = j->value("d", 0);
    if (d < 1) return absl::InvalidArgumentError("uniform needs d >= 1");
    return DistributionHandle(UniformCube{d});
  }
  absl::StatusOr<HardDistribution> member = HardDistribution::FromJson(*j);
  if (!member.ok()) return member.status();
  return DistributionHandle(*member);
}

void AddCommonFlags(CLI::App* app, CommonFlags& flags) {
  app->add_option("--spec", flags.spec_path, "JSON experiment spec file");
  app->add_option("--params", flags.params, "JSON object merged into params");
  app->add_option("--set", flags.sets, "params override, key=<JSON value>");
  app->add_option("--seed", flags.seed, "master seed");
  app->add_option("--trials", flags.trials, "trial count");
  app->add_option("--out", flags.out, "output directory");
  app->add_option("--threads", flags.threads, "worker threads");
}

absl::StatusOr<ExperimentSpec> BuildSpec(ExperimentKind kind,
                                         const CommonFlags& flags) {
  nlohmann::json j = nlohmann::json::object();
  if (!flags.spec_path.empty()) {
    absl::StatusOr<nlohmann::json> file = ReadJsonFile(flags.spec_path);
    if (!file.ok()) return file.status();
    j = *file;
    if (j.contains("kind") && j["kind"] != ExperimentKindName(kind)) {
      return absl::InvalidArgumentError(
          absl::StrCat("spec kind ", j["kind"].dump(), " does not match ",
                       ExperimentKindName(kind)));
    }
  }
  j["kind"] = ExperimentKindName(kind);
  if (!j.contains("params")) j["params"] = nlohmann::json::object();
  if (!flags.params.empty()) {
    absl::StatusOr<nlohmann::json> p = ParseJsonText(flags.params);
    if (!p.ok()) return p.status();
    if (!p->is_object()) {
      return absl::InvalidArgumentError("--params must be a JSON object");
    }
    j["params"].update(*p);
  }
  for (const std::string& set : flags.sets) {
    const std::vector<std::string> kv = absl::StrSplit(set, absl::MaxSplits('=', 1));
    if (kv.size() != 2 || kv[0].empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("--set expects key=value, got '", set, "'"));
    }
    absl::StatusOr<nlohmann::json> v = ParseJsonText(kv[1]);
    // Bare words are taken as strings.
    j["params"][kv[0]] = v.ok() ? *v : nlohmann::json(kv[1]);
  }
  if (flags.seed) j["seed"] = *flags.seed;
  if (flags.trials) j["trials"] = *flags.trials;
  if (flags.out) j["out"] = *flags.out;
  if (flags.threads) j["threads"] = *flags.threads;
  return ExperimentSpec::FromJson(j);
}

int RunExperiment(ExperimentKind kind, const CommonFlags& flags) {
  absl::StatusOr<ExperimentSpec> spec = BuildSpec(kind, flags);
  if (!spec.ok()) return Fail(spec.status());
  absl::StatusOr<RunReport> report = RunSpec(*spec);
  if (!report.ok()) return Fail(report.status());
  std::cout << report->summary.dump(2) << "\n";
  for (const Artifact& a : report->files) {
    std::cout << a.sha256 << "  " << spec->out << "/" << a.name << "\n";
  }
  for (const std::string& f : report->failed_assertions) {
    std::cout << "ASSERTION FAILED: " << f << "\n";
  }
  return report->passed() ? kExitPass : kExitAssertion;
}

int RunSample(const std::string& dist_text, int64_t count, uint64_t seed,
              const std::string& out) {
  absl::StatusOr<DistributionHandle> dist = ParseDistribution(dist_text);
  if (!dist.ok()) return Fail(dist.status());
  if (count < 0) return Fail(absl::InvalidArgumentError("count must be >= 0"));
  Rng rng(TrialSeed(seed, 0, 0));
  std::ostringstream rows;
  for (const BitVector& x : SampleMany(*dist, static_cast<size_t>(count), rng)) {
    rows << x.ToString() << "\n";
  }
  if (out.empty()) {
    std::cout << rows.str();
    return kExitPass;
  }
  std::ofstream f(out, std::ios::binary);
  f << rows.str();
  if (!f) return Fail(absl::UnavailableError(absl::StrCat("cannot write ", out)));
  return kExitPass;
}

int RunTv(const std::string& p_text, const std::string& q_text,
          std::optional<double> expect, double tolerance) {
  absl::StatusOr<DistributionHandle> p = ParseDistribution(p_text);
  if (!p.ok()) return Fail(p.status());
  absl::StatusOr<DistributionHandle> q = ParseDistribution(q_text);
  if (!q.ok()) return Fail(q.status());
  absl::StatusOr<FiniteDistribution> dp = Densify(*p);
  if (!dp.ok()) return Fail(dp.status());
  absl::StatusOr<FiniteDistribution> dq = Densify(*q);
  if (!dq.ok()) return Fail(dq.status());
  absl::StatusOr<double> tv = TvDistance(*dp, *dq);
  if (!tv.ok()) return Fail(tv.status());
  std::cout << nlohmann::json{{"tv", *tv}}.dump() << "\n";
  if (expect && std::abs(*tv - *expect) > tolerance) {
    std::cout << "ASSERTION FAILED: tv " << *tv << " != " << *expect << "\n";
    return kExitAssertion;
  }
  return kExitPass;
}

// Accepts a sweep.json summary ({"points": [{d, n_star}, ...]}) or
// {"d": [...], "n_star": [...]}.
int RunFit(const std::string& in, const std::vector<double>& expect_slope) {
  absl::StatusOr<nlohmann::json> j = ReadJsonFile(in);
  if (!j.ok()) return Fail(j.status());
  std::vector<double> d, n;
  try {
    if (j->contains("points")) {
      for (const nlohmann::json& pt : j->at("points")) {
        d.push_back(pt.at("d").get<double>());
        n.push_back(pt.at("n_star").get<double>());
      }
    } else {
      d = j->at("d").get<std::vector<double>>();
      n = j->at("n_star").get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    return Fail(absl::InvalidArgumentError(absl::StrCat(in, ": ", e.what())));
  }
  absl::StatusOr<LinearFit> fit = FitScaling(d, n);
  if (!fit.ok()) return Fail(fit.status());
  std::cout << nlohmann::json{{"slope", fit->slope},
                              {"slope_stderr", fit->slope_stderr},
                              {"intercept", fit->intercept},
                              {"points", d.size()}}
                   .dump()
            << "\n";
  if (expect_slope.size() == 2 &&
      (fit->slope < expect_slope[0] || fit->slope > expect_slope[1])) {
    std::cout << "ASSERTION FAILED: slope " << fit->slope << " outside ["
              << expect_slope[0] << ", " << expect_slope[1] << "]\n";
    return kExitAssertion;
  }
  return kExitPass;
}

int Main(int argc, char** argv) {
  CLI::App app{"Shuffle and pan-private experiment runner"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string dist, p_text, q_text, fit_in, sample_out;
  int64_t count = 1;
  uint64_t sample_seed = 0;
  std::optional<double> tv_expect;
  double tv_tolerance = 1e-12;
  std::vector<double> expect_slope;

  CLI::App* sample = app.add_subcommand("sample", "draw i.i.d. rows");
  sample->add_option("--dist", dist, "distribution JSON")->required();
  sample->add_option("-n,--count", count, "number of rows");
  sample->add_option("--seed", sample_seed, "master seed");
  sample->add_option("--out", sample_out, "output file (default stdout)");

  CLI::App* tv = app.add_subcommand("tv", "exact total variation distance");
  tv->add_option("--p", p_text, "distribution JSON")->required();
  tv->add_option("--q", q_text, "distribution JSON")->required();
  tv->add_option("--expect", tv_expect, "asserted value");
  tv->add_option("--tolerance", tv_tolerance, "assertion tolerance");

  CLI::App* fit = app.add_subcommand("fit", "log-log slope of n* against d");
  fit->add_option("--in", fit_in, "sweep.json or {d, n_star} JSON")->required();
  fit->add_option("--expect-slope", expect_slope, "asserted range lo hi")
      ->expected(2);

  const std::vector<std::pair<std::string, ExperimentKind>> kinds = {
      {"norm", ExperimentKind::kNorm},
      {"audit", ExperimentKind::kAudit},
      {"reduce-check", ExperimentKind::kReductionCheck},
      {"distinguish", ExperimentKind::kDistinguish},
      {"sweep", ExperimentKind::kSweep},
  };
  std::vector<CommonFlags> flags(kinds.size());
  std::vector<CLI::App*> experiment_apps;
  for (size_t i = 0; i < kinds.size(); ++i) {
    CLI::App* sub = app.add_subcommand(
        kinds[i].first, absl::StrCat(ExperimentKindName(kinds[i].second),
                                     " experiment"));
    AddCommonFlags(sub, flags[i]);
    experiment_apps.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  if (sample->parsed()) return RunSample(dist, count, sample_seed, sample_out);
  if (tv->parsed()) return RunTv(p_text, q_text, tv_expect, tv_tolerance);
  if (fit->parsed()) return RunFit(fit_in, expect_slope);
  for (size_t i = 0; i < kinds.size(); ++i) {
    if (experiment_apps[i]->parsed()) {
      return RunExperiment(kinds[i].second, flags[i]);
    }
  }
  return kExitError;
}

}  // namespace
}  // namespace shufflepan

int main(int argc, char** argv) { return shufflepan::Main(argc, argv); }
