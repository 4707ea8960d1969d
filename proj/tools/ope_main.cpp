/*
 * Copyright 2026 The OPE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// ope: command-line front end. Exit codes: 0 ok, 2 validation, 3 numerical.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ope/environment.hpp"
#include "ope/error.hpp"
#include "ope/estimators.hpp"
#include "ope/experiment.hpp"
#include "ope/log.hpp"
#include "ope/monte_carlo.hpp"
#include "ope/policy.hpp"
#include "ope/propensity.hpp"
#include "ope/report.hpp"
#include "ope/reward_model.hpp"
#include "ope/simulate.hpp"
#include "ope/variance.hpp"

namespace {

using nlohmann::json;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ope::ValidationError("cannot write '" + path + "'");
  out << text;
}

json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ope::ValidationError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ope::ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

ope::BanditLog LoadLog(const std::string& path) {
  auto log = ope::ReadLogCsvFile(path);
  const auto violations = ope::ValidateLog(log);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << path << ": " << violations.size() << " violation(s)";
    for (std::size_t i = 0; i < violations.size() && i < 5; ++i) {
      const auto& v = violations[i];
      msg << "\n  ";
      if (v.record) msg << "record " << *v.record << ": ";
      msg << v.rule << ": " << v.message;
    }
    throw ope::ValidationError(msg.str());
  }
  return log;
}

struct SimulateArgs {
  std::string env, out;
  std::size_t rounds = 1000;
  int batches = 1;
  std::uint64_t seed = 1;
};

struct FitPropensityArgs {
  std::string log, family = "sieve-logit", basis = "onehot", scores, out;
  double lambda = 0.0, clip = ope::kDefaultClipFloor;
};

struct FitRewardArgs {
  std::string log, basis = "onehot", link = "logistic", out;
  double lambda = 0.01;
};

struct EstimateArgs {
  std::string log, policy, score = "true", out;
  bool self_normalized = false;
};

struct VarianceArgs {
  std::string log, est, mu, out;
  double level = 0.95;
};

struct MonteCarloArgs {
  std::string config, out;
  int workers = 0;
};

struct ReportArgs {
  std::string summary, format = "md", out;
};

void RunSimulate(const SimulateArgs& a) {
  const auto env = ope::LoadEnv(a.env);
  const auto log = ope::RunLogging(env, a.rounds, a.batches, a.seed);
  if (a.out.empty() || a.out == "-") {
    ope::WriteLogCsv(std::cout, log);
  } else {
    ope::WriteLogCsvFile(a.out, log);
  }
}

void RunFitPropensity(const FitPropensityArgs& a) {
  const auto family = ope::ParsePropensityFamily(a.family);
  std::optional<ope::PropensityModel> model;
  if (family == ope::PropensityFamily::kExternalImport) {
    if (a.scores.empty()) throw ope::ValidationError("--family import needs --scores file.csv");
    model = ope::ReadImportedPropensityFile(a.scores, a.clip);
  } else {
    const auto log = LoadLog(a.log);
    ope::PropensitySettings s;
    s.family = family;
    s.basis = ope::BasisSpec::Parse(a.basis);
    s.lambda = a.lambda;
    s.clip = a.clip;
    model = ope::FitPropensity(log, s);
  }
  WriteText(a.out, model->ToJson().dump(2) + "\n");
}

void RunFitReward(const FitRewardArgs& a) {
  const auto log = LoadLog(a.log);
  const auto models = ope::FitRewardModels(log, ope::BasisSpec::Parse(a.basis), a.lambda,
                                           ope::ParseRewardLink(a.link));
  WriteText(a.out, models.ToJson().dump(2) + "\n");
}

void RunEstimate(const EstimateArgs& a) {
  const auto log = LoadLog(a.log);
  const auto policy_json = ReadJson(a.policy);
  const auto policy = ope::PolicySpec::FromJson(policy_json);
  json out;
  ope::ValueEstimate est;
  const std::string prefix = "estimated:";
  if (a.score.rfind(prefix, 0) == 0) {
    const auto model_json = ReadJson(a.score.substr(prefix.size()));
    const auto model = ope::PropensityModel::FromJson(model_json);
    est = ope::IpwEstimated(log, policy, model, a.self_normalized);
    out = ope::ToJson(est);
    out["propensity_model"] = model_json;
  } else if (a.score == "true") {
    est = ope::IpwTrue(log, policy, a.self_normalized);
    out = ope::ToJson(est);
  } else if (a.score == "realized") {
    est = ope::IpwRealized(log, policy, a.self_normalized);
    out = ope::ToJson(est);
  } else {
    throw ope::ValidationError("--score must be estimated:model.json, true or realized");
  }
  out["policy"] = policy_json;
  WriteText(a.out, out.dump(2) + "\n");
}

void RunVariance(const VarianceArgs& a) {
  const auto log = LoadLog(a.log);
  const auto est_json = ReadJson(a.est);
  const auto est = ope::ValueEstimateFromJson(est_json);
  if (!est_json.contains("policy")) throw ope::ValidationError("estimate file lacks its policy");
  const auto policy = ope::PolicySpec::FromJson(est_json.at("policy"));
  ope::VarianceEstimate var;
  switch (est.kind) {
    case ope::EstimatorKind::kHat:
    case ope::EstimatorKind::kHatSn: {
      if (!est_json.contains("propensity_model")) {
        throw ope::ValidationError("estimate file lacks its propensity model");
      }
      const auto p_hat = ope::PropensityModel::FromJson(est_json.at("propensity_model"));
      std::optional<ope::RewardModelSet> mu;
      if (!a.mu.empty()) {
        mu = ope::RewardModelSet::FromJson(ReadJson(a.mu));
      } else {
        // Default: ridge logistic per action on the propensity basis.
        const auto basis = p_hat.basis() ? p_hat.basis()->spec() : ope::BasisSpec{ope::BasisKind::kOneHot};
        mu = ope::FitRewardModels(log, basis, 0.01, ope::RewardLink::kLogistic);
      }
      var = ope::AvarEstimated(log, est.value, p_hat, *mu, policy);
      var.kind = est.kind;
      break;
    }
    case ope::EstimatorKind::kTilde:
    case ope::EstimatorKind::kTildeSn:
      var = ope::AvarTrue(log, est.value, policy);
      var.kind = est.kind;
      break;
    default:
      throw ope::ValidationError("no asymptotic-variance estimator exists for '" +
                                 ope::ToString(est.kind) + "'");
  }
  WriteText(a.out, ope::VarianceReport(est, var, a.level).dump(2) + "\n");
}

void RunMonteCarlo(const MonteCarloArgs& a) {
  auto config = ope::LoadExperimentConfig(a.config);
  if (a.workers > 0) config.workers = a.workers;
  const auto summary = ope::MonteCarlo(config);
  WriteText(a.out, ope::ToJson(summary).dump(2) + "\n");
}

void RunReport(const ReportArgs& a) {
  const auto summary = ope::ReplicationSummaryFromJson(ReadJson(a.summary));
  WriteText(a.out, ope::RenderReport(summary, ope::ParseReportFormat(a.format)));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Off-policy evaluation of logged contextual-bandit data"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate a batched-bandit log");
  s->add_option("--env", sim.env, "Built-in env (S1, S2, S3) or env JSON path")->required();
  s->add_option("--t", sim.rounds, "Rounds T")->capture_default_str();
  s->add_option("--b", sim.batches, "Batches B")->capture_default_str();
  s->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  s->add_option("--out", sim.out, "Output CSV (default stdout)");

  FitPropensityArgs fp;
  auto* f = app.add_subcommand("fit-propensity", "Estimate the logging propensity score");
  f->add_option("--log", fp.log, "Log CSV");
  f->add_option("--family", fp.family, "sieve-ls | sieve-logit | ridge | import | true")
      ->capture_default_str();
  f->add_option("--basis", fp.basis, "intercept | onehot[+batch] | poly:D[+batch]")
      ->capture_default_str();
  f->add_option("--lambda", fp.lambda, "Ridge penalty (ridge only)")->capture_default_str();
  f->add_option("--clip", fp.clip, "Clip floor applied at prediction")->capture_default_str();
  f->add_option("--scores", fp.scores, "round,p_0..p_m CSV for --family import");
  f->add_option("--out", fp.out, "Output model JSON (default stdout)");

  FitRewardArgs fr;
  auto* r = app.add_subcommand("fit-reward", "Fit per-action reward models (mu.json)");
  r->add_option("--log", fr.log, "Log CSV")->required();
  r->add_option("--basis", fr.basis, "Basis")->capture_default_str();
  r->add_option("--link", fr.link, "logistic | identity")->capture_default_str();
  r->add_option("--lambda", fr.lambda, "Ridge penalty")->capture_default_str();
  r->add_option("--out", fr.out, "Output JSON (default stdout)");

  EstimateArgs ea;
  auto* e = app.add_subcommand("estimate", "IPW value of a target policy");
  e->add_option("--log", ea.log, "Log CSV")->required();
  e->add_option("--policy", ea.policy, "Policy JSON")->required();
  e->add_option("--score", ea.score, "estimated:model.json | true | realized")->capture_default_str();
  e->add_flag("--self-normalized", ea.self_normalized, "Self-normalized variant");
  e->add_option("--out", ea.out, "Output JSON (default stdout)");

  VarianceArgs va;
  auto* v = app.add_subcommand("variance", "Asymptotic variance and confidence interval");
  v->add_option("--log", va.log, "Log CSV")->required();
  v->add_option("--est", va.est, "Estimate JSON from `estimate`")->required();
  v->add_option("--mu", va.mu, "Reward models JSON (default: ridge logistic on the score basis)");
  v->add_option("--level", va.level, "Confidence level")->capture_default_str();
  v->add_option("--out", va.out, "Output JSON (default stdout)");

  MonteCarloArgs ma;
  auto* m = app.add_subcommand("monte-carlo", "Run a Monte Carlo experiment");
  m->add_option("--config", ma.config, "Experiment JSON")->required();
  m->add_option("--workers", ma.workers, "Worker threads (overrides the config)");
  m->add_option("--out", ma.out, "Output summary JSON (default stdout)");

  ReportArgs ra;
  auto* p = app.add_subcommand("report", "Render a Monte Carlo summary");
  p->add_option("--summary", ra.summary, "Summary JSON")->required();
  p->add_option("--format", ra.format, "md | csv | json")->capture_default_str();
  p->add_option("--out", ra.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (s->parsed()) RunSimulate(sim);
    if (f->parsed()) {
      if (fp.log.empty() && fp.family != "import") throw ope::ValidationError("--log is required");
      RunFitPropensity(fp);
    }
    if (r->parsed()) RunFitReward(fr);
    if (e->parsed()) RunEstimate(ea);
    if (v->parsed()) RunVariance(va);
    if (m->parsed()) RunMonteCarlo(ma);
    if (p->parsed()) RunReport(ra);
  } catch (const ope::ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitValidation;
  } catch (const ope::NumericalError& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
