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

#include "ope/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>

#include "ope/error.hpp"

namespace ope {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

bool IsBuiltinName(const std::string& s) {
  std::string upper = s;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  const auto names = BuiltinEnvNames();
  return std::find(names.begin(), names.end(), upper) != names.end();
}

SyntheticEnv ParseEnv(const json& j, const std::string& base_dir) {
  if (j.is_object()) return EnvFromJson(j);
  if (!j.is_string()) throw ValidationError("config 'env' must be a name, a path or an object");
  const auto s = j.get<std::string>();
  if (IsBuiltinName(s)) return BuiltinEnv(s);
  fs::path p(s);
  if (p.is_relative()) p = fs::path(base_dir) / p;
  return LoadEnv(p.string());
}

PropensitySettings ParsePropensity(const json& j) {
  PropensitySettings s;
  if (j.contains("family")) s.family = ParsePropensityFamily(j.at("family").get<std::string>());
  if (j.contains("basis")) s.basis = BasisSpec::Parse(j.at("basis").get<std::string>());
  s.lambda = j.value("lambda", s.lambda);
  s.clip = j.value("clip", s.clip);
  return s;
}

RewardSettings ParseReward(const json& j) {
  RewardSettings s;
  const auto source = j.value("source", std::string("fit"));
  if (source == "fit") {
    s.source = RewardSource::kFit;
  } else if (source == "exact") {
    s.source = RewardSource::kExact;
  } else {
    throw ValidationError("reward_model.source must be 'fit' or 'exact'");
  }
  if (j.contains("link")) s.link = ParseRewardLink(j.at("link").get<std::string>());
  s.lambda = j.value("lambda", s.lambda);
  if (j.contains("basis")) s.basis = BasisSpec::Parse(j.at("basis").get<std::string>());
  return s;
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (replications < 1) throw ValidationError("replications must be >= 1");
  if (rounds < 1) throw ValidationError("T must be >= 1");
  if (batches < 1) throw ValidationError("B must be >= 1");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("level must lie in (0, 1)");
  if (estimators.empty() && !best_action()) throw ValidationError("no estimators requested");
  if (propensity.family == PropensityFamily::kExternalImport) {
    throw ValidationError("imported propensities are not available inside a simulation");
  }
  if (propensity.lambda < 0.0 || reward.lambda < 0.0) throw ValidationError("lambda must be >= 0");
  if (const auto* d = std::get_if<BestActionDirective>(&policy)) {
    const bool ok = d->train_fraction > 0.0 && d->train_fraction < 1.0 && d->eval_fraction > 0.0 &&
                    d->eval_fraction < 1.0 && d->train_fraction + d->eval_fraction <= 1.0 + 1e-12;
    if (!ok) throw ValidationError("split fractions must lie in (0, 1) and sum to at most 1");
  } else if (std::get<PolicySpec>(policy).num_actions() != env.num_actions()) {
    throw ValidationError("policy and environment disagree on the number of actions");
  }
}

ExperimentConfig ExperimentConfigFromJson(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ValidationError("experiment config must be a JSON object");
  ExperimentConfig c;
  try {
    if (!j.contains("env")) throw ValidationError("config needs 'env'");
    c.env = ParseEnv(j.at("env"), base_dir);
    c.policy = PolicySpec::Degenerate(std::min(1, c.env.num_actions() - 1), c.env.num_actions());
    if (j.contains("policy")) {
      const auto& p = j.at("policy");
      if (p.is_object() && p.value("kind", std::string()) == "best_action") {
        BestActionDirective d;
        d.train_fraction = p.value("train", d.train_fraction);
        d.eval_fraction = p.value("eval", 1.0 - d.train_fraction);
        c.policy = d;
      } else {
        c.policy = PolicySpec::FromJson(p);
      }
    }
    c.rounds = j.value("T", c.rounds);
    c.batches = j.value("B", c.best_action() ? 2 : c.batches);
    c.replications = j.value("replications", c.replications);
    c.seed = j.value("seed", c.seed);
    if (j.contains("estimators")) {
      c.estimators.clear();
      for (const auto& e : j.at("estimators")) c.estimators.push_back(ParseEstimatorKind(e.get<std::string>()));
    }
    if (j.contains("propensity")) c.propensity = ParsePropensity(j.at("propensity"));
    if (j.contains("reward_model")) c.reward = ParseReward(j.at("reward_model"));
    c.level = j.value("level", c.level);
    c.workers = j.value("workers", c.workers);
    c.keep_values = j.value("keep_values", c.keep_values);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed experiment config: ") + e.what());
  }
  c.Validate();
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return ExperimentConfigFromJson(j, fs::path(path).parent_path().string());
}

json ToJson(const ExperimentConfig& c) {
  json j;
  j["env"] = EnvToJson(c.env);
  if (const auto* d = std::get_if<BestActionDirective>(&c.policy)) {
    j["policy"] = {{"kind", "best_action"}, {"train", d->train_fraction}, {"eval", d->eval_fraction}};
  } else {
    j["policy"] = std::get<PolicySpec>(c.policy).ToJson();
  }
  j["T"] = c.rounds;
  j["B"] = c.batches;
  j["replications"] = c.replications;
  j["seed"] = c.seed;
  j["estimators"] = json::array();
  for (auto k : c.estimators) j["estimators"].push_back(ToString(k));
  j["propensity"] = {{"family", ToString(c.propensity.family)},
                     {"basis", c.propensity.basis.ToString()},
                     {"lambda", c.propensity.lambda},
                     {"clip", c.propensity.clip}};
  j["reward_model"] = {{"source", c.reward.source == RewardSource::kExact ? "exact" : "fit"},
                       {"link", ToString(c.reward.link)},
                       {"lambda", c.reward.lambda},
                       {"basis", c.reward_basis().ToString()}};
  j["level"] = c.level;
  j["workers"] = c.workers;
  return j;
}

PropensityModel FitPropensity(const BanditLog& log, const PropensitySettings& s) {
  PropensityFitOptions options;
  options.clip_floor = s.clip;
  switch (s.family) {
    case PropensityFamily::kSieveLs: return FitSieveLs(log, s.basis, options);
    case PropensityFamily::kSieveLogit: return FitSieveLogit(log, s.basis, options);
    case PropensityFamily::kRidgeLogistic:
      return FitRidgeLogisticPropensity(log, s.basis, s.lambda, options);
    case PropensityFamily::kExactTrue: return ExactTruePropensity(log, s.clip);
    case PropensityFamily::kExternalImport: break;
  }
  throw ValidationError("propensity family cannot be fitted from a log");
}

RewardModelSet ExactRewardModels(const SyntheticEnv& env) {
  std::vector<RewardModel> models;
  for (int a = 0; a < env.num_actions(); ++a) {
    std::map<FeatureVector, double> means;
    for (int c = 0; c < env.num_contexts(); ++c) means[env.context(c).features] = env.arm(c, a).mean;
    models.push_back(RewardModel::Table(a, std::move(means)));
  }
  return RewardModelSet(std::move(models));
}

RewardModelSet FitRewards(const BanditLog& log, const SyntheticEnv& env, const RewardSettings& s,
                          const BasisSpec& basis) {
  if (s.source == RewardSource::kExact) return ExactRewardModels(env);
  return FitRewardModels(log, basis, s.lambda, s.link);
}

}  // namespace ope
