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

#include <filesystem>
#include <fstream>
#include <map>

#include "ope/environment.hpp"
#include "ope/error.hpp"

namespace ope {
namespace {

using nlohmann::json;

const char* SourceName(EstimateSource s) {
  return s == EstimateSource::kSample ? "sample" : "population";
}

EstimateSource ParseSource(const json& params) {
  const std::string s = params.value("estimates", std::string("population"));
  if (s == "sample") return EstimateSource::kSample;
  if (s == "population") return EstimateSource::kPopulation;
  throw ValidationError("unknown estimate source '" + s + "'");
}

json LoggingToJson(const LoggingRule& rule) {
  return std::visit(
      [](const auto& r) -> json {
        using Rule = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<Rule, UniformRule>) {
          return {{"rule", "uniform"}, {"params", json::object()}};
        } else if constexpr (std::is_same_v<Rule, EpsGreedyRule>) {
          return {{"rule", "eps_greedy"},
                  {"params", {{"eps", r.eps}, {"estimates", SourceName(r.estimates)}}}};
        } else if constexpr (std::is_same_v<Rule, ThompsonRule>) {
          return {{"rule", "thompson"},
                  {"params", {{"num_draws", r.num_draws}, {"estimates", SourceName(r.estimates)}}}};
        } else {
          json mixtures = json::array();
          for (std::size_t c = 0; c < r.per_context.size(); ++c) {
            json vectors = json::array();
            json weights = json::array();
            for (const auto& comp : r.per_context[c]) {
              vectors.push_back(comp.probabilities);
              weights.push_back(comp.weight);
            }
            mixtures.push_back({{"context_index", c}, {"vectors", vectors}, {"weights", weights}});
          }
          return {{"rule", "fixed_stochastic"}, {"params", {{"mixtures", mixtures}}}};
        }
      },
      rule);
}

LoggingRule LoggingFromJson(const json& j, int num_contexts) {
  const std::string rule = j.at("rule").get<std::string>();
  const json params = j.value("params", json::object());
  if (rule == "uniform") return UniformRule{};
  if (rule == "eps_greedy") {
    EpsGreedyRule r;
    const auto& eps = params.at("eps");
    r.eps = eps.is_array() ? eps.get<std::vector<double>>() : std::vector<double>{eps.get<double>()};
    r.estimates = ParseSource(params);
    return r;
  }
  if (rule == "thompson") {
    ThompsonRule r;
    r.num_draws = params.value("num_draws", 10000);
    r.estimates = ParseSource(params);
    return r;
  }
  if (rule == "fixed_stochastic") {
    FixedStochasticRule r;
    r.per_context.resize(static_cast<std::size_t>(num_contexts));
    for (const auto& mix : params.at("mixtures")) {
      const auto c = mix.at("context_index").get<std::size_t>();
      if (c >= r.per_context.size()) throw ValidationError("mixture context_index out of range");
      const auto vectors = mix.at("vectors").get<std::vector<ProbabilityVector>>();
      std::vector<double> weights =
          mix.contains("weights") ? mix.at("weights").get<std::vector<double>>()
                                  : std::vector<double>(vectors.size(), 1.0 / vectors.size());
      if (weights.size() != vectors.size()) {
        throw ValidationError("mixture needs one weight per vector");
      }
      for (std::size_t k = 0; k < vectors.size(); ++k) {
        r.per_context[c].push_back({vectors[k], weights[k]});
      }
    }
    return r;
  }
  throw ValidationError("unknown logging rule '" + rule + "'");
}

}  // namespace

json EnvToJson(const SyntheticEnv& env) {
  json contexts = json::array();
  for (const auto& c : env.contexts()) {
    contexts.push_back({{"probability", c.probability}, {"features", c.features}});
  }
  json arms = json::array();
  for (int c = 0; c < env.num_contexts(); ++c) {
    for (int a = 0; a < env.num_actions(); ++a) {
      const auto& arm = env.arm(c, a);
      json j = {{"context_index", c}, {"action", a}, {"mean", arm.mean}};
      if (arm.distribution == RewardDistribution::kBernoulli) {
        j["dist"] = "bernoulli";
      } else {
        j["dist"] = "gaussian";
        j["var"] = arm.variance;
      }
      arms.push_back(std::move(j));
    }
  }
  return {{"name", env.name()},
          {"contexts", contexts},
          {"arms", arms},
          {"logging", LoggingToJson(env.logging())}};
}

SyntheticEnv EnvFromJson(const json& j) {
  try {
    std::vector<EnvContext> contexts;
    for (const auto& c : j.at("contexts")) {
      contexts.push_back({c.at("probability").get<double>(),
                          c.value("features", FeatureVector{})});
    }
    const int num_contexts = static_cast<int>(contexts.size());
    std::map<std::pair<int, int>, ArmSpec> specs;
    int max_action = -1;
    for (const auto& arm : j.at("arms")) {
      const int c = arm.at("context_index").get<int>();
      const int a = arm.at("action").get<int>();
      if (c < 0 || c >= num_contexts || a < 0) {
        throw ValidationError("arm context_index/action out of range");
      }
      ArmSpec spec;
      const std::string dist = arm.value("dist", std::string("bernoulli"));
      if (dist == "bernoulli") {
        spec.distribution = RewardDistribution::kBernoulli;
      } else if (dist == "gaussian") {
        spec.distribution = RewardDistribution::kGaussian;
        spec.variance = arm.at("var").get<double>();
      } else {
        throw ValidationError("unknown reward distribution '" + dist + "'");
      }
      spec.mean = arm.at("mean").get<double>();
      if (!specs.emplace(std::make_pair(c, a), spec).second) {
        throw ValidationError("duplicate arm specification");
      }
      max_action = std::max(max_action, a);
    }
    std::vector<std::vector<ArmSpec>> arms(static_cast<std::size_t>(num_contexts));
    for (int c = 0; c < num_contexts; ++c) {
      for (int a = 0; a <= max_action; ++a) {
        auto it = specs.find({c, a});
        if (it == specs.end()) {
          throw ValidationError("missing arm for context " + std::to_string(c) + ", action " +
                                std::to_string(a));
        }
        arms[static_cast<std::size_t>(c)].push_back(it->second);
      }
    }
    return SyntheticEnv(j.value("name", std::string("custom")), std::move(contexts),
                        std::move(arms), LoggingFromJson(j.at("logging"), num_contexts));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed environment JSON: ") + e.what());
  }
}

SyntheticEnv LoadEnv(const std::string& name_or_path) {
  for (const auto& name : BuiltinEnvNames()) {
    if (name_or_path.size() == name.size() &&
        std::equal(name.begin(), name.end(), name_or_path.begin(),
                   [](char x, char y) { return std::toupper(x) == std::toupper(y); })) {
      return BuiltinEnv(name);
    }
  }
  std::ifstream in(name_or_path);
  if (!in) throw ValidationError("cannot open environment file '" + name_or_path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("cannot parse environment file '" + name_or_path + "': " + e.what());
  }
  return EnvFromJson(j);
}

}  // namespace ope
