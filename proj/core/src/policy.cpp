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

#include "ope/policy.hpp"

#include <cmath>
#include <sstream>

#include "ope/error.hpp"
#include "ope/numeric.hpp"

namespace ope {
namespace {

std::string FormatFeatures(const FeatureVector& f) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
  os << ')';
  return os.str();
}

double CheckWeights(const std::vector<double>& w, int num_actions,
                    const std::string& where) {
  if (static_cast<int>(w.size()) != num_actions) {
    throw ValidationError("policy weights for " + where + " have " +
                          std::to_string(w.size()) + " entries, expected " +
                          std::to_string(num_actions));
  }
  for (double v : w) {
    if (!std::isfinite(v)) throw ValidationError("non-finite policy weight for " + where);
  }
  const double sum = PairwiseSum(w);
  if (sum > 1.0 + kProbabilitySumTolerance) {
    throw ValidationError("policy weights for " + where + " sum to " +
                          std::to_string(sum) + " > 1");
  }
  return sum;
}

bool SumsToOne(double s) { return std::abs(s - 1.0) <= kProbabilitySumTolerance; }

}  // namespace

PolicySpec PolicySpec::Constant(std::vector<double> weights) {
  PolicySpec p;
  p.num_actions_ = static_cast<int>(weights.size());
  p.constant_ = std::move(weights);
  p.description_ = "constant";
  p.Finalize();
  return p;
}

PolicySpec PolicySpec::Degenerate(int action, int num_actions) {
  if (action < 0 || action >= num_actions) {
    throw ValidationError("degenerate policy action out of range");
  }
  std::vector<double> w(num_actions, 0.0);
  w[action] = 1.0;
  auto p = Constant(std::move(w));
  p.description_ = "always action " + std::to_string(action);
  return p;
}

PolicySpec PolicySpec::Uniform(int num_actions) {
  if (num_actions < 2) throw ValidationError("uniform policy needs at least two actions");
  auto p = Constant(std::vector<double>(num_actions, 1.0 / num_actions));
  p.description_ = "uniform";
  return p;
}

PolicySpec PolicySpec::TreatmentEffect(int treated, int control, int num_actions) {
  if (treated == control || treated < 0 || control < 0 || treated >= num_actions ||
      control >= num_actions) {
    throw ValidationError("treatment-effect policy needs two distinct valid actions");
  }
  std::vector<double> w(num_actions, 0.0);
  w[treated] = 1.0;
  w[control] = -1.0;
  auto p = Constant(std::move(w));
  p.description_ = "effect of action " + std::to_string(treated) + " vs " +
                   std::to_string(control);
  return p;
}

PolicySpec PolicySpec::Table(int num_actions,
                             std::map<FeatureVector, std::vector<double>> entries,
                             std::optional<std::vector<double>> fallback) {
  if (entries.empty() && !fallback) throw ValidationError("empty policy table");
  PolicySpec p;
  p.num_actions_ = num_actions;
  p.table_ = std::move(entries);
  p.fallback_ = std::move(fallback);
  p.description_ = "table";
  p.Finalize();
  return p;
}

PolicySpec PolicySpec::FromFunction(int num_actions, WeightFunction weights,
                                    bool normalized, std::string description) {
  if (num_actions < 2) throw ValidationError("policy needs at least two actions");
  PolicySpec p;
  p.num_actions_ = num_actions;
  p.function_ = std::make_shared<const WeightFunction>(std::move(weights));
  p.normalized_ = normalized;
  p.description_ = std::move(description);
  return p;
}

void PolicySpec::Finalize() {
  if (num_actions_ < 2) throw ValidationError("policy needs at least two actions");
  bool normalized = true;
  if (constant_) {
    normalized = SumsToOne(CheckWeights(*constant_, num_actions_, "all contexts"));
  }
  for (const auto& [features, w] : table_) {
    if (feature_dim_ && *feature_dim_ != features.size()) {
      throw ValidationError("policy table mixes feature dimensionalities");
    }
    feature_dim_ = features.size();
    normalized = SumsToOne(CheckWeights(w, num_actions_, FormatFeatures(features))) &&
                 normalized;
  }
  if (fallback_) {
    normalized = SumsToOne(CheckWeights(*fallback_, num_actions_, "fallback")) &&
                 normalized;
  }
  normalized_ = normalized;
}

std::vector<double> PolicySpec::Probabilities(const Context& context) const {
  if (constant_) return *constant_;
  if (function_) {
    auto w = (*function_)(context);
    CheckWeights(w, num_actions_, FormatFeatures(context.features));
    return w;
  }
  if (feature_dim_ && *feature_dim_ != context.features.size()) {
    throw ValidationError("context has " + std::to_string(context.features.size()) +
                          " features, policy expects " + std::to_string(*feature_dim_));
  }
  if (auto it = table_.find(context.features); it != table_.end()) return it->second;
  if (fallback_) return *fallback_;
  throw ValidationError("context not covered by policy: " +
                        FormatFeatures(context.features));
}

nlohmann::json PolicySpec::ToJson() const {
  if (function_) {
    throw ValidationError("policy '" + description_ + "' is function-backed and cannot be serialized");
  }
  nlohmann::json j;
  j["num_actions"] = num_actions_;
  if (constant_) {
    j["kind"] = "constant";
    j["weights"] = *constant_;
    return j;
  }
  j["kind"] = "table";
  auto entries = nlohmann::json::array();
  for (const auto& [features, w] : table_) {
    entries.push_back({{"features", features}, {"weights", w}});
  }
  j["entries"] = std::move(entries);
  if (fallback_) j["default"] = *fallback_;
  return j;
}

PolicySpec PolicySpec::FromJson(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
      return Constant(j.at("weights").get<std::vector<double>>());
    }
    const int num_actions = j.at("num_actions").get<int>();
    if (kind == "degenerate") return Degenerate(j.at("action").get<int>(), num_actions);
    if (kind == "uniform") return Uniform(num_actions);
    if (kind == "treatment_effect") {
      return TreatmentEffect(j.at("treated").get<int>(), j.at("control").get<int>(),
                             num_actions);
    }
    if (kind == "table") {
      std::map<FeatureVector, std::vector<double>> entries;
      for (const auto& e : j.at("entries")) {
        entries[e.at("features").get<FeatureVector>()] =
            e.at("weights").get<std::vector<double>>();
      }
      std::optional<std::vector<double>> fallback;
      if (j.contains("default")) fallback = j.at("default").get<std::vector<double>>();
      return Table(num_actions, std::move(entries), std::move(fallback));
    }
    throw ValidationError("unknown policy kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed policy JSON: ") + e.what());
  }
}

}  // namespace ope
