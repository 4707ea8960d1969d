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

#ifndef OPE_POLICY_HPP_
#define OPE_POLICY_HPP_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ope/types.hpp"

namespace ope {

// A counterfactual policy: for each context, a vector of signed action
// weights whose sum is at most one. Degenerate, stochastic and
// treatment-effect (e.g. +1 on treated, -1 on control) policies are all
// plain instances.
//
// Three representations are supported: context-independent weights, a
// lookup table keyed by the discrete feature vector (batch id ignored), and
// an arbitrary weight function (used for model-backed policies, e.g. the
// estimated logging policy). Only the first two serialize to JSON.
class PolicySpec {
 public:
  using WeightFunction = std::function<std::vector<double>(const Context&)>;

  static PolicySpec Constant(std::vector<double> weights);
  static PolicySpec Degenerate(int action, int num_actions);
  static PolicySpec Uniform(int num_actions);
  // pi(treated|x) = 1, pi(control|x) = -1.
  static PolicySpec TreatmentEffect(int treated, int control, int num_actions);
  static PolicySpec Table(int num_actions,
                          std::map<FeatureVector, std::vector<double>> entries,
                          std::optional<std::vector<double>> fallback = std::nullopt);
  // `normalized` declares that every returned vector sums to one; returned
  // vectors are still checked against the sum <= 1 constraint on each call.
  static PolicySpec FromFunction(int num_actions, WeightFunction weights,
                                 bool normalized, std::string description);

  // pi(.|x). Throws ValidationError when a table policy does not cover the
  // context or the feature dimensionality does not match.
  std::vector<double> Probabilities(const Context& context) const;

  int num_actions() const { return num_actions_; }
  // True iff sum_a pi(a|x) = 1 for every context; required by the
  // self-normalized estimators.
  bool normalized() const { return normalized_; }
  bool serializable() const { return !function_; }
  const std::string& description() const { return description_; }

  // Table entries (empty for non-table policies).
  const std::map<FeatureVector, std::vector<double>>& table() const { return table_; }

  nlohmann::json ToJson() const;
  static PolicySpec FromJson(const nlohmann::json& j);

 private:
  PolicySpec() = default;
  void Finalize();

  int num_actions_ = 0;
  bool normalized_ = false;
  std::string description_;
  std::optional<std::vector<double>> constant_;
  std::map<FeatureVector, std::vector<double>> table_;
  std::optional<std::vector<double>> fallback_;
  std::optional<std::size_t> feature_dim_;
  std::shared_ptr<const WeightFunction> function_;
};

// Free-function form of PolicySpec::Probabilities.
inline std::vector<double> PolicyProbabilities(const PolicySpec& policy,
                                               const Context& context) {
  return policy.Probabilities(context);
}

}  // namespace ope

#endif  // OPE_POLICY_HPP_
