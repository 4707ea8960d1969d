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

#ifndef OPE_REWARD_MODEL_HPP_
#define OPE_REWARD_MODEL_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ope/basis.hpp"
#include "ope/types.hpp"

namespace ope {

enum class RewardLink { kLogistic, kIdentity };

std::string ToString(RewardLink link);
RewardLink ParseRewardLink(const std::string& text);

// Estimated conditional mean reward mu(a|x) for a single action.
class RewardModel {
 public:
  // Known means keyed by feature vector (batch ignored).
  static RewardModel Table(int action, std::map<FeatureVector, double> means);
  static RewardModel Constant(int action, double mean);

  int action() const { return action_; }
  RewardLink link() const { return link_; }
  double lambda() const { return lambda_; }
  const std::optional<Basis>& basis() const { return basis_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  // Set when the fit fell back to a simpler basis.
  bool fallback() const { return fallback_; }
  void set_fallback(bool fallback) { fallback_ = fallback; }

  double Predict(const Context& context) const;

  nlohmann::json ToJson() const;
  static RewardModel FromJson(const nlohmann::json& j);

 private:
  friend RewardModel FitRewardModel(const BanditLog&, int, const BasisSpec&, double, RewardLink);
  friend RewardModel FitRewardModelOnBasis(const BanditLog&, int, const Basis&, double, RewardLink);

  int action_ = 0;
  RewardLink link_ = RewardLink::kIdentity;
  double lambda_ = 0.0;
  std::optional<Basis> basis_;
  Eigen::VectorXd coefficients_;
  std::map<FeatureVector, double> table_;
  std::optional<double> constant_;
  bool fallback_ = false;
};

// One reward model per action, indexed by action.
class RewardModelSet {
 public:
  RewardModelSet() = default;
  explicit RewardModelSet(std::vector<RewardModel> models);

  int num_actions() const { return static_cast<int>(models_.size()); }
  const RewardModel& model(int action) const { return models_.at(action); }
  double Predict(int action, const Context& context) const { return model(action).Predict(context); }
  std::vector<double> PredictAll(const Context& context) const;
  bool any_fallback() const;

  nlohmann::json ToJson() const;  // {"models": [...]}
  static RewardModelSet FromJson(const nlohmann::json& j);

 private:
  std::vector<RewardModel> models_;
};

// Regression of Y on the basis over the records with action == `action`.
// Identity link: ridge least squares. Logistic link: penalized logistic
// regression on rewards in [0, 1]. The intercept column is never penalized.
// Throws ValidationError ("no observations for action a") on an empty
// subsample.
RewardModel FitRewardModel(const BanditLog& log, int action, const BasisSpec& basis,
                           double lambda, RewardLink link);
// Same, with a basis instantiated elsewhere (e.g. on a larger context set).
RewardModel FitRewardModelOnBasis(const BanditLog& log, int action, const Basis& basis,
                                  double lambda, RewardLink link);

// Fits every action. The basis is instantiated on the whole log so all
// actions share columns.
RewardModelSet FitRewardModels(const BanditLog& log, const BasisSpec& basis, double lambda,
                               RewardLink link);

}  // namespace ope

#endif  // OPE_REWARD_MODEL_HPP_
