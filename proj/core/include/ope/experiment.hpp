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

#ifndef OPE_EXPERIMENT_HPP_
#define OPE_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ope/basis.hpp"
#include "ope/environment.hpp"
#include "ope/estimators.hpp"
#include "ope/policy.hpp"
#include "ope/propensity.hpp"
#include "ope/reward_model.hpp"
#include "ope/types.hpp"

namespace ope {

struct PropensitySettings {
  PropensityFamily family = PropensityFamily::kSieveLogit;
  BasisSpec basis{BasisKind::kOneHot};
  double lambda = 0.0;  // ridge only
  double clip = kDefaultClipFloor;
};

enum class RewardSource { kFit, kExact };

struct RewardSettings {
  RewardSource source = RewardSource::kFit;
  RewardLink link = RewardLink::kLogistic;
  double lambda = 0.01;
  std::optional<BasisSpec> basis;  // Defaults to the propensity basis.
};

// Evaluate argmax-of-muhat built on the earliest batches, on the batches
// that follow.
struct BestActionDirective {
  double train_fraction = 0.5;
  double eval_fraction = 0.5;
};

struct ExperimentConfig {
  SyntheticEnv env = MakeS1();
  std::variant<PolicySpec, BestActionDirective> policy = PolicySpec::Degenerate(1, 2);
  std::size_t rounds = 1000;
  int batches = 1;
  int replications = 1;
  std::uint64_t seed = 1;
  std::vector<EstimatorKind> estimators{EstimatorKind::kHat, EstimatorKind::kTilde};
  PropensitySettings propensity;
  RewardSettings reward;
  double level = 0.95;
  int workers = 1;
  bool keep_values = false;  // Emit per-replication values in the summary.

  bool best_action() const { return std::holds_alternative<BestActionDirective>(policy); }
  const BasisSpec& reward_basis() const { return reward.basis ? *reward.basis : propensity.basis; }

  // Throws ValidationError on any violated invariant.
  void Validate() const;
};

// Relative env paths resolve against `base_dir`.
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j, const std::string& base_dir = ".");
ExperimentConfig LoadExperimentConfig(const std::string& path);
nlohmann::json ToJson(const ExperimentConfig& config);

// Nuisance fits as configured.
PropensityModel FitPropensity(const BanditLog& log, const PropensitySettings& settings);
RewardModelSet FitRewards(const BanditLog& log, const SyntheticEnv& env,
                          const RewardSettings& settings, const BasisSpec& basis);
// mu(a|x) read off the environment.
RewardModelSet ExactRewardModels(const SyntheticEnv& env);

}  // namespace ope

#endif  // OPE_EXPERIMENT_HPP_
