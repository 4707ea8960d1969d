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

#ifndef OPE_PIPELINE_HPP_
#define OPE_PIPELINE_HPP_

#include <cstddef>
#include <utility>

#include "ope/estimators.hpp"
#include "ope/experiment.hpp"
#include "ope/policy.hpp"
#include "ope/types.hpp"
#include "ope/variance.hpp"

namespace ope {

// Earliest batches train, the following ones evaluate.
struct BatchSplit {
  int train_last = 1;  // train: batches [1, train_last]
  int eval_last = 2;   // eval:  batches [train_last + 1, eval_last]
};

// Throws ValidationError if either side would be empty.
BatchSplit SplitBatches(int num_batches, const BestActionDirective& directive);

struct PipelineResult {
  PolicySpec best_action = PolicySpec::Uniform(2);
  bool reward_fallback = false;  // Some action fell back to an intercept-only fit.
  std::size_t train_size = 0;
  std::size_t eval_size = 0;
  ValueEstimate best_value;
  VarianceEstimate best_variance;
  ValueEstimate logging_value;
  VarianceEstimate logging_variance;
};

// Best-action policy from train-partition reward models, then V-hat and
// AVar-hat for it and for the logging policy (pi = phat) on the eval
// partition. Nuisances on the eval side are refit there.
PipelineResult BestActionPipeline(const BanditLog& log, const BestActionDirective& directive,
                                  const PropensitySettings& propensity,
                                  const RewardSettings& reward, const BasisSpec& reward_basis);

// Reward models for the best-action policy. An action that is missing from
// some context of `contexts` in `train` gets an intercept-only fit, flagged.
RewardModelSet FitBestActionRewards(const BanditLog& train, std::span<const FeatureVector> contexts,
                                    const RewardSettings& reward, const BasisSpec& basis);

}  // namespace ope

#endif  // OPE_PIPELINE_HPP_
