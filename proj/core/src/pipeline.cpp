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

#include "ope/pipeline.hpp"

#include <cmath>
#include <set>

#include "ope/error.hpp"

namespace ope {

BatchSplit SplitBatches(int num_batches, const BestActionDirective& d) {
  BatchSplit s;
  s.train_last = static_cast<int>(std::lround(d.train_fraction * num_batches));
  const int eval = static_cast<int>(std::lround(d.eval_fraction * num_batches));
  s.eval_last = std::min(num_batches, s.train_last + eval);
  if (s.train_last < 1) throw ValidationError("train partition is empty; use more batches");
  if (s.eval_last <= s.train_last) throw ValidationError("eval partition is empty; use more batches");
  return s;
}

RewardModelSet FitBestActionRewards(const BanditLog& train, std::span<const FeatureVector> contexts,
                                    const RewardSettings& reward, const BasisSpec& basis) {
  std::vector<RewardModel> models;
  for (int a = 0; a < train.num_actions(); ++a) {
    std::set<FeatureVector> seen;
    for (const auto& r : train.records) {
      if (r.action == a) seen.insert(r.context.features);
    }
    bool complete = true;
    for (const auto& f : contexts) complete = complete && seen.count(f) > 0;
    if (complete) {
      models.push_back(FitRewardModel(train, a, basis, reward.lambda, reward.link));
    } else {
      auto m = FitRewardModel(train, a, BasisSpec{BasisKind::kIntercept}, reward.lambda, reward.link);
      m.set_fallback(true);
      models.push_back(std::move(m));
    }
  }
  return RewardModelSet(std::move(models));
}

PipelineResult BestActionPipeline(const BanditLog& log, const BestActionDirective& directive,
                                  const PropensitySettings& propensity,
                                  const RewardSettings& reward, const BasisSpec& reward_basis) {
  const auto split = SplitBatches(log.num_batches, directive);
  const BanditLog train = SliceBatches(log, 1, split.train_last);
  const BanditLog eval = SliceBatches(log, split.train_last + 1, split.eval_last);
  if (train.empty() || eval.empty()) throw ValidationError("a partition of the split has no records");

  PipelineResult out;
  out.train_size = train.size();
  out.eval_size = eval.size();

  // Only train rewards enter pi*; contexts come from the whole log.
  const auto contexts = DistinctContexts(log);
  const auto train_rewards = FitBestActionRewards(train, contexts, reward, reward_basis);
  out.reward_fallback = train_rewards.any_fallback();
  out.best_action = BestActionPolicy(train_rewards, contexts);

  const auto p_hat = FitPropensity(eval, propensity);
  const auto mu_hat = FitRewardModels(eval, reward_basis, reward.lambda, reward.link);

  out.best_value = IpwEstimated(eval, out.best_action, p_hat, false);
  out.best_variance = AvarEstimated(eval, out.best_value.value, p_hat, mu_hat, out.best_action);

  const int m1 = eval.num_actions();
  const auto logging = PolicySpec::FromFunction(
      m1, [p_hat](const Context& x) { return p_hat.Predict(x); }, false, "estimated logging policy");
  out.logging_value = IpwEstimated(eval, logging, p_hat, false);
  // pi = phat moves with the score, and that derivative cancels alpha
  // exactly, so the influence term is g alone (mu = 0).
  std::vector<RewardModel> zero;
  for (int a = 0; a < m1; ++a) zero.push_back(RewardModel::Constant(a, 0.0));
  out.logging_variance =
      AvarEstimated(eval, out.logging_value.value, p_hat, RewardModelSet(std::move(zero)), logging);
  return out;
}

}  // namespace ope
