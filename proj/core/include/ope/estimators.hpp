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

#ifndef OPE_ESTIMATORS_HPP_
#define OPE_ESTIMATORS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ope/policy.hpp"
#include "ope/propensity.hpp"
#include "ope/reward_model.hpp"
#include "ope/types.hpp"

namespace ope {

// hat:   IPW with an estimated propensity score.
// tilde: IPW with the true logging propensity p0(x).
// ddot:  IPW with the realized per-round probability vector p_t.
// The _sn variants divide by the sample mean of the weights.
enum class EstimatorKind { kHat, kHatSn, kTilde, kTildeSn, kDdot, kDdotSn };

std::string ToString(EstimatorKind kind);
EstimatorKind ParseEstimatorKind(const std::string& text);
bool IsSelfNormalized(EstimatorKind kind);

struct WeightDiagnostics {
  std::size_t clipped = 0;  // Rounds whose chosen-action score was floored.
  double max_weight = 0.0;  // max_t |pi(A_t|X_t) / p_{A_t}|
};

struct ValueEstimate {
  double value = 0.0;
  EstimatorKind kind = EstimatorKind::kHat;
  std::size_t sample_size = 0;
  double sn_denominator = 1.0;
  WeightDiagnostics diagnostics;
};

nlohmann::json ToJson(const ValueEstimate& estimate);
ValueEstimate ValueEstimateFromJson(const nlohmann::json& j);

// (1/T) sum_t Y_t pi(A_t|X_t) / phat_{A_t}(X_t), optionally self-normalized.
// Self-normalization requires a normalized policy.
ValueEstimate IpwEstimated(const BanditLog& log, const PolicySpec& policy,
                           const PropensityModel& propensity, bool self_normalized);

// As IpwEstimated with the logged true propensities. Throws if any record
// lacks one.
ValueEstimate IpwTrue(const BanditLog& log, const PolicySpec& policy, bool self_normalized);

// As IpwEstimated with the logged realized propensities. Throws if any
// record lacks one or gives the chosen action zero probability.
ValueEstimate IpwRealized(const BanditLog& log, const PolicySpec& policy, bool self_normalized);

// Degenerate table policy choosing argmax_a muhat(a|x) on each listed context
// (lowest action on ties).
PolicySpec BestActionPolicy(const RewardModelSet& rewards, std::span<const FeatureVector> contexts);

// Distinct feature vectors in a log, sorted.
std::vector<FeatureVector> DistinctContexts(const BanditLog& log);

}  // namespace ope

#endif  // OPE_ESTIMATORS_HPP_
