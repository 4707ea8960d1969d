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

#ifndef OPE_VARIANCE_HPP_
#define OPE_VARIANCE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ope/estimators.hpp"
#include "ope/policy.hpp"
#include "ope/propensity.hpp"
#include "ope/reward_model.hpp"
#include "ope/types.hpp"

namespace ope {

// g_t = Y_t pi(A_t|X_t) / p_{A_t}(X_t) - v
double InfluenceG(double reward, double policy_weight, double propensity, double value);

// alpha_t = -sum_a muhat_a (pi_a / p_a) (1{A_t = a} - p_a)
double CorrectionAlpha(const std::vector<double>& mu, const std::vector<double>& policy,
                       const ProbabilityVector& propensity, int action);

struct VarianceEstimate {
  double avar = 0.0;
  EstimatorKind kind = EstimatorKind::kHat;
  std::size_t sample_size = 0;
};

// mean_t (g_t + alpha_t)^2 with the estimated score and reward models.
VarianceEstimate AvarEstimated(const BanditLog& log, double value, const PropensityModel& propensity,
                               const RewardModelSet& rewards, const PolicySpec& policy);

// mean_t g_t^2 with the logged true propensity.
VarianceEstimate AvarTrue(const BanditLog& log, double value, const PolicySpec& policy);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// v +/- z_{(1+level)/2} sqrt(avar / T)
Interval ConfidenceInterval(double value, double avar, std::size_t sample_size, double level);

nlohmann::json VarianceReport(const ValueEstimate& estimate, const VarianceEstimate& variance,
                              double level);

}  // namespace ope

#endif  // OPE_VARIANCE_HPP_
