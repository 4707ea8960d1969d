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

#include "ope/variance.hpp"

#include <cmath>

#include "ope/error.hpp"
#include "ope/numeric.hpp"

namespace ope {

double InfluenceG(double reward, double policy_weight, double propensity, double value) {
  if (!(propensity > 0.0)) throw ValidationError("zero propensity at the chosen action");
  return reward * policy_weight / propensity - value;
}

double CorrectionAlpha(const std::vector<double>& mu, const std::vector<double>& policy,
                       const ProbabilityVector& propensity, int action) {
  double alpha = 0.0;
  for (std::size_t a = 0; a < mu.size(); ++a) {
    if (policy[a] == 0.0) continue;
    if (!(propensity[a] > 0.0)) {
      throw ValidationError("zero propensity at an action the policy supports");
    }
    const double d = static_cast<int>(a) == action ? 1.0 : 0.0;
    alpha -= mu[a] * (policy[a] / propensity[a]) * (d - propensity[a]);
  }
  return alpha;
}

VarianceEstimate AvarEstimated(const BanditLog& log, double value, const PropensityModel& propensity,
                               const RewardModelSet& rewards, const PolicySpec& policy) {
  if (log.empty()) throw ValidationError("variance estimate needs at least one record");
  if (rewards.num_actions() != log.num_actions() || propensity.num_actions() != log.num_actions() ||
      policy.num_actions() != log.num_actions()) {
    throw ValidationError("log, policy and nuisance models disagree on the number of actions");
  }
  std::vector<double> sq(log.size());
  for (std::size_t t = 0; t < log.size(); ++t) {
    const auto& r = log.records[t];
    const auto p = propensity.Predict(r);
    const auto pi = policy.Probabilities(r.context);
    const auto mu = rewards.PredictAll(r.context);
    const double s = InfluenceG(r.reward, pi[r.action], p[r.action], value) +
                     CorrectionAlpha(mu, pi, p, r.action);
    sq[t] = s * s;
  }
  return {Mean(sq), EstimatorKind::kHat, log.size()};
}

VarianceEstimate AvarTrue(const BanditLog& log, double value, const PolicySpec& policy) {
  if (log.empty()) throw ValidationError("variance estimate needs at least one record");
  std::vector<double> sq(log.size());
  for (std::size_t t = 0; t < log.size(); ++t) {
    const auto& r = log.records[t];
    if (!r.true_propensity) {
      throw ValidationError("record " + std::to_string(t) + " has no true propensity");
    }
    const double p = (*r.true_propensity)[r.action];
    if (!(p > 0.0)) throw ValidationError("true propensity of the chosen action is 0");
    const double g = InfluenceG(r.reward, policy.Probabilities(r.context)[r.action], p, value);
    sq[t] = g * g;
  }
  return {Mean(sq), EstimatorKind::kTilde, log.size()};
}

Interval ConfidenceInterval(double value, double avar, std::size_t sample_size, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("confidence level must lie in (0, 1)");
  if (sample_size == 0) throw ValidationError("confidence interval needs T > 0");
  if (!(avar >= 0.0) || !std::isfinite(avar)) throw NumericalError("asymptotic variance is not finite");
  const double z = NormalQuantile(0.5 + level / 2.0);
  const double half = z * std::sqrt(avar / static_cast<double>(sample_size));
  return {value - half, value + half};
}

nlohmann::json VarianceReport(const ValueEstimate& estimate, const VarianceEstimate& variance,
                              double level) {
  const auto ci = ConfidenceInterval(estimate.value, variance.avar, variance.sample_size, level);
  return {{"estimator_kind", ToString(estimate.kind)},
          {"value", estimate.value},
          {"avar", variance.avar},
          {"T", variance.sample_size},
          {"level", level},
          {"ci", {ci.lower, ci.upper}}};
}

}  // namespace ope
