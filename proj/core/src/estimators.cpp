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

#include "ope/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ope/error.hpp"
#include "ope/numeric.hpp"

namespace ope {
namespace {

// Chosen-action propensity for round t, and whether it was clipped.
struct Score {
  double value;
  bool clipped;
};

template <typename ScoreFn>
ValueEstimate Ipw(const BanditLog& log, const PolicySpec& policy, bool self_normalized,
                  EstimatorKind kind, ScoreFn score_of) {
  if (log.empty()) throw ValidationError("estimator needs at least one record");
  if (policy.num_actions() != log.num_actions()) {
    throw ValidationError("policy and log disagree on the number of actions");
  }
  if (self_normalized && !policy.normalized()) {
    throw ValidationError(
        "self-normalized estimators require a policy whose weights sum to 1 in every context");
  }
  const std::size_t n = log.size();
  std::vector<double> numer(n);
  std::vector<double> weights(n);
  ValueEstimate est;
  est.kind = kind;
  est.sample_size = n;
  for (std::size_t t = 0; t < n; ++t) {
    const auto& r = log.records[t];
    const Score s = score_of(t, r);
    if (!(s.value > 0.0) || !std::isfinite(s.value)) {
      throw ValidationError("nonpositive propensity for the chosen action at record " +
                            std::to_string(t));
    }
    const double w = policy.Probabilities(r.context)[r.action] / s.value;
    weights[t] = w;
    numer[t] = r.reward * w;
    est.diagnostics.max_weight = std::max(est.diagnostics.max_weight, std::abs(w));
    if (s.clipped) ++est.diagnostics.clipped;
  }
  const double inv_t = 1.0 / static_cast<double>(n);
  const double numerator = PairwiseSum(numer) * inv_t;
  if (self_normalized) {
    est.sn_denominator = PairwiseSum(weights) * inv_t;
    if (!(est.sn_denominator > 0.0)) {
      throw NumericalError("self-normalization denominator is not positive");
    }
    est.value = numerator / est.sn_denominator;
  } else {
    est.value = numerator;
  }
  return est;
}

}  // namespace

std::string ToString(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kHat: return "hat";
    case EstimatorKind::kHatSn: return "hat_sn";
    case EstimatorKind::kTilde: return "tilde";
    case EstimatorKind::kTildeSn: return "tilde_sn";
    case EstimatorKind::kDdot: return "ddot";
    case EstimatorKind::kDdotSn: return "ddot_sn";
  }
  return "unknown";
}

EstimatorKind ParseEstimatorKind(const std::string& text) {
  for (auto k : {EstimatorKind::kHat, EstimatorKind::kHatSn, EstimatorKind::kTilde,
                 EstimatorKind::kTildeSn, EstimatorKind::kDdot, EstimatorKind::kDdotSn}) {
    if (ToString(k) == text) return k;
  }
  throw ValidationError("unknown estimator kind '" + text + "'");
}

bool IsSelfNormalized(EstimatorKind kind) {
  return kind == EstimatorKind::kHatSn || kind == EstimatorKind::kTildeSn ||
         kind == EstimatorKind::kDdotSn;
}

nlohmann::json ToJson(const ValueEstimate& e) {
  return {{"kind", ToString(e.kind)},
          {"value", e.value},
          {"T", e.sample_size},
          {"sn_denominator", e.sn_denominator},
          {"diagnostics", {{"clipped", e.diagnostics.clipped}, {"max_weight", e.diagnostics.max_weight}}}};
}

ValueEstimate ValueEstimateFromJson(const nlohmann::json& j) {
  try {
    ValueEstimate e;
    e.kind = ParseEstimatorKind(j.at("kind").get<std::string>());
    e.value = j.at("value").get<double>();
    e.sample_size = j.at("T").get<std::size_t>();
    e.sn_denominator = j.value("sn_denominator", 1.0);
    if (j.contains("diagnostics")) {
      e.diagnostics.clipped = j.at("diagnostics").value("clipped", std::size_t{0});
      e.diagnostics.max_weight = j.at("diagnostics").value("max_weight", 0.0);
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed estimate JSON: ") + ex.what());
  }
}

ValueEstimate IpwEstimated(const BanditLog& log, const PolicySpec& policy,
                           const PropensityModel& propensity, bool self_normalized) {
  if (propensity.num_actions() != log.num_actions()) {
    throw ValidationError("propensity model and log disagree on the number of actions");
  }
  return Ipw(log, policy, self_normalized,
             self_normalized ? EstimatorKind::kHatSn : EstimatorKind::kHat,
             [&](std::size_t, const LogRecord& r) {
               const double raw = propensity.PredictRaw(r)[r.action];
               const double clipped = propensity.Predict(r)[r.action];
               return Score{clipped, clipped != raw};
             });
}

ValueEstimate IpwTrue(const BanditLog& log, const PolicySpec& policy, bool self_normalized) {
  return Ipw(log, policy, self_normalized,
             self_normalized ? EstimatorKind::kTildeSn : EstimatorKind::kTilde,
             [](std::size_t t, const LogRecord& r) {
               if (!r.true_propensity) {
                 throw ValidationError("record " + std::to_string(t) + " has no true propensity");
               }
               return Score{(*r.true_propensity)[r.action], false};
             });
}

ValueEstimate IpwRealized(const BanditLog& log, const PolicySpec& policy, bool self_normalized) {
  return Ipw(log, policy, self_normalized,
             self_normalized ? EstimatorKind::kDdotSn : EstimatorKind::kDdot,
             [](std::size_t t, const LogRecord& r) {
               if (!r.realized_propensity) {
                 throw ValidationError("record " + std::to_string(t) +
                                       " has no realized propensity");
               }
               const double p = (*r.realized_propensity)[r.action];
               if (!(p > 0.0)) {
                 throw ValidationError("realized propensity of the chosen action is 0 at record " +
                                       std::to_string(t) + " (inconsistent data)");
               }
               return Score{p, false};
             });
}

PolicySpec BestActionPolicy(const RewardModelSet& rewards, std::span<const FeatureVector> contexts) {
  const int m1 = rewards.num_actions();
  if (m1 < 2) throw ValidationError("best-action policy needs models for at least two actions");
  std::map<FeatureVector, std::vector<double>> table;
  for (const auto& f : contexts) {
    const auto mu = rewards.PredictAll(Context{f, 1});
    int best = 0;
    for (int a = 1; a < m1; ++a) {
      if (mu[a] > mu[best]) best = a;
    }
    std::vector<double> w(static_cast<std::size_t>(m1), 0.0);
    w[best] = 1.0;
    table[f] = std::move(w);
  }
  return PolicySpec::Table(m1, std::move(table));
}

std::vector<FeatureVector> DistinctContexts(const BanditLog& log) {
  std::set<FeatureVector> seen;
  for (const auto& r : log.records) seen.insert(r.context.features);
  return {seen.begin(), seen.end()};
}

}  // namespace ope
