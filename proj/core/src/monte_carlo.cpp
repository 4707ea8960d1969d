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

#include "ope/monte_carlo.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include "ope/error.hpp"
#include "ope/numeric.hpp"
#include "ope/pipeline.hpp"
#include "ope/simulate.hpp"
#include "ope/variance.hpp"

namespace ope {
namespace {

using nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

BatchLayout Layout(const ExperimentConfig& c) { return BatchLayout{c.rounds, c.batches}; }

EstimatorDraw Draw(double value, double avar, std::size_t t, double level, double truth) {
  EstimatorDraw d;
  d.value = value;
  d.avar = avar;
  if (std::isnan(avar)) {
    d.half_width = kNaN;
    return d;
  }
  const auto ci = ConfidenceInterval(value, avar, t, level);
  d.half_width = (ci.upper - ci.lower) / 2.0;
  d.covered = ci.lower <= truth && truth <= ci.upper;
  return d;
}

bool NeedsEstimatedNuisances(const std::vector<EstimatorKind>& kinds) {
  for (auto k : kinds) {
    if (k == EstimatorKind::kHat || k == EstimatorKind::kHatSn) return true;
  }
  return false;
}

std::optional<double> OptionalLoggingValue(const SyntheticEnv& env, const BatchLayout& layout) {
  if (env.has_random_logging()) return std::nullopt;
  return LoggingPolicyValue(env, layout);
}

PipelineDraw RunPipeline(const ExperimentConfig& c, const BanditLog& log) {
  const auto& directive = std::get<BestActionDirective>(c.policy);
  const auto result = BestActionPipeline(log, directive, c.propensity, c.reward, c.reward_basis());
  const auto truth_policy = TrueBestActionPolicy(c.env);
  const auto layout = Layout(c);
  const double best_truth = TrueValue(c.env, truth_policy, layout);
  const double logging_truth = OptionalLoggingValue(c.env, layout).value_or(kNaN);

  PipelineDraw d;
  d.fallback = result.reward_fallback;
  d.recovered = true;
  for (const auto& ctx : c.env.contexts()) {
    const Context x{ctx.features, 1};
    d.recovered = d.recovered && result.best_action.Probabilities(x) == truth_policy.Probabilities(x);
  }
  d.best = Draw(result.best_value.value, result.best_variance.avar, result.eval_size, c.level,
                best_truth);
  d.logging = Draw(result.logging_value.value, result.logging_variance.avar, result.eval_size,
                   c.level, logging_truth);
  d.dominates = result.best_value.value - d.best.half_width > result.logging_value.value;
  return d;
}

[[noreturn]] void RethrowWithIndex(std::exception_ptr e, int index) {
  const std::string prefix = "replication " + std::to_string(index) + ": ";
  try {
    std::rethrow_exception(e);
  } catch (const ValidationError& ex) {
    throw ValidationError(prefix + ex.what());
  } catch (const NumericalError& ex) {
    throw NumericalError(prefix + ex.what());
  } catch (const std::exception& ex) {
    throw Error(prefix + ex.what());
  }
}

std::optional<double> OptMean(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return Mean(v);
}

json Opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> OptFrom(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

PolicySpec TrueBestActionPolicy(const SyntheticEnv& env) {
  std::map<FeatureVector, std::vector<double>> table;
  for (int c = 0; c < env.num_contexts(); ++c) {
    int best = 0;
    for (int a = 1; a < env.num_actions(); ++a) {
      if (env.arm(c, a).mean > env.arm(c, best).mean) best = a;
    }
    std::vector<double> w(static_cast<std::size_t>(env.num_actions()), 0.0);
    w[best] = 1.0;
    table[env.context(c).features] = std::move(w);
  }
  return PolicySpec::Table(env.num_actions(), std::move(table));
}

ReplicationResult RunReplication(const ExperimentConfig& c, std::uint64_t seed) {
  const BanditLog log = RunLogging(c.env, c.rounds, c.batches, seed);
  ReplicationResult out;
  if (c.best_action()) {
    out.pipeline = RunPipeline(c, log);
    return out;
  }
  const auto& policy = std::get<PolicySpec>(c.policy);
  const double truth = TrueValue(c.env, policy, Layout(c));

  std::optional<PropensityModel> p_hat;
  std::optional<RewardModelSet> mu_hat;
  if (NeedsEstimatedNuisances(c.estimators)) {
    p_hat = FitPropensity(log, c.propensity);
    mu_hat = FitRewards(log, c.env, c.reward, c.reward_basis());
  }
  for (auto kind : c.estimators) {
    const bool sn = IsSelfNormalized(kind);
    ValueEstimate v;
    double avar = kNaN;
    switch (kind) {
      case EstimatorKind::kHat:
      case EstimatorKind::kHatSn:
        v = IpwEstimated(log, policy, *p_hat, sn);
        avar = AvarEstimated(log, v.value, *p_hat, *mu_hat, policy).avar;
        break;
      case EstimatorKind::kTilde:
      case EstimatorKind::kTildeSn:
        v = IpwTrue(log, policy, sn);
        avar = AvarTrue(log, v.value, policy).avar;
        break;
      case EstimatorKind::kDdot:
      case EstimatorKind::kDdotSn:
        v = IpwRealized(log, policy, sn);
        break;
    }
    out.draws.push_back(Draw(v.value, avar, log.size(), c.level, truth));
  }
  return out;
}

std::vector<ReplicationResult> RunReplications(const ExperimentConfig& c) {
  c.Validate();
  const int r = c.replications;
  std::vector<ReplicationResult> results(static_cast<std::size_t>(r));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(r));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};

  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const int i = next.fetch_add(1);
      if (i >= r) return;
      try {
        results[i] = RunReplication(c, c.seed + static_cast<std::uint64_t>(i));
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const int workers = std::min(c.workers, r);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (int i = 0; i < r; ++i) {
    if (errors[i]) RethrowWithIndex(errors[i], i);
  }
  return results;
}

ReplicationSummary Summarize(const ExperimentConfig& c, const std::vector<ReplicationResult>& results) {
  ReplicationSummary s;
  s.replications = static_cast<int>(results.size());
  s.rounds = c.rounds;
  s.level = c.level;
  const auto layout = Layout(c);
  const double t = static_cast<double>(c.rounds);
  const bool keep = c.keep_values || s.replications == 1;

  if (c.best_action()) {
    PipelineSummary p;
    p.best_truth = TrueValue(c.env, TrueBestActionPolicy(c.env), layout);
    p.logging_truth = OptionalLoggingValue(c.env, layout).value_or(kNaN);
    std::vector<double> best, logging, best_hw, logging_hw;
    double recovered = 0, dominates = 0, fallback = 0, best_cov = 0, logging_cov = 0;
    for (const auto& res : results) {
      const auto& d = *res.pipeline;
      recovered += d.recovered;
      dominates += d.dominates;
      fallback += d.fallback;
      best_cov += d.best.covered;
      logging_cov += d.logging.covered;
      best.push_back(d.best.value);
      logging.push_back(d.logging.value);
      best_hw.push_back(d.best.half_width);
      logging_hw.push_back(d.logging.half_width);
    }
    const double n = static_cast<double>(results.size());
    p.recovery_rate = recovered / n;
    p.dominance_rate = dominates / n;
    p.fallback_rate = fallback / n;
    p.best_mean = Mean(best);
    p.best_coverage = best_cov / n;
    p.best_mean_half_width = Mean(best_hw);
    p.logging_mean = Mean(logging);
    p.logging_coverage = logging_cov / n;
    p.logging_mean_half_width = Mean(logging_hw);
    s.true_value = p.best_truth;
    s.pipeline = p;
    return s;
  }

  const auto& policy = std::get<PolicySpec>(c.policy);
  s.true_value = TrueValue(c.env, policy, layout);
  if (!c.env.has_random_logging()) {
    try {
      s.oracle = VarianceGaps(c.env, policy, layout);
    } catch (const ValidationError&) {
      // Bound undefined for this policy (unsupported action); leave absent.
    }
  }
  for (std::size_t k = 0; k < c.estimators.size(); ++k) {
    EstimatorSummary e;
    e.kind = c.estimators[k];
    std::vector<double> values, avars, half_widths;
    double covered = 0;
    for (const auto& res : results) {
      const auto& d = res.draws[k];
      values.push_back(d.value);
      if (!std::isnan(d.avar)) {
        avars.push_back(d.avar);
        half_widths.push_back(d.half_width);
        covered += d.covered;
      }
    }
    e.mean = Mean(values);
    e.bias = e.mean - s.true_value;
    if (values.size() >= 2) {
      e.empirical_variance = t * SampleVariance(values);
      std::vector<double> sq(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - e.mean) * (values[i] - e.mean);
      e.empirical_variance_se = t * std::sqrt(SampleVariance(sq) / static_cast<double>(sq.size()));
    }
    e.mean_avar = OptMean(avars);
    e.mean_half_width = OptMean(half_widths);
    if (!avars.empty()) e.coverage = covered / static_cast<double>(avars.size());
    if (keep) e.values = values;
    s.estimators.push_back(std::move(e));
  }
  return s;
}

ReplicationSummary MonteCarlo(const ExperimentConfig& config) {
  return Summarize(config, RunReplications(config));
}

const EstimatorSummary& ReplicationSummary::Find(EstimatorKind kind) const {
  for (const auto& e : estimators) {
    if (e.kind == kind) return e;
  }
  throw ValidationError("summary has no estimator '" + ToString(kind) + "'");
}

json ToJson(const ReplicationSummary& s) {
  json j;
  j["replications"] = s.replications;
  j["T"] = s.rounds;
  j["level"] = s.level;
  j["true_value"] = s.true_value;
  if (s.oracle) {
    j["oracle"] = {{"true_value", s.oracle->true_value},
                   {"efficiency_bound", s.oracle->efficiency_bound},
                   {"tilde_avar", s.oracle->tilde_avar},
                   {"ddot_avar", s.oracle->ddot_avar()},
                   {"gap_part1", s.oracle->gap_part1},
                   {"gap_part2", s.oracle->gap_part2}};
  } else {
    j["oracle"] = nullptr;
  }
  j["estimators"] = json::array();
  for (const auto& e : s.estimators) {
    json x = {{"kind", ToString(e.kind)},
              {"mean", e.mean},
              {"bias", e.bias},
              {"variance_defined", e.empirical_variance.has_value()},
              {"empirical_variance", Opt(e.empirical_variance)},
              {"empirical_variance_se", Opt(e.empirical_variance_se)},
              {"mean_avar", Opt(e.mean_avar)},
              {"coverage", Opt(e.coverage)},
              {"mean_ci_half_width", Opt(e.mean_half_width)}};
    if (!e.values.empty()) x["values"] = e.values;
    j["estimators"].push_back(std::move(x));
  }
  if (s.pipeline) {
    const auto& p = *s.pipeline;
    j["pipeline"] = {{"recovery_rate", p.recovery_rate},
                     {"dominance_rate", p.dominance_rate},
                     {"fallback_rate", p.fallback_rate},
                     {"best_action", {{"truth", p.best_truth},
                                      {"mean", p.best_mean},
                                      {"coverage", p.best_coverage},
                                      {"mean_ci_half_width", p.best_mean_half_width}}},
                     {"logging", {{"truth", std::isnan(p.logging_truth) ? json(nullptr) : json(p.logging_truth)},
                                  {"mean", p.logging_mean},
                                  {"coverage", p.logging_coverage},
                                  {"mean_ci_half_width", p.logging_mean_half_width}}}};
  }
  return j;
}

ReplicationSummary ReplicationSummaryFromJson(const json& j) {
  try {
    ReplicationSummary s;
    s.replications = j.at("replications").get<int>();
    s.rounds = j.at("T").get<std::size_t>();
    s.level = j.value("level", 0.95);
    s.true_value = j.value("true_value", 0.0);
    if (j.contains("oracle") && !j.at("oracle").is_null()) {
      const auto& o = j.at("oracle");
      GroundTruth g;
      g.true_value = o.at("true_value").get<double>();
      g.efficiency_bound = o.at("efficiency_bound").get<double>();
      g.tilde_avar = o.at("tilde_avar").get<double>();
      g.gap_part1 = o.at("gap_part1").get<double>();
      g.gap_part2 = o.at("gap_part2").get<double>();
      s.oracle = g;
    }
    for (const auto& x : j.value("estimators", json::array())) {
      EstimatorSummary e;
      e.kind = ParseEstimatorKind(x.at("kind").get<std::string>());
      e.mean = x.at("mean").get<double>();
      e.bias = x.value("bias", 0.0);
      e.empirical_variance = OptFrom(x, "empirical_variance");
      e.empirical_variance_se = OptFrom(x, "empirical_variance_se");
      e.mean_avar = OptFrom(x, "mean_avar");
      e.coverage = OptFrom(x, "coverage");
      e.mean_half_width = OptFrom(x, "mean_ci_half_width");
      if (x.contains("values")) e.values = x.at("values").get<std::vector<double>>();
      s.estimators.push_back(std::move(e));
    }
    if (j.contains("pipeline")) {
      const auto& p = j.at("pipeline");
      PipelineSummary ps;
      ps.recovery_rate = p.at("recovery_rate").get<double>();
      ps.dominance_rate = p.at("dominance_rate").get<double>();
      ps.fallback_rate = p.value("fallback_rate", 0.0);
      const auto& b = p.at("best_action");
      ps.best_truth = b.at("truth").get<double>();
      ps.best_mean = b.at("mean").get<double>();
      ps.best_coverage = b.at("coverage").get<double>();
      ps.best_mean_half_width = b.at("mean_ci_half_width").get<double>();
      const auto& l = p.at("logging");
      ps.logging_truth = l.at("truth").is_null() ? kNaN : l.at("truth").get<double>();
      ps.logging_mean = l.at("mean").get<double>();
      ps.logging_coverage = l.at("coverage").get<double>();
      ps.logging_mean_half_width = l.at("mean_ci_half_width").get<double>();
      s.pipeline = ps;
    }
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed summary JSON: ") + e.what());
  }
}

}  // namespace ope
