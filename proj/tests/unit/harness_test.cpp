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

#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ope/error.hpp"
#include "ope/experiment.hpp"
#include "ope/monte_carlo.hpp"
#include "ope/pipeline.hpp"
#include "ope/report.hpp"
#include "ope/numeric.hpp"
#include "ope/simulate.hpp"
#include "shipped.hpp"

namespace ope {
namespace {

using nlohmann::json;

ExperimentConfig S1Config(int replications) {
  return ExperimentConfigFromJson({{"env", "S1"},
                                   {"policy", PolicySpec::Degenerate(1, 2).ToJson()},
                                   {"T", 200},
                                   {"replications", replications},
                                   {"seed", 5},
                                   {"estimators", {"hat", "tilde", "ddot", "hat_sn"}}});
}

TEST(Config, Defaults) {
  const auto c = ExperimentConfigFromJson({{"env", "s3"}});
  EXPECT_EQ(c.env.name(), "S3");
  EXPECT_EQ(c.replications, 1);
  EXPECT_EQ(c.propensity.basis.ToString(), "onehot");
  EXPECT_FALSE(c.best_action());
  EXPECT_EQ(ExperimentConfigFromJson(ToJson(c)).rounds, c.rounds);
}

TEST(Config, Invariants) {
  EXPECT_THROW(ExperimentConfigFromJson({{"env", "S1"}, {"replications", 0}}), ValidationError);
  EXPECT_THROW(ExperimentConfigFromJson({{"env", "S3"}, {"policy", {{"kind", "best_action"}, {"train", 0.7}, {"eval", 0.5}}}}),
               ValidationError);
  EXPECT_THROW(ExperimentConfigFromJson({{"env", "S3"}, {"policy", {{"kind", "best_action"}, {"train", 1.0}}}}),
               ValidationError);
  EXPECT_THROW(ExperimentConfigFromJson({{"env", "S1"}, {"estimators", {"bogus"}}}), ValidationError);
  EXPECT_THROW(ExperimentConfigFromJson({{"env", "S1"}, {"propensity", {{"family", "import"}}}}), ValidationError);
  EXPECT_THROW(ExperimentConfigFromJson({{"T", 5}}), ValidationError);
}

TEST(MonteCarlo, SingleReplicationFlagsVariance) {
  const auto s = MonteCarlo(S1Config(1));
  for (const auto& e : s.estimators) {
    EXPECT_FALSE(e.empirical_variance.has_value());
    ASSERT_EQ(e.values.size(), 1u);
    EXPECT_EQ(e.values[0], e.mean);
  }
  const auto j = ToJson(s);
  EXPECT_FALSE(j["estimators"][0]["variance_defined"].get<bool>());
  EXPECT_TRUE(j["estimators"][0]["empirical_variance"].is_null());
}

TEST(MonteCarlo, DeterministicAcrossWorkerCounts) {
  auto c = S1Config(40);
  const auto one = ToJson(MonteCarlo(c)).dump();
  c.workers = 4;
  EXPECT_EQ(ToJson(MonteCarlo(c)).dump(), one);
  EXPECT_EQ(ToJson(MonteCarlo(c)).dump(), one);
}

TEST(MonteCarlo, SummaryInvariants) {
  const auto s = MonteCarlo(S1Config(60));
  ASSERT_TRUE(s.oracle.has_value());
  EXPECT_NEAR(s.oracle->efficiency_bound, 0.48, 1e-12);
  for (const auto& e : s.estimators) {
    ASSERT_TRUE(e.empirical_variance.has_value());
    EXPECT_GE(*e.empirical_variance, 0.0);
    if (e.coverage) {
      EXPECT_GE(*e.coverage, 0.0);
      EXPECT_LE(*e.coverage, 1.0);
    }
  }
  EXPECT_FALSE(s.Find(EstimatorKind::kDdot).coverage.has_value());
  const auto back = ReplicationSummaryFromJson(ToJson(s));
  EXPECT_EQ(ToJson(back).dump(), ToJson(s).dump());
}

TEST(MonteCarlo, ErrorsCarryReplicationIndex) {
  // Three-round logs separate the saturated logit in some replication.
  auto c = ExperimentConfigFromJson({{"env", "S3"},
                                     {"T", 3},
                                     {"replications", 50},
                                     {"estimators", {"hat"}},
                                     {"propensity", {{"family", "sieve-logit"}, {"basis", "onehot"}}}});
  try {
    MonteCarlo(c);
    FAIL() << "expected a failing replication";
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("replication ", 0), 0u) << e.what();
  }
}

// var(hat) < var(tilde) < var(ddot, when gap2 > 0) on every shipped env with
// gap1 > 0, each step by more than two paired Monte Carlo standard errors.
TEST(MonteCarlo, VarianceOrderingAcrossShippedEnvs) {
  auto separation = [](const std::vector<double>& lo, const std::vector<double>& hi) {
    const double ml = Mean(lo), mh = Mean(hi);
    std::vector<double> d(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) d[i] = (hi[i] - mh) * (hi[i] - mh) - (lo[i] - ml) * (lo[i] - ml);
    return Mean(d) / std::sqrt(SampleVariance(d) / static_cast<double>(d.size()));
  };
  int checked = 0;
  for (const auto& [name, env] : testing::ShippedEnvs()) {
    const auto policy = PolicySpec::Degenerate(1, env.num_actions());
    const auto truth = VarianceGaps(env, policy, BatchLayout{600, 2});
    if (truth.gap_part1 <= 0.0) continue;
    auto c = ExperimentConfigFromJson({{"env", EnvToJson(env)},
                                       {"policy", policy.ToJson()},
                                       {"T", 600},
                                       {"B", 2},
                                       {"replications", 800},
                                       {"seed", 99},
                                       {"estimators", {"hat", "tilde", "ddot"}},
                                       {"propensity", {{"family", "sieve-logit"}, {"basis", "onehot+batch"}}},
                                       {"reward_model", {{"link", "identity"}, {"basis", "onehot+batch"}}},
                                       {"keep_values", true}});
    const auto s = MonteCarlo(c);
    const auto& hat = s.Find(EstimatorKind::kHat).values;
    const auto& tilde = s.Find(EstimatorKind::kTilde).values;
    const auto& ddot = s.Find(EstimatorKind::kDdot).values;
    EXPECT_GT(separation(hat, tilde), 2.0) << name;
    if (truth.gap_part2 > 0.0) EXPECT_GT(separation(tilde, ddot), 2.0) << name;
    ++checked;
  }
  EXPECT_GE(checked, 4);
}

TEST(Pipeline, SplitByBatch) {
  EXPECT_EQ(SplitBatches(2, {0.5, 0.5}).train_last, 1);
  EXPECT_EQ(SplitBatches(10, {0.7, 0.3}).eval_last, 10);
  EXPECT_EQ(SplitBatches(10, {0.4, 0.2}).eval_last, 6);
  EXPECT_THROW(SplitBatches(1, {0.5, 0.5}), ValidationError);
  EXPECT_THROW(SplitBatches(4, {0.1, 0.5}), ValidationError);
}

TEST(Pipeline, RecoversBestActionsOnS3) {
  const auto log = RunLogging(MakeS3(), 20000, 2, 3);
  const auto r = BestActionPipeline(log, {}, {}, {}, BasisSpec{BasisKind::kOneHot});
  EXPECT_EQ(r.best_action.Probabilities({{0.0}, 1}), (std::vector<double>{0, 1}));
  EXPECT_EQ(r.best_action.Probabilities({{1.0}, 1}), (std::vector<double>{1, 0}));
  EXPECT_EQ(r.train_size, 10000u);
  EXPECT_EQ(r.eval_size, 10000u);
  EXPECT_FALSE(r.reward_fallback);
  EXPECT_NEAR(r.best_value.value, 0.7, 0.05);
  EXPECT_NEAR(r.logging_value.value, 0.58, 0.05);
}

TEST(Pipeline, IgnoresEvalRewardsWhenChoosingPolicy) {
  const auto log = RunLogging(MakeS3(), 4000, 2, 9);
  auto perturbed = log;
  for (auto& r : perturbed.records) {
    if (r.context.batch_id == 2) r.reward = 1.0 - r.reward;
  }
  const auto a = BestActionPipeline(log, {}, {}, {}, BasisSpec{BasisKind::kOneHot});
  const auto b = BestActionPipeline(perturbed, {}, {}, {}, BasisSpec{BasisKind::kOneHot});
  EXPECT_EQ(a.best_action.ToJson(), b.best_action.ToJson());
  EXPECT_NE(a.best_value.value, b.best_value.value);
}

TEST(Pipeline, FallbackWhenTrainLacksAction) {
  using testing::Record;
  std::vector<LogRecord> records;
  // Action 1 is never logged in context 1.
  for (int t = 0; t < 8; ++t) records.push_back(Record(t, t % 2, t % 3 == 0, {0.0}));
  for (int t = 8; t < 12; ++t) records.push_back(Record(t, 0, t % 2, {1.0}));
  const std::vector<FeatureVector> xs{{0.0}, {1.0}};
  const auto mu = FitBestActionRewards(testing::MakeLog(records), xs, {}, BasisSpec{BasisKind::kOneHot});
  EXPECT_FALSE(mu.model(0).fallback());
  EXPECT_TRUE(mu.model(1).fallback());
  EXPECT_TRUE(mu.any_fallback());
}

TEST(Pipeline, MonteCarloSummary) {
  const auto c = ExperimentConfigFromJson({{"env", "S3"},
                                           {"policy", {{"kind", "best_action"}, {"train", 0.5}, {"eval", 0.5}}},
                                           {"T", 4000},
                                           {"replications", 10}});
  EXPECT_EQ(c.batches, 2);
  const auto s = MonteCarlo(c);
  ASSERT_TRUE(s.pipeline.has_value());
  EXPECT_EQ(s.pipeline->recovery_rate, 1.0);
  EXPECT_NEAR(s.pipeline->logging_truth, 0.58, 1e-12);
  EXPECT_NE(RenderReport(s, ReportFormat::kMarkdown).find("best_action"), std::string::npos);
}

TEST(Report, ShrinkageFixtures) {
  EXPECT_EQ(FormatPercent(ShrinkagePercent(0.131, 0.171)), "-23.4%");
  EXPECT_EQ(FormatPercent(ShrinkagePercent(0.171, 0.171)), "0.0%");
  std::vector<ReportRow> rows{{"tilde", 0.6, {}, {}, {}, {}, 0.171, true}, {"hat", 0.6, {}, {}, {}, {}, 0.131, false}};
  const auto md = RenderReport(rows, ReportFormat::kMarkdown);
  EXPECT_NE(md.find("shrinkage_in_ci"), std::string::npos);
  EXPECT_NE(md.find("-23.4%"), std::string::npos);
  rows.pop_back();
  for (auto f : {ReportFormat::kMarkdown, ReportFormat::kCsv, ReportFormat::kJson}) {
    EXPECT_EQ(RenderReport(rows, f).find("shrinkage"), std::string::npos);
  }
}

TEST(Report, FromSummaryUsesTrueScoreReference) {
  const auto s = MonteCarlo(S1Config(30));
  const auto rows = ReportRows(s);
  int refs = 0;
  for (const auto& r : rows) refs += r.reference;
  EXPECT_EQ(refs, 1);
  const auto csv = RenderReport(s, ReportFormat::kCsv);
  EXPECT_EQ(csv.rfind("estimator,value,bias", 0), 0u);
  EXPECT_THROW(ParseReportFormat("xml"), ValidationError);
}

}  // namespace
}  // namespace ope
