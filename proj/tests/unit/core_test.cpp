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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ope/error.hpp"
#include "ope/log.hpp"
#include "ope/numeric.hpp"
#include "ope/policy.hpp"
#include "ope/random.hpp"

namespace ope {
namespace {

using testing::L4;
using testing::MakeLog;
using testing::Record;

bool HasRule(const std::vector<Violation>& v, const std::string& rule) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.rule == rule; });
}

TEST(Policy, DegenerateAlwaysOne) {
  const auto pi = PolicySpec::Degenerate(1, 2);
  EXPECT_EQ(pi.Probabilities({{3.0}, 1}), (std::vector<double>{0.0, 1.0}));
  EXPECT_TRUE(pi.normalized());
}

TEST(Policy, TreatmentEffectIsSigned) {
  const auto pi = PolicySpec::TreatmentEffect(1, 0, 2);
  EXPECT_EQ(pi.Probabilities({{0.0}, 1}), (std::vector<double>{-1.0, 1.0}));
  EXPECT_FALSE(pi.normalized());
}

TEST(Policy, UniformThreeActions) {
  const auto p = PolicySpec::Uniform(3).Probabilities({{0.0}, 1});
  for (double w : p) EXPECT_DOUBLE_EQ(w, 1.0 / 3.0);
}

TEST(Policy, TableRejectsUncoveredContext) {
  const auto pi = PolicySpec::Table(2, {{{0.0}, {1.0, 0.0}}});
  EXPECT_NO_THROW(pi.Probabilities({{0.0}, 1}));
  try {
    pi.Probabilities({{1.0}, 1});
    FAIL() << "expected an error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("context not covered"), std::string::npos);
  }
}

TEST(Policy, RejectsWeightsAboveOne) {
  EXPECT_THROW(PolicySpec::Constant({0.7, 0.7}), ValidationError);
}

TEST(Policy, NormalizedTablesSumToOne) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::map<FeatureVector, std::vector<double>> table;
    for (int c = 0; c < 4; ++c) {
      std::vector<double> w{u(gen), u(gen), u(gen)};
      double s = w[0] + w[1] + w[2];
      for (auto& x : w) x /= s;
      table[{static_cast<double>(c)}] = w;
    }
    const auto pi = PolicySpec::Table(3, table);
    ASSERT_TRUE(pi.normalized());
    for (int c = 0; c < 4; ++c) {
      const auto p = pi.Probabilities({{static_cast<double>(c)}, 1});
      EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-9);
    }
  }
}

TEST(Policy, JsonRoundTrip) {
  const auto pi = PolicySpec::Table(2, {{{0.0}, {0.0, 1.0}}, {{1.0}, {1.0, 0.0}}});
  const auto back = PolicySpec::FromJson(pi.ToJson());
  EXPECT_EQ(back.Probabilities({{1.0}, 2}), pi.Probabilities({{1.0}, 2}));
  EXPECT_EQ(back.normalized(), pi.normalized());
}

TEST(ValidateLog, WellFormedLogIsClean) { EXPECT_TRUE(ValidateLog(L4()).empty()); }

TEST(ValidateLog, PropensitySumViolation) {
  auto log = L4();
  log.records[2].true_propensity = ProbabilityVector{0.6, 0.6};
  const auto v = ValidateLog(log);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].record, std::optional<std::size_t>(2));
  EXPECT_EQ(v[0].rule, "true_sum");
}

TEST(ValidateLog, BatchOrderViolation) {
  auto log = MakeLog({Record(0, 0, 1.0, {0.0}, 2), Record(1, 1, 0.0, {0.0}, 1)});
  const auto v = ValidateLog(log);
  ASSERT_TRUE(HasRule(v, "batch_order"));
  for (const auto& x : v) {
    if (x.rule == "batch_order") {
      EXPECT_EQ(x.record, std::optional<std::size_t>(1));
      EXPECT_NE(x.message.find("batch order not nondecreasing"), std::string::npos);
    }
  }
}

TEST(ValidateLog, OtherRules) {
  auto log = L4();
  log.records[0].action = 5;
  log.records[1].reward = std::nan("");
  log.records[2].context.features = {0.0, 1.0};
  log.records[3].realized_propensity = ProbabilityVector{-0.1, 1.1};
  const auto v = ValidateLog(log);
  EXPECT_TRUE(HasRule(v, "action_range"));
  EXPECT_TRUE(HasRule(v, "reward_finite"));
  EXPECT_TRUE(HasRule(v, "feature_dim"));
  EXPECT_TRUE(HasRule(v, "realized_negative"));
}

TEST(ValidateLog, IsPure) {
  auto log = L4();
  log.records[1].true_propensity = ProbabilityVector{0.9, 0.9};
  const auto copy = log;
  EXPECT_EQ(ValidateLog(log), ValidateLog(log));
  EXPECT_EQ(log, copy);
}

TEST(LogCsv, RoundTripIsBitIdentical) {
  auto log = L4();
  log.records[0].reward = 0.1 + 0.2;
  log.records[1].context.features = {1.0 / 3.0};
  std::stringstream buf;
  WriteLogCsv(buf, log);
  const auto back = ReadLogCsv(buf);
  EXPECT_EQ(back, log);
}

TEST(LogCsv, OptionalGroupsAbsent) {
  std::istringstream in("round,batch,action,reward,x_0\n0,1,2,1.5,0\n1,1,0,0,0\n");
  const auto log = ReadLogCsv(in);
  EXPECT_EQ(log.num_actions(), 3);
  EXPECT_FALSE(log.records[0].true_propensity.has_value());
  EXPECT_FALSE(log.records[0].realized_propensity.has_value());
}

TEST(LogCsv, RejectsMissingHeaderAndPartialGroups) {
  std::istringstream no_header("0,1,1,1,0\n");
  EXPECT_THROW(ReadLogCsv(no_header), ValidationError);
  std::istringstream partial("round,batch,action,reward,x_0,p_true_0\n0,1,1,1,0,0.5\n");
  EXPECT_THROW(ReadLogCsv(partial), ValidationError);
  std::istringstream bad_number("round,batch,action,reward,x_0\n0,1,1,abc,0\n");
  EXPECT_THROW(ReadLogCsv(bad_number), ValidationError);
}

TEST(SliceBatches, KeepsRange) {
  auto log = MakeLog({Record(0, 0, 1, {0.0}, 1), Record(1, 1, 1, {0.0}, 2), Record(2, 1, 0, {0.0}, 3)});
  const auto mid = SliceBatches(log, 2, 3);
  ASSERT_EQ(mid.size(), 2u);
  EXPECT_EQ(mid.records[0].round, 1);
}

TEST(Numeric, NormalQuantileAndCdf) {
  EXPECT_NEAR(NormalQuantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(NormalCdf(1.0 / std::sqrt(2.0)), 0.760249938906523, 1e-12);
  for (double p : {1e-10, 0.001, 0.02, 0.3, 0.5, 0.8, 0.99, 1 - 1e-9}) {
    EXPECT_NEAR(NormalCdf(NormalQuantile(p)), p, 1e-9 * std::max(1.0, p / (1 - p)));
  }
  EXPECT_THROW(NormalQuantile(0.0), ValidationError);
}

TEST(Numeric, PairwiseSumIsOrderedAndAccurate) {
  std::vector<double> v(100000, 0.1);
  EXPECT_NEAR(PairwiseSum(v), 10000.0, 1e-9);
  EXPECT_DOUBLE_EQ(SampleVariance(std::vector<double>{1, 2, 3, 4}), 5.0 / 3.0);
}

TEST(Random, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.Uniform();
    EXPECT_EQ(x, b.Uniform());
    differs = differs || x != c.Uniform();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  EXPECT_TRUE(differs);
  EXPECT_NE(MixSeed(1, 2), MixSeed(2, 1));
}

TEST(Random, CategoricalFrequencies) {
  Rng rng(7);
  std::vector<double> w{0.2, 0.5, 0.3};
  std::vector<int> counts(3, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[rng.Categorical(w)];
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(counts[k] / double(n), w[k], 0.01);
}

}  // namespace
}  // namespace ope
