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
#include "ope/basis.hpp"
#include "ope/error.hpp"
#include "ope/propensity.hpp"
#include "ope/reward_model.hpp"
#include "ope/simulate.hpp"

namespace ope {
namespace {

using testing::L4;
using testing::MakeLog;
using testing::Record;

const BasisSpec kIntercept{BasisKind::kIntercept};
const BasisSpec kOneHot{BasisKind::kOneHot};

// Two contexts: x=0 chooses action 1 in 3 of 4 rounds, x=1 in 1 of 4.
BanditLog TwoContextLog() {
  std::vector<LogRecord> r;
  const int a0[] = {1, 1, 0, 1}, a1[] = {0, 1, 0, 0};
  for (int t = 0; t < 4; ++t) r.push_back(Record(t, a0[t], t % 2, {0.0}));
  for (int t = 0; t < 4; ++t) r.push_back(Record(4 + t, a1[t], 1 - t % 2, {1.0}));
  return MakeLog(r);
}

BanditLog AllActionOne(int n, bool two_contexts) {
  std::vector<LogRecord> r;
  for (int t = 0; t < n; ++t) r.push_back(Record(t, 1, 1.0, {two_contexts ? double(t % 2) : 0.0}));
  return MakeLog(r);
}

TEST(Basis, ParseAndPrint) {
  for (const char* s : {"intercept", "onehot", "onehot+batch", "poly:3", "poly:2+batch"}) {
    EXPECT_EQ(BasisSpec::Parse(s).ToString(), s);
  }
  EXPECT_THROW(BasisSpec::Parse("poly:0"), ValidationError);
  EXPECT_THROW(BasisSpec::Parse("splines"), ValidationError);
}

TEST(Basis, PolynomialDimension) {
  std::vector<LogRecord> r;
  for (int t = 0; t < 20; ++t) r.push_back(Record(t, t % 2, 0.0, {t * 0.1, t * t * 0.01}));
  const auto basis = Basis::Build(BasisSpec::Parse("poly:2"), MakeLog(r));
  EXPECT_EQ(basis.dimension(), 6u);  // 1, x, y, x^2, xy, y^2
  EXPECT_EQ(basis.intercept_column(), std::optional<std::size_t>(0));
}

TEST(SieveLs, InterceptOnlyIsSampleMean) {
  const auto m = FitSieveLs(L4(), kIntercept);
  EXPECT_NEAR(m.PredictRaw(L4().records[0])[1], 0.75, 1e-12);
}

TEST(SieveLs, OneHotGivesGroupFrequencies) {
  const auto m = FitSieveLs(TwoContextLog(), kOneHot);
  EXPECT_NEAR(m.PredictRaw(Context{{0.0}, 1})[1], 0.75, 1e-12);
  EXPECT_NEAR(m.PredictRaw(Context{{1.0}, 1})[1], 0.25, 1e-12);
}

TEST(SieveLs, DegenerateFrequencyIsClamped) {
  const auto m = FitSieveLs(AllActionOne(10, false), kIntercept);
  const auto raw = m.PredictRaw(Context{{0.0}, 1});
  EXPECT_NEAR(raw[0], 0.0, 1e-12);
  EXPECT_NEAR(raw[1], 1.0, 1e-12);
  const auto p = m.Predict(Context{{0.0}, 1});
  EXPECT_EQ(p[0], kDefaultClipFloor);
  EXPECT_NEAR(p[1], 1.0, 1e-12);
  EXPECT_EQ(m.diagnostics().clamped_rounds, 10u);
}

TEST(SieveLs, SingularBasisNamesDimension) {
  // Feature x_1 = 2 x_0 makes the poly:1 design rank deficient.
  std::vector<LogRecord> r;
  for (int t = 0; t < 10; ++t) r.push_back(Record(t, t % 2, 0.0, {double(t), 2.0 * t}));
  try {
    FitSieveLs(MakeLog(r), BasisSpec::Parse("poly:1"));
    FAIL() << "expected singular basis";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("singular basis"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("dimension"), std::string::npos);
  }
}

TEST(SieveLs, TooFewRecords) {
  EXPECT_THROW(FitSieveLs(MakeLog({Record(0, 1, 1.0, {0.0}), Record(1, 0, 1.0, {1.0})}),
                          BasisSpec::Parse("poly:3")),
               ValidationError);
}

TEST(SieveLogit, InterceptOnlyIsFrequency) {
  const auto m = FitSieveLogit(L4(), kIntercept);
  const auto p = m.PredictRaw(Context{{0.0}, 1});
  EXPECT_NEAR(p[1], 0.75, 1e-9);
  EXPECT_EQ(p[0] + p[1], 1.0);
}

TEST(SieveLogit, ThreeEqualCounts) {
  std::vector<LogRecord> r;
  for (int t = 0; t < 9; ++t) r.push_back(Record(t, t % 3, 0.0));
  const auto p = FitSieveLogit(MakeLog(r, 3), kIntercept).PredictRaw(Context{{0.0}, 1});
  for (double x : p) EXPECT_NEAR(x, 1.0 / 3.0, 1e-9);
}

TEST(SieveLogit, OneHotSaturated) {
  const auto m = FitSieveLogit(TwoContextLog(), kOneHot);
  EXPECT_NEAR(m.PredictRaw(Context{{0.0}, 1})[1], 0.75, 1e-9);
  EXPECT_NEAR(m.PredictRaw(Context{{1.0}, 1})[1], 0.25, 1e-9);
}

TEST(SieveLogit, SeparationIsReported) {
  EXPECT_THROW(FitSieveLogit(AllActionOne(20, false), kIntercept), NumericalError);
  try {
    FitSieveLogit(AllActionOne(20, true), kOneHot);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("ridge"), std::string::npos);
  }
}

TEST(SieveLogit, IterationCapRaisesConvergenceError) {
  PropensityFitOptions o;
  o.max_iter = 1;
  try {
    FitSieveLogit(TwoContextLog(), kOneHot, o);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_FALSE(e.last_iterate().empty());
    EXPECT_GT(e.gradient_norm(), 0.0);
  }
}

TEST(RidgeLogistic, Examples) {
  EXPECT_NEAR(FitRidgeLogisticPropensity(L4(), kIntercept, 0.0).PredictRaw(Context{{0.0}, 1})[1], 0.75, 1e-9);
  // The intercept is unpenalized, so any lambda leaves the frequency.
  EXPECT_NEAR(FitRidgeLogisticPropensity(L4(), kIntercept, 1e8).PredictRaw(Context{{0.0}, 1})[1], 0.75, 1e-9);
  // One-hot has no intercept: the penalty bounds the separated MLE.
  const auto m = FitRidgeLogisticPropensity(AllActionOne(20, true), kOneHot, 1.0);
  const double p1 = m.PredictRaw(Context{{0.0}, 1})[1];
  EXPECT_GT(p1, 0.75);
  EXPECT_LT(p1, 1.0);
}

TEST(RidgeLogistic, LambdaZeroAgreesWithSieveLogit) {
  const auto log = RunLogging(MakeS3(), 4000, 2, 8);
  for (const auto& spec : {kOneHot, BasisSpec::Parse("onehot+batch")}) {
    const auto a = FitSieveLogit(log, spec);
    const auto b = FitRidgeLogisticPropensity(log, spec, 0.0);
    for (const auto& r : log.records) {
      ASSERT_NEAR(a.PredictRaw(r)[1], b.PredictRaw(r)[1], 1e-8);
    }
  }
}

TEST(PropensityFamilies, ConsistentOnS3) {
  const auto env = MakeS3();
  const auto log = RunLogging(env, 100000, 2, 21);
  const std::vector<PropensityModel> models{FitSieveLs(log, kOneHot), FitSieveLogit(log, kOneHot),
                                            FitRidgeLogisticPropensity(log, kOneHot, 1.0)};
  for (const auto& m : models) {
    for (int c = 0; c < 2; ++c) {
      const Context x{env.context(c).features, 1};
      const double want = c == 0 ? 0.7 : 0.3;
      EXPECT_NEAR(m.PredictRaw(x)[1], want, 0.02) << ToString(m.family());
    }
  }
}

TEST(PropensityFamilies, TrainingFitDominatesExactScore) {
  const auto log = RunLogging(MakeS3(), 3000, 2, 4);
  PropensityFitOptions o;
  o.clip_floor = 0.0;
  const auto exact = ExactTruePropensity(log);
  EXPECT_LE(MeanNegativeLogLikelihood(FitSieveLogit(log, kOneHot, o), log),
            MeanNegativeLogLikelihood(exact, log));
  EXPECT_LE(MeanNegativeLogLikelihood(FitSieveLogit(log, BasisSpec::Parse("onehot+batch"), o), log),
            MeanNegativeLogLikelihood(exact, log));
  EXPECT_LE(MeanSquaredError(FitSieveLs(log, kOneHot, o), log), MeanSquaredError(exact, log));
}

TEST(PropensityFamilies, SieveLsPermutationInvariant) {
  auto log = RunLogging(MakeS3(), 500, 1, 4);
  const auto a = FitSieveLs(log, kOneHot);
  std::mt19937_64 gen(3);
  std::shuffle(log.records.begin(), log.records.end(), gen);
  const auto b = FitSieveLs(log, kOneHot);
  // Same columns either way: levels are sorted.
  EXPECT_LT((a.coefficients() - b.coefficients()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PropensityModel, JsonRoundTrip) {
  const auto log = RunLogging(MakeS3(), 800, 2, 6);
  for (const auto& m : {FitSieveLs(log, kOneHot), FitSieveLogit(log, BasisSpec::Parse("onehot+batch")),
                        FitRidgeLogisticPropensity(log, kIntercept, 2.0), ExactTruePropensity(log, 0.0)}) {
    const auto back = PropensityModel::FromJson(m.ToJson());
    for (const auto& r : log.records) ASSERT_EQ(back.Predict(r), m.Predict(r));
  }
}

TEST(PropensityModel, ImportedScores) {
  std::istringstream in("round,p_0,p_1\n0,0.25,0.75\n1,0.5,0.5\n2,0.999,0.001\n3,0.2,0.8\n");
  const auto m = ReadImportedPropensity(in);
  const auto log = L4();
  EXPECT_EQ(m.Predict(log.records[0])[1], 0.75);
  EXPECT_EQ(m.Predict(log.records[2])[1], kDefaultClipFloor);
  auto missing = log;
  missing.records[0].round = 99;
  EXPECT_THROW(m.Predict(missing.records[0]), ValidationError);
}

TEST(Clip, Examples) {
  EXPECT_EQ(ClipPropensity({0.001, 0.999}, 0.01), (ProbabilityVector{0.01, 0.999}));
  EXPECT_EQ(ClipPropensity({0.5, 0.5}, 0.01), (ProbabilityVector{0.5, 0.5}));
  EXPECT_EQ(ClipPropensity({0.0, 1.0}, 0.05), (ProbabilityVector{0.05, 1.0}));
  EXPECT_THROW(ClipPropensity({0.5, 0.5}, 0.5), ValidationError);
  EXPECT_THROW(ClipPropensity({0.5, 0.5}, -0.1), ValidationError);
}

TEST(RewardModel, Examples) {
  const auto log = MakeLog({Record(0, 1, 1.0), Record(1, 1, 0.0), Record(2, 1, 1.0), Record(3, 0, 0.0),
                            Record(4, 0, 0.0)});
  const auto mu1 = FitRewardModel(log, 1, kIntercept, 0.0, RewardLink::kLogistic);
  EXPECT_NEAR(mu1.Predict(Context{{0.0}, 1}), 2.0 / 3.0, 1e-9);
  const auto mu0 = FitRewardModel(log, 0, kIntercept, 0.0, RewardLink::kIdentity);
  EXPECT_NEAR(mu0.Predict(Context{{0.0}, 1}), 0.0, 1e-12);

  const auto groups = FitRewardModel(TwoContextLog(), 1, kOneHot, 0.0, RewardLink::kIdentity);
  // Action 1 in x=0: rounds 0,1,3 with rewards 0,1,1; in x=1: round 5 with reward 0.
  EXPECT_NEAR(groups.Predict(Context{{0.0}, 1}), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(groups.Predict(Context{{1.0}, 1}), 0.0, 1e-12);

  try {
    FitRewardModel(AllActionOne(4, false), 0, kIntercept, 0.0, RewardLink::kIdentity);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("no observations for action 0"), std::string::npos);
  }
}

TEST(RewardModel, LogisticPredictionsInOpenUnitInterval) {
  const auto log = RunLogging(MakeS3(), 2000, 1, 2);
  const auto set = FitRewardModels(log, kOneHot, 0.01, RewardLink::kLogistic);
  for (const auto& f : {FeatureVector{0.0}, FeatureVector{1.0}}) {
    for (double mu : set.PredictAll(Context{f, 1})) {
      EXPECT_GT(mu, 0.0);
      EXPECT_LT(mu, 1.0);
    }
  }
  const auto back = RewardModelSet::FromJson(set.ToJson());
  EXPECT_EQ(back.PredictAll(Context{{1.0}, 1}), set.PredictAll(Context{{1.0}, 1}));
}

}  // namespace
}  // namespace ope
