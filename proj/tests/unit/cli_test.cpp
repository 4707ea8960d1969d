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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#ifndef OPE_CLI_PATH
#error "OPE_CLI_PATH must name the ope executable"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ope_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  int Run(const std::string& args) const {
    const std::string cmd = std::string(OPE_CLI_PATH) + " " + args + " >" + Path("stdout.txt") + " 2>" +
                            Path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  void Write(const std::string& name, const std::string& text) const { std::ofstream(Path(name)) << text; }

  json ReadJson(const std::string& name) const {
    std::ifstream in(Path(name));
    return json::parse(in);
  }

  std::string ReadText(const std::string& name) const {
    std::ifstream in(Path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(Cli, EndToEndEstimateAndVariance) {
  ASSERT_EQ(Run("simulate --env S1 --t 2000 --b 2 --seed 4 --out " + Path("log.csv")), 0);
  Write("policy.json", R"({"kind": "degenerate", "action": 1, "num_actions": 2})");
  ASSERT_EQ(Run("fit-propensity --log " + Path("log.csv") + " --family sieve-logit --basis onehot --clip 0.01 --out " +
                Path("model.json")),
            0);
  ASSERT_EQ(Run("estimate --log " + Path("log.csv") + " --policy " + Path("policy.json") + " --score estimated:" +
                Path("model.json") + " --out " + Path("est.json")),
            0);
  const auto est = ReadJson("est.json");
  EXPECT_EQ(est["kind"], "hat");
  EXPECT_NEAR(est["value"].get<double>(), 0.6, 0.06);

  ASSERT_EQ(Run("fit-reward --log " + Path("log.csv") + " --out " + Path("mu.json")), 0);
  ASSERT_EQ(Run("variance --log " + Path("log.csv") + " --est " + Path("est.json") + " --mu " + Path("mu.json") +
                " --level 0.9 --out " + Path("report.json")),
            0);
  const auto rep = ReadJson("report.json");
  EXPECT_EQ(rep["estimator_kind"], "hat");
  EXPECT_NEAR(rep["avar"].get<double>(), 0.48, 0.1);
  EXPECT_LT(rep["ci"][0].get<double>(), rep["ci"][1].get<double>());

  ASSERT_EQ(Run("estimate --log " + Path("log.csv") + " --policy " + Path("policy.json") +
                " --score true --self-normalized --out " + Path("sn.json")),
            0);
  EXPECT_EQ(ReadJson("sn.json")["kind"], "tilde_sn");
  ASSERT_EQ(Run("variance --log " + Path("log.csv") + " --est " + Path("sn.json") + " --out " + Path("r2.json")), 0);

  ASSERT_EQ(Run("estimate --log " + Path("log.csv") + " --policy " + Path("policy.json") +
                " --score realized --out " + Path("dd.json")),
            0);
  // No variance estimator exists for the realized-score estimator.
  EXPECT_EQ(Run("variance --log " + Path("log.csv") + " --est " + Path("dd.json")), 2);
}

TEST_F(Cli, ValidationErrorsExitTwo) {
  EXPECT_EQ(Run("estimate --log " + Path("missing.csv") + " --policy x.json"), 2);
  EXPECT_EQ(Run("simulate --env NOPE --t 10"), 2);
  EXPECT_EQ(Run("bogus-subcommand"), 2);
  ASSERT_EQ(Run("simulate --env S1 --t 50 --out " + Path("log.csv")), 0);
  EXPECT_EQ(Run("fit-propensity --log " + Path("log.csv") + " --family forest"), 2);
  Write("ate.json", R"({"kind": "treatment_effect", "treated": 1, "control": 0, "num_actions": 2})");
  EXPECT_EQ(Run("estimate --log " + Path("log.csv") + " --policy " + Path("ate.json") + " --score true --self-normalized"), 2);
  Write("bad.csv", "round,batch,action,reward,x_0,p_true_0,p_true_1\n0,1,1,1,0,0.6,0.6\n");
  EXPECT_EQ(Run("estimate --log " + Path("bad.csv") + " --policy " + Path("ate.json")), 2);
  EXPECT_NE(ReadText("stderr.txt").find("true_sum"), std::string::npos);
}

TEST_F(Cli, NumericalFailureExitsThree) {
  std::string csv = "round,batch,action,reward,x_0\n";
  for (int t = 0; t < 10; ++t) csv += std::to_string(t) + ",1,1,1,0\n";
  Write("sep.csv", csv);
  EXPECT_EQ(Run("fit-propensity --log " + Path("sep.csv") + " --family sieve-logit --basis intercept"), 3);
}

TEST_F(Cli, MonteCarloAndReport) {
  Write("exp.json", R"({"env": "S1", "policy": {"kind": "degenerate", "action": 1, "num_actions": 2},
                        "T": 300, "replications": 20, "seed": 3, "estimators": ["hat", "tilde"]})");
  ASSERT_EQ(Run("monte-carlo --config " + Path("exp.json") + " --workers 2 --out " + Path("summary.json")), 0);
  EXPECT_EQ(ReadJson("summary.json")["replications"], 20);
  ASSERT_EQ(Run("report --summary " + Path("summary.json") + " --format md"), 0);
  const auto md = ReadText("stdout.txt");
  EXPECT_NE(md.find("| hat |"), std::string::npos);
  EXPECT_NE(md.find("shrinkage_in_ci"), std::string::npos);
}

TEST_F(Cli, ImportedScores) {
  ASSERT_EQ(Run("simulate --env S1 --t 4 --seed 1 --out " + Path("log.csv")), 0);
  Write("scores.csv", "round,p_0,p_1\n0,0.5,0.5\n1,0.5,0.5\n2,0.5,0.5\n3,0.5,0.5\n");
  ASSERT_EQ(Run("fit-propensity --family import --scores " + Path("scores.csv") + " --out " + Path("m.json")), 0);
  Write("policy.json", R"({"kind": "uniform", "num_actions": 2})");
  ASSERT_EQ(Run("estimate --log " + Path("log.csv") + " --policy " + Path("policy.json") + " --score estimated:" +
                Path("m.json") + " --out " + Path("e.json")),
            0);
  ASSERT_EQ(Run("estimate --log " + Path("log.csv") + " --policy " + Path("policy.json") + " --score true --out " +
                Path("t.json")),
            0);
  EXPECT_EQ(ReadJson("e.json")["value"], ReadJson("t.json")["value"]);
}

}  // namespace
