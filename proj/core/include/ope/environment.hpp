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

#ifndef OPE_ENVIRONMENT_HPP_
#define OPE_ENVIRONMENT_HPP_

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ope/types.hpp"

namespace ope {

enum class RewardDistribution { kBernoulli, kGaussian };

struct ArmSpec {
  RewardDistribution distribution = RewardDistribution::kBernoulli;
  double mean = 0.0;
  double variance = 0.0;  // Gaussian only; Bernoulli variance is implied.

  double Variance() const {
    return distribution == RewardDistribution::kBernoulli ? mean * (1.0 - mean) : variance;
  }
  double SecondMoment() const { return Variance() + mean * mean; }
};

struct EnvContext {
  double probability = 0.0;
  FeatureVector features;
};

// Where batched rules take their per-batch mean/variance estimates from.
//  kSample:     refit from the simulated records of all earlier batches.
//  kPopulation: large-sample limit; batch 1 uses the initial estimates and
//               later batches the true arm moments. The logging
//               distribution is then nonrandom, so oracles are available.
enum class EstimateSource { kSample, kPopulation };

struct MixtureComponent {
  ProbabilityVector probabilities;
  double weight = 1.0;
};

struct UniformRule {};

struct EpsGreedyRule {
  std::vector<double> eps;  // One value per batch; the last repeats.
  EstimateSource estimates = EstimateSource::kPopulation;

  double Epsilon(int batch) const;
};

struct ThompsonRule {
  int num_draws = 10000;  // Monte Carlo draws, used only with > 2 actions.
  EstimateSource estimates = EstimateSource::kPopulation;
};

// Per context, a finite mixture of probability vectors; p_t is drawn from
// it each round and the stored logging propensity is its mean.
struct FixedStochasticRule {
  std::vector<std::vector<MixtureComponent>> per_context;
};

using LoggingRule = std::variant<UniformRule, EpsGreedyRule, ThompsonRule, FixedStochasticRule>;

inline constexpr double kInitialMeanEstimate = 0.5;
inline constexpr double kInitialVarianceEstimate = 0.25;

// Ground-truth batched-bandit environment over finitely many contexts.
class SyntheticEnv {
 public:
  // arms[c][a] describes the reward of action a in context c. Throws
  // ValidationError unless the context probabilities sum to one, Bernoulli
  // means lie in [0, 1], and the logging rule gives every action positive
  // probability in every context.
  SyntheticEnv(std::string name, std::vector<EnvContext> contexts,
               std::vector<std::vector<ArmSpec>> arms, LoggingRule logging);

  const std::string& name() const { return name_; }
  int num_contexts() const { return static_cast<int>(contexts_.size()); }
  int num_actions() const { return num_actions_; }
  const std::vector<EnvContext>& contexts() const { return contexts_; }
  const EnvContext& context(int c) const { return contexts_.at(c); }
  const ArmSpec& arm(int c, int a) const { return arms_.at(c).at(a); }
  const LoggingRule& logging() const { return logging_; }

  // True when the logging distribution depends on simulated data, in which
  // case no closed-form oracle exists.
  bool has_random_logging() const;

 private:
  std::string name_;
  std::vector<EnvContext> contexts_;
  std::vector<std::vector<ArmSpec>> arms_;
  LoggingRule logging_;
  int num_actions_ = 0;
};

// Round-to-batch assignment: batches of ceil(T/B) rounds, the last possibly
// short (or empty when T < B).
struct BatchLayout {
  std::size_t rounds = 0;
  int batches = 1;

  std::size_t BatchSize() const;
  int BatchOf(std::size_t round_index) const;  // 1-based batch id.
  // Fraction of rounds in each batch; equal shares when rounds == 0.
  std::vector<double> BatchFractions() const;
};

// Built-in environments.
//  S1: one context, Bernoulli arms (0.4, 0.6), uniform logging.
//  S2: S1 with p_t drawn from {(0.7, 0.3), (0.3, 0.7)} with equal weight.
//  S3: contexts A, B (equal probability), Bernoulli means
//      A: (0.2, 0.8), B: (0.6, 0.4); logging p(1|A) = 0.7, p(1|B) = 0.3.
SyntheticEnv MakeS1();
SyntheticEnv MakeS2();
SyntheticEnv MakeS3();
// Looks up "S1", "S2" or "S3" (case-insensitive).
SyntheticEnv BuiltinEnv(const std::string& name);
std::vector<std::string> BuiltinEnvNames();

// JSON document:
// {contexts:[{probability, features}],
//  arms:[{context_index, action, dist:"bernoulli"|"gaussian", mean, var?}],
//  logging:{rule, params}}
nlohmann::json EnvToJson(const SyntheticEnv& env);
SyntheticEnv EnvFromJson(const nlohmann::json& j);
// Accepts a built-in name or a path to a JSON file.
SyntheticEnv LoadEnv(const std::string& name_or_path);

}  // namespace ope

#endif  // OPE_ENVIRONMENT_HPP_
