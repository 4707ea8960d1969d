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

#include "ope/environment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ope/error.hpp"
#include "ope/logging_rules.hpp"

namespace ope {

double EpsGreedyRule::Epsilon(int batch) const {
  if (eps.empty()) throw ValidationError("epsilon-greedy rule has no epsilon values");
  const std::size_t i = static_cast<std::size_t>(std::max(batch, 1) - 1);
  return eps[std::min(i, eps.size() - 1)];
}

SyntheticEnv::SyntheticEnv(std::string name, std::vector<EnvContext> contexts,
                           std::vector<std::vector<ArmSpec>> arms, LoggingRule logging)
    : name_(std::move(name)),
      contexts_(std::move(contexts)),
      arms_(std::move(arms)),
      logging_(std::move(logging)) {
  if (contexts_.empty()) throw ValidationError("environment has no contexts");
  if (arms_.size() != contexts_.size()) {
    throw ValidationError("environment needs arm specifications for every context");
  }
  num_actions_ = static_cast<int>(arms_.front().size());
  if (num_actions_ < 2) throw ValidationError("environment needs at least two actions");
  double total = 0.0;
  std::size_t dim = contexts_.front().features.size();
  for (std::size_t c = 0; c < contexts_.size(); ++c) {
    if (!(contexts_[c].probability >= 0.0)) {
      throw ValidationError("context probability must be nonnegative");
    }
    if (contexts_[c].features.size() != dim) {
      throw ValidationError("environment contexts have different feature dimensionality");
    }
    total += contexts_[c].probability;
    if (static_cast<int>(arms_[c].size()) != num_actions_) {
      throw ValidationError("context " + std::to_string(c) + " has the wrong number of arms");
    }
    for (const auto& arm : arms_[c]) {
      if (!std::isfinite(arm.mean)) throw ValidationError("arm mean must be finite");
      if (arm.distribution == RewardDistribution::kBernoulli &&
          (arm.mean < 0.0 || arm.mean > 1.0)) {
        throw ValidationError("Bernoulli arm mean outside [0, 1]");
      }
      if (arm.distribution == RewardDistribution::kGaussian &&
          !(arm.variance >= 0.0 && std::isfinite(arm.variance))) {
        throw ValidationError("Gaussian arm variance must be finite and nonnegative");
      }
    }
  }
  if (std::abs(total - 1.0) > kProbabilitySumTolerance) {
    throw ValidationError("context probabilities sum to " + std::to_string(total) + ", not 1");
  }
  for (std::size_t c = 0; c < contexts_.size(); ++c) {
    for (std::size_t d = c + 1; d < contexts_.size(); ++d) {
      if (contexts_[c].features == contexts_[d].features) {
        throw ValidationError("environment contexts must have distinct features");
      }
    }
  }

  // Positivity of the logging propensity in every context.
  if (const auto* eg = std::get_if<EpsGreedyRule>(&logging_)) {
    if (eg->eps.empty()) throw ValidationError("epsilon-greedy rule has no epsilon values");
    for (double e : eg->eps) {
      if (!(e > 0.0 && e < 1.0)) {
        throw ValidationError("epsilon must lie in (0, 1) for positive propensities");
      }
    }
  } else if (const auto* ts = std::get_if<ThompsonRule>(&logging_)) {
    if (ts->num_draws < 1) throw ValidationError("Thompson rule needs num_draws >= 1");
    for (const auto& row : arms_) {
      for (const auto& arm : row) {
        if (!(arm.Variance() > 0.0)) {
          throw ValidationError("Thompson logging needs every arm variance > 0");
        }
      }
    }
  } else if (const auto* fs = std::get_if<FixedStochasticRule>(&logging_)) {
    if (fs->per_context.size() != contexts_.size()) {
      throw ValidationError("fixed stochastic rule needs one mixture per context");
    }
    for (std::size_t c = 0; c < fs->per_context.size(); ++c) {
      const auto& mix = fs->per_context[c];
      if (mix.empty()) throw ValidationError("empty logging mixture for a context");
      double w = 0.0;
      for (const auto& comp : mix) {
        if (static_cast<int>(comp.probabilities.size()) != num_actions_ ||
            !IsProbabilityVector(comp.probabilities)) {
          throw ValidationError("logging mixture component is not a probability vector");
        }
        if (!(comp.weight > 0.0)) throw ValidationError("mixture weights must be positive");
        w += comp.weight;
      }
      if (std::abs(w - 1.0) > kProbabilitySumTolerance) {
        throw ValidationError("mixture weights must sum to 1");
      }
      for (double p : MixtureMean(mix)) {
        if (!(p > 0.0)) {
          throw ValidationError("logging propensity must be positive for every action (context " +
                                std::to_string(c) + ")");
        }
      }
    }
  }
}

bool SyntheticEnv::has_random_logging() const {
  if (const auto* eg = std::get_if<EpsGreedyRule>(&logging_)) {
    return eg->estimates == EstimateSource::kSample;
  }
  if (const auto* ts = std::get_if<ThompsonRule>(&logging_)) {
    return ts->estimates == EstimateSource::kSample;
  }
  return false;
}

std::size_t BatchLayout::BatchSize() const {
  if (batches < 1) throw ValidationError("number of batches must be >= 1");
  const auto b = static_cast<std::size_t>(batches);
  return std::max<std::size_t>(1, (rounds + b - 1) / b);
}

int BatchLayout::BatchOf(std::size_t round_index) const {
  return static_cast<int>(round_index / BatchSize()) + 1;
}

std::vector<double> BatchLayout::BatchFractions() const {
  const std::size_t size = BatchSize();
  std::vector<double> out(static_cast<std::size_t>(batches), 0.0);
  if (rounds == 0) {
    std::fill(out.begin(), out.end(), 1.0 / batches);
    return out;
  }
  for (int b = 0; b < batches; ++b) {
    const std::size_t begin = std::min(rounds, static_cast<std::size_t>(b) * size);
    const std::size_t end = std::min(rounds, begin + size);
    out[static_cast<std::size_t>(b)] =
        static_cast<double>(end - begin) / static_cast<double>(rounds);
  }
  return out;
}

namespace {

ArmSpec Bern(double mean) { return {RewardDistribution::kBernoulli, mean, 0.0}; }

}  // namespace

SyntheticEnv MakeS1() {
  return SyntheticEnv("S1", {{1.0, {0.0}}}, {{Bern(0.4), Bern(0.6)}}, UniformRule{});
}

SyntheticEnv MakeS2() {
  FixedStochasticRule rule;
  rule.per_context = {{{{0.7, 0.3}, 0.5}, {{0.3, 0.7}, 0.5}}};
  return SyntheticEnv("S2", {{1.0, {0.0}}}, {{Bern(0.4), Bern(0.6)}}, rule);
}

SyntheticEnv MakeS3() {
  FixedStochasticRule rule;
  rule.per_context = {{{{0.3, 0.7}, 1.0}}, {{{0.7, 0.3}, 1.0}}};
  return SyntheticEnv("S3", {{0.5, {0.0}}, {0.5, {1.0}}},
                      {{Bern(0.2), Bern(0.8)}, {Bern(0.6), Bern(0.4)}}, rule);
}

std::vector<std::string> BuiltinEnvNames() { return {"S1", "S2", "S3"}; }

SyntheticEnv BuiltinEnv(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  if (upper == "S1") return MakeS1();
  if (upper == "S2") return MakeS2();
  if (upper == "S3") return MakeS3();
  throw ValidationError("unknown built-in environment '" + name + "'");
}

}  // namespace ope
