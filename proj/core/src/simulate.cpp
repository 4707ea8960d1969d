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

#include "ope/simulate.hpp"

#include <cmath>
#include <optional>
#include <vector>

#include "ope/error.hpp"
#include "ope/logging_rules.hpp"
#include "ope/random.hpp"

namespace ope {
namespace {

struct RunningMoments {
  std::size_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void Add(double y) {
    ++n;
    sum += y;
    sum_sq += y * y;
  }
};

bool UsesSampleEstimates(const LoggingRule& rule) {
  if (const auto* eg = std::get_if<EpsGreedyRule>(&rule)) {
    return eg->estimates == EstimateSource::kSample;
  }
  if (const auto* ts = std::get_if<ThompsonRule>(&rule)) {
    return ts->estimates == EstimateSource::kSample;
  }
  return false;
}

// Sample mean and unbiased variance per arm; arms with too few observations
// keep the initial estimates.
ArmEstimates SampleEstimates(const SyntheticEnv& env,
                             const std::vector<std::vector<RunningMoments>>& moments) {
  ArmEstimates est = InitialEstimates(env);
  for (std::size_t c = 0; c < moments.size(); ++c) {
    for (std::size_t a = 0; a < moments[c].size(); ++a) {
      const auto& m = moments[c][a];
      if (m.n >= 1) est.mean[c][a] = m.sum / static_cast<double>(m.n);
      if (m.n >= 2) {
        const double mean = m.sum / static_cast<double>(m.n);
        const double var = (m.sum_sq - static_cast<double>(m.n) * mean * mean) /
                           static_cast<double>(m.n - 1);
        est.variance[c][a] = var > 0.0 ? var : 0.0;
      }
    }
  }
  return est;
}

double DrawReward(const ArmSpec& arm, Rng& rng) {
  if (arm.distribution == RewardDistribution::kBernoulli) {
    return rng.Bernoulli(arm.mean) ? 1.0 : 0.0;
  }
  return arm.mean + std::sqrt(arm.variance) * rng.Normal();
}

}  // namespace

BanditLog RunLogging(const SyntheticEnv& env, std::size_t rounds, int batches,
                     std::uint64_t seed) {
  if (batches < 1) throw ValidationError("number of batches must be >= 1");
  const BatchLayout layout{rounds, batches};
  const bool sample_mode = UsesSampleEstimates(env.logging());
  const int num_contexts = env.num_contexts();
  const int m1 = env.num_actions();

  std::vector<double> context_probs;
  for (const auto& c : env.contexts()) context_probs.push_back(c.probability);

  BanditLog log;
  log.action_set.count = m1;
  log.num_batches = batches;
  log.records.reserve(rounds);

  Rng rng(seed);
  std::vector<std::vector<RunningMoments>> moments(
      static_cast<std::size_t>(num_contexts), std::vector<RunningMoments>(static_cast<std::size_t>(m1)));

  int current_batch = 0;
  // Per-context logging distribution for the current batch, built lazily.
  std::vector<std::optional<std::vector<MixtureComponent>>> dist;
  std::vector<ProbabilityVector> p0;
  std::vector<std::vector<double>> component_weights;
  ArmEstimates frozen;

  for (std::size_t t = 0; t < rounds; ++t) {
    const int batch = layout.BatchOf(t);
    if (batch != current_batch) {
      current_batch = batch;
      frozen = sample_mode ? SampleEstimates(env, moments) : PopulationEstimates(env, batch);
      dist.assign(static_cast<std::size_t>(num_contexts), std::nullopt);
      p0.assign(static_cast<std::size_t>(num_contexts), {});
      component_weights.assign(static_cast<std::size_t>(num_contexts), {});
    }

    const int c = num_contexts == 1 ? 0 : rng.Categorical(context_probs);
    const auto cu = static_cast<std::size_t>(c);
    if (!dist[cu]) {
      const std::uint64_t mc_seed =
          sample_mode ? MixSeed(MixSeed(seed, static_cast<std::uint64_t>(c)),
                                static_cast<std::uint64_t>(batch))
                      : PopulationMcSeed(c, batch);
      dist[cu] = LoggingDistribution(env, c, batch, frozen, mc_seed);
      p0[cu] = MixtureMean(*dist[cu]);
      for (const auto& comp : *dist[cu]) component_weights[cu].push_back(comp.weight);
    }
    const auto& components = *dist[cu];
    const std::size_t k =
        components.size() == 1 ? 0 : static_cast<std::size_t>(rng.Categorical(component_weights[cu]));
    const ProbabilityVector& pt = components[k].probabilities;
    const int action = rng.Categorical(pt);
    const double reward = DrawReward(env.arm(c, action), rng);
    moments[cu][static_cast<std::size_t>(action)].Add(reward);

    LogRecord r;
    r.round = static_cast<std::int64_t>(t);
    r.context = {env.context(c).features, batch};
    r.action = action;
    r.reward = reward;
    r.realized_propensity = pt;
    r.true_propensity = p0[cu];
    log.records.push_back(std::move(r));
  }
  return log;
}

}  // namespace ope
