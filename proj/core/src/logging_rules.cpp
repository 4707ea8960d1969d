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

#include "ope/logging_rules.hpp"

#include <algorithm>
#include <cmath>

#include "ope/error.hpp"
#include "ope/numeric.hpp"

namespace ope {
namespace {

int ArgmaxLowest(std::span<const double> v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace

ProbabilityVector ChooseEpsGreedy(std::span<const double> mu_hat, double eps) {
  if (mu_hat.size() < 2) throw ValidationError("epsilon-greedy needs at least two actions");
  if (!(eps >= 0.0 && eps <= 1.0)) throw ValidationError("epsilon must lie in [0, 1]");
  for (double v : mu_hat) {
    if (!std::isfinite(v)) throw ValidationError("epsilon-greedy needs finite estimates");
  }
  const auto m = static_cast<double>(mu_hat.size() - 1);
  ProbabilityVector p(mu_hat.size(), eps / m);
  p[static_cast<std::size_t>(ArgmaxLowest(mu_hat))] = 1.0 - eps;
  return p;
}

ProbabilityVector ChooseThompsonGaussian(std::span<const double> mu_hat,
                                         std::span<const double> sigma2_hat,
                                         int num_draws, Rng& rng) {
  const std::size_t n = mu_hat.size();
  if (n < 2 || sigma2_hat.size() != n) {
    throw ValidationError("Thompson sampling needs matching mean/variance vectors of size >= 2");
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (!std::isfinite(mu_hat[a]) || !(sigma2_hat[a] >= 0.0)) {
      throw ValidationError("Thompson sampling needs finite means and nonnegative variances");
    }
  }
  ProbabilityVector p(n, 0.0);
  if (std::all_of(sigma2_hat.begin(), sigma2_hat.end(), [](double s) { return s == 0.0; })) {
    p[static_cast<std::size_t>(ArgmaxLowest(mu_hat))] = 1.0;
    return p;
  }
  if (n == 2) {
    const double scale = std::sqrt(sigma2_hat[0] + sigma2_hat[1]);
    p[1] = NormalCdf((mu_hat[1] - mu_hat[0]) / scale);
    p[0] = 1.0 - p[1];
    return p;
  }
  if (num_draws < 1) throw ValidationError("Thompson sampling needs num_draws >= 1");
  std::vector<double> sd(n);
  for (std::size_t a = 0; a < n; ++a) sd[a] = std::sqrt(sigma2_hat[a]);
  std::vector<long long> wins(n, 0);
  std::vector<double> draw(n);
  for (int i = 0; i < num_draws; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      draw[a] = sd[a] > 0.0 ? mu_hat[a] + sd[a] * rng.Normal() : mu_hat[a];
    }
    ++wins[static_cast<std::size_t>(ArgmaxLowest(draw))];
  }
  for (std::size_t a = 0; a < n; ++a) {
    p[a] = static_cast<double>(wins[a]) / static_cast<double>(num_draws);
  }
  return p;
}

ArmEstimates InitialEstimates(const SyntheticEnv& env) {
  const auto c = static_cast<std::size_t>(env.num_contexts());
  const auto m1 = static_cast<std::size_t>(env.num_actions());
  return {std::vector(c, std::vector<double>(m1, kInitialMeanEstimate)),
          std::vector(c, std::vector<double>(m1, kInitialVarianceEstimate))};
}

ArmEstimates PopulationEstimates(const SyntheticEnv& env, int batch) {
  ArmEstimates est = InitialEstimates(env);
  if (batch <= 1) return est;
  for (int c = 0; c < env.num_contexts(); ++c) {
    for (int a = 0; a < env.num_actions(); ++a) {
      est.mean[c][a] = env.arm(c, a).mean;
      est.variance[c][a] = env.arm(c, a).Variance();
    }
  }
  return est;
}

std::vector<MixtureComponent> LoggingDistribution(const SyntheticEnv& env, int context_index,
                                                  int batch, const ArmEstimates& estimates,
                                                  std::uint64_t mc_seed) {
  const auto c = static_cast<std::size_t>(context_index);
  return std::visit(
      [&](const auto& rule) -> std::vector<MixtureComponent> {
        using Rule = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<Rule, UniformRule>) {
          return {{ProbabilityVector(env.num_actions(), 1.0 / env.num_actions()), 1.0}};
        } else if constexpr (std::is_same_v<Rule, EpsGreedyRule>) {
          return {{ChooseEpsGreedy(estimates.mean.at(c), rule.Epsilon(batch)), 1.0}};
        } else if constexpr (std::is_same_v<Rule, ThompsonRule>) {
          Rng rng(mc_seed);
          return {{ChooseThompsonGaussian(estimates.mean.at(c), estimates.variance.at(c),
                                          rule.num_draws, rng),
                   1.0}};
        } else {
          return rule.per_context.at(c);
        }
      },
      env.logging());
}

ProbabilityVector MixtureMean(std::span<const MixtureComponent> components) {
  if (components.empty()) throw ValidationError("empty mixture");
  ProbabilityVector mean(components.front().probabilities.size(), 0.0);
  for (const auto& comp : components) {
    for (std::size_t a = 0; a < mean.size(); ++a) mean[a] += comp.weight * comp.probabilities[a];
  }
  return mean;
}

std::uint64_t PopulationMcSeed(int context_index, int batch) {
  return MixSeed(MixSeed(0x5eedf00dULL, static_cast<std::uint64_t>(context_index)),
                 static_cast<std::uint64_t>(batch));
}

}  // namespace ope
