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

#ifndef OPE_LOGGING_RULES_HPP_
#define OPE_LOGGING_RULES_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "ope/environment.hpp"
#include "ope/random.hpp"
#include "ope/types.hpp"

namespace ope {

// Epsilon-greedy choice probabilities: 1 - eps on the argmax of mu_hat
// (lowest index on ties), eps / m on each of the m other actions.
ProbabilityVector ChooseEpsGreedy(std::span<const double> mu_hat, double eps);

// Probability that each action has the highest draw when action a's reward
// is sampled from N(mu_hat[a], sigma2_hat[a]) independently. Two actions use
// the closed form; more actions use `num_draws` Monte Carlo draws from `rng`.
// When every variance is zero the action with the largest mean (lowest index
// on ties) gets probability one.
ProbabilityVector ChooseThompsonGaussian(std::span<const double> mu_hat,
                                         std::span<const double> sigma2_hat,
                                         int num_draws, Rng& rng);

// Per (context, action) reward mean/variance estimates used by batched rules.
struct ArmEstimates {
  std::vector<std::vector<double>> mean;      // [context][action]
  std::vector<std::vector<double>> variance;  // [context][action]
};

ArmEstimates InitialEstimates(const SyntheticEnv& env);
// Estimates a kPopulation rule uses in `batch` (1-based).
ArmEstimates PopulationEstimates(const SyntheticEnv& env, int batch);

// The distribution F_b(.|x) of the realized probability vector in context
// `context_index` during `batch`, given frozen estimates. `mc_seed` seeds the
// Monte Carlo evaluation of multi-action Thompson sampling.
std::vector<MixtureComponent> LoggingDistribution(const SyntheticEnv& env, int context_index,
                                                  int batch, const ArmEstimates& estimates,
                                                  std::uint64_t mc_seed);

// p0 = E[p] under the mixture.
ProbabilityVector MixtureMean(std::span<const MixtureComponent> components);

// Seed used for Thompson Monte Carlo under kPopulation estimates. Shared by
// the simulator and the oracles so both see the same p0.
std::uint64_t PopulationMcSeed(int context_index, int batch);

}  // namespace ope

#endif  // OPE_LOGGING_RULES_HPP_
