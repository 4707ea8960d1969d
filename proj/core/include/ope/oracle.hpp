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

#ifndef OPE_ORACLE_HPP_
#define OPE_ORACLE_HPP_

#include <vector>

#include "ope/environment.hpp"
#include "ope/policy.hpp"
#include "ope/types.hpp"

namespace ope {

// Closed-form quantities for a policy in a synthetic environment.
//
//   efficiency_bound: E[sum_a Var[Y(a)|X] pi(a|X)^2 / p0_a(X) + (theta(X) - V)^2]
//   tilde_avar:       E[g^2], the asymptotic variance of IPW with the true
//                     score, computed directly from second moments
//   gap_part1:        E[sum_a p0_a(X) (mu(a|X) pi(a|X) / p0_a(X) - theta(X))^2]
//   gap_part2:        E[sum_a E[Y(a)^2|X] pi(a|X)^2 (E[1{p_a>0}/p_a | X] - 1/p0_a(X))]
//
// where theta(X) = sum_a mu(a|X) pi(a|X).
struct GroundTruth {
  double true_value = 0.0;
  double efficiency_bound = 0.0;
  double tilde_avar = 0.0;
  double gap_part1 = 0.0;
  double gap_part2 = 0.0;

  // Asymptotic variance of IPW with the realized probability vectors.
  double ddot_avar() const { return tilde_avar + gap_part2; }
};

// One (context, batch) cell of the augmented context X = (x, batch).
struct OracleCell {
  double weight = 0.0;  // q(x) times the batch's share of rounds.
  int context_index = 0;
  int batch = 1;
  std::vector<MixtureComponent> distribution;  // F(.|x, batch)
  ProbabilityVector p0;                         // E[p | x, batch]
};

// Enumerates the cells of `env` under `layout`. Throws ValidationError when
// the logging rule is data-dependent (kSample estimates).
std::vector<OracleCell> OracleCells(const SyntheticEnv& env, const BatchLayout& layout = {});

// V = E[sum_a mu(a|X) pi(a|X)]. Throws if the policy does not cover a context.
double TrueValue(const SyntheticEnv& env, const PolicySpec& policy,
                 const BatchLayout& layout = {});

// Value of the logging policy itself, E[sum_a p0_a(X) mu(a|X)].
double LoggingPolicyValue(const SyntheticEnv& env, const BatchLayout& layout = {});

// Throws ValidationError ("bound undefined") if p0_a(x) = 0 where pi(a|x) != 0.
double EfficiencyBound(const SyntheticEnv& env, const PolicySpec& policy,
                       const BatchLayout& layout = {});

// All oracle quantities. Verifies tilde_avar = efficiency_bound + gap_part1
// to 1e-9 and throws NumericalError if the identity fails.
GroundTruth VarianceGaps(const SyntheticEnv& env, const PolicySpec& policy,
                         const BatchLayout& layout = {});

}  // namespace ope

#endif  // OPE_ORACLE_HPP_
