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

#include "ope/oracle.hpp"

#include <cmath>

#include "ope/error.hpp"
#include "ope/logging_rules.hpp"

namespace ope {
namespace {

Context CellContext(const SyntheticEnv& env, const OracleCell& cell) {
  return {env.context(cell.context_index).features, cell.batch};
}

double Theta(const SyntheticEnv& env, int c, const std::vector<double>& pi) {
  double theta = 0.0;
  for (int a = 0; a < env.num_actions(); ++a) theta += env.arm(c, a).mean * pi[a];
  return theta;
}

void CheckSupport(const OracleCell& cell, const std::vector<double>& pi) {
  for (std::size_t a = 0; a < pi.size(); ++a) {
    if (pi[a] != 0.0 && !(cell.p0[a] > 0.0)) {
      throw ValidationError("bound undefined: logging propensity of action " +
                            std::to_string(a) + " is zero where the policy puts weight");
    }
  }
}

// Cells without logging information; used where only q and the batch shares
// matter.
std::vector<OracleCell> ValueCells(const SyntheticEnv& env, const BatchLayout& layout) {
  std::vector<OracleCell> cells;
  const auto shares = layout.BatchFractions();
  for (int b = 1; b <= layout.batches; ++b) {
    const double share = shares[static_cast<std::size_t>(b - 1)];
    if (share == 0.0) continue;
    for (int c = 0; c < env.num_contexts(); ++c) {
      OracleCell cell;
      cell.weight = env.context(c).probability * share;
      cell.context_index = c;
      cell.batch = b;
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace

std::vector<OracleCell> OracleCells(const SyntheticEnv& env, const BatchLayout& layout) {
  if (env.has_random_logging()) {
    throw ValidationError(
        "oracles need a nonrandom logging rule; use population estimates for batched rules");
  }
  auto cells = ValueCells(env, layout);
  for (auto& cell : cells) {
    cell.distribution = LoggingDistribution(env, cell.context_index, cell.batch,
                                            PopulationEstimates(env, cell.batch),
                                            PopulationMcSeed(cell.context_index, cell.batch));
    cell.p0 = MixtureMean(cell.distribution);
  }
  return cells;
}

double TrueValue(const SyntheticEnv& env, const PolicySpec& policy, const BatchLayout& layout) {
  if (policy.num_actions() != env.num_actions()) {
    throw ValidationError("policy and environment disagree on the number of actions");
  }
  double v = 0.0;
  for (const auto& cell : ValueCells(env, layout)) {
    const auto pi = policy.Probabilities(CellContext(env, cell));
    v += cell.weight * Theta(env, cell.context_index, pi);
  }
  return v;
}

double LoggingPolicyValue(const SyntheticEnv& env, const BatchLayout& layout) {
  double v = 0.0;
  for (const auto& cell : OracleCells(env, layout)) {
    v += cell.weight * Theta(env, cell.context_index, cell.p0);
  }
  return v;
}

double EfficiencyBound(const SyntheticEnv& env, const PolicySpec& policy,
                       const BatchLayout& layout) {
  return VarianceGaps(env, policy, layout).efficiency_bound;
}

GroundTruth VarianceGaps(const SyntheticEnv& env, const PolicySpec& policy,
                         const BatchLayout& layout) {
  if (policy.num_actions() != env.num_actions()) {
    throw ValidationError("policy and environment disagree on the number of actions");
  }
  const auto cells = OracleCells(env, layout);
  const int m1 = env.num_actions();

  GroundTruth gt;
  std::vector<std::vector<double>> pis;
  for (const auto& cell : cells) {
    auto pi = policy.Probabilities(CellContext(env, cell));
    CheckSupport(cell, pi);
    gt.true_value += cell.weight * Theta(env, cell.context_index, pi);
    pis.push_back(std::move(pi));
  }

  double second_moment = 0.0;  // E[(sum_a Y D_a pi_a / p0_a)^2]
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& cell = cells[i];
    const auto& pi = pis[i];
    const int c = cell.context_index;
    const double theta = Theta(env, c, pi);
    double bound_term = (theta - gt.true_value) * (theta - gt.true_value);
    double gap1_term = 0.0;
    double gap2_term = 0.0;
    double moment_term = 0.0;
    for (int a = 0; a < m1; ++a) {
      const auto& arm = env.arm(c, a);
      const double p0 = cell.p0[a];
      if (pi[a] != 0.0) {
        bound_term += arm.Variance() * pi[a] * pi[a] / p0;
        moment_term += arm.SecondMoment() * pi[a] * pi[a] / p0;
        double inv_mean = 0.0;  // E[1{p_a > 0} / p_a | x]
        for (const auto& comp : cell.distribution) {
          if (comp.probabilities[a] > 0.0) inv_mean += comp.weight / comp.probabilities[a];
        }
        gap2_term += arm.SecondMoment() * pi[a] * pi[a] * (inv_mean - 1.0 / p0);
      }
      if (p0 > 0.0) {
        const double d = arm.mean * pi[a] / p0 - theta;
        gap1_term += p0 * d * d;
      }
    }
    gt.efficiency_bound += cell.weight * bound_term;
    gt.gap_part1 += cell.weight * gap1_term;
    gt.gap_part2 += cell.weight * gap2_term;
    second_moment += cell.weight * moment_term;
  }
  gt.tilde_avar = second_moment - gt.true_value * gt.true_value;
  // Jensen guarantees gap_part2 >= 0; clear rounding noise around zero.
  if (gt.gap_part2 < 0.0 && gt.gap_part2 > -1e-12) gt.gap_part2 = 0.0;

  const double residual = gt.tilde_avar - (gt.efficiency_bound + gt.gap_part1);
  if (std::abs(residual) > 1e-9 * std::max(1.0, std::abs(gt.tilde_avar))) {
    throw NumericalError("oracle identity violated: tilde_avar - (bound + gap1) = " +
                         std::to_string(residual));
  }
  return gt;
}

}  // namespace ope
