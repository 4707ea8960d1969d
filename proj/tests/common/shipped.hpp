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

#ifndef OPE_TESTS_SHIPPED_HPP_
#define OPE_TESTS_SHIPPED_HPP_

// Shipped environments and policies, plus an independent brute-force
// evaluation of the oracle quantities used to cross-check dgp.

#include <cmath>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ope/environment.hpp"
#include "ope/logging_rules.hpp"
#include "ope/monte_carlo.hpp"
#include "ope/policy.hpp"

#ifndef OPE_ENVS_DIR
#error "OPE_ENVS_DIR must point at the shipped envs/ directory"
#endif

namespace ope::testing {

inline std::vector<std::pair<std::string, SyntheticEnv>> ShippedEnvs() {
  std::vector<std::pair<std::string, SyntheticEnv>> out;
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(OPE_ENVS_DIR)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.emplace_back(f.stem().string(), LoadEnv(f.string()));
  return out;
}

inline std::vector<std::pair<std::string, PolicySpec>> ShippedPolicies(const SyntheticEnv& env) {
  const int n = env.num_actions();
  std::vector<std::pair<std::string, PolicySpec>> out;
  for (int a = 0; a < n; ++a) out.emplace_back("always_" + std::to_string(a), PolicySpec::Degenerate(a, n));
  out.emplace_back("uniform", PolicySpec::Uniform(n));
  out.emplace_back("ate_1_0", PolicySpec::TreatmentEffect(1, 0, n));
  out.emplace_back("best_action", TrueBestActionPolicy(env));
  return out;
}

struct Enumerated {
  double value = 0.0;
  double bound = 0.0;       // E[psi^2], psi the efficient influence function
  double tilde_avar = 0.0;  // E[(Y pi/p0 - V)^2]
  double ddot_avar = 0.0;   // E[(Y pi/p - V)^2], p drawn from F
};

// Sums over (context, batch, mixture component, action) with reward moments.
inline Enumerated Enumerate(const SyntheticEnv& env, const PolicySpec& policy, BatchLayout layout) {
  const auto fractions = layout.BatchFractions();
  struct Cell {
    double w;
    int c;
    int b;
    std::vector<MixtureComponent> mix;
    std::vector<double> p0;
  };
  std::vector<Cell> cells;
  for (int b = 1; b <= static_cast<int>(fractions.size()); ++b) {
    const auto est = b == 1 ? InitialEstimates(env) : PopulationEstimates(env, b);
    for (int c = 0; c < env.num_contexts(); ++c) {
      Cell cell{env.context(c).probability * fractions[b - 1], c, b,
                LoggingDistribution(env, c, b, est, PopulationMcSeed(c, b)), {}};
      cell.p0.assign(static_cast<std::size_t>(env.num_actions()), 0.0);
      for (const auto& m : cell.mix) {
        for (std::size_t a = 0; a < cell.p0.size(); ++a) cell.p0[a] += m.weight * m.probabilities[a];
      }
      cells.push_back(std::move(cell));
    }
  }
  Enumerated e;
  for (const auto& cell : cells) {
    const auto pi = policy.Probabilities({env.context(cell.c).features, cell.b});
    for (int a = 0; a < env.num_actions(); ++a) e.value += cell.w * pi[a] * env.arm(cell.c, a).mean;
  }
  const double v = e.value;
  for (const auto& cell : cells) {
    const auto pi = policy.Probabilities({env.context(cell.c).features, cell.b});
    double theta = 0.0;
    for (int a = 0; a < env.num_actions(); ++a) theta += pi[a] * env.arm(cell.c, a).mean;
    for (const auto& m : cell.mix) {
      for (int a = 0; a < env.num_actions(); ++a) {
        const double pa = m.probabilities[a];
        if (pa == 0.0) continue;
        const auto& arm = env.arm(cell.c, a);
        const double mu = arm.mean, ey2 = arm.Variance() + mu * mu;
        const double w = cell.w * m.weight * pa;
        // E[(kY + d)^2] = k^2 E[Y^2] + 2 k d mu + d^2
        auto second = [&](double k, double d) { return k * k * ey2 + 2 * k * d * mu + d * d; };
        e.tilde_avar += w * second(pi[a] / cell.p0[a], -v);
        e.ddot_avar += w * second(pi[a] / pa, -v);
        e.bound += w * second(pi[a] / cell.p0[a], -mu * pi[a] / cell.p0[a] + theta - v);
      }
    }
  }
  return e;
}

}  // namespace ope::testing

#endif  // OPE_TESTS_SHIPPED_HPP_
