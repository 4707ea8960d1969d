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

#ifndef OPE_TESTS_FIXTURES_HPP_
#define OPE_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <vector>

#include "ope/types.hpp"

namespace ope::testing {

inline LogRecord Record(std::int64_t round, int action, double reward, FeatureVector x = {0.0},
                        int batch = 1) {
  LogRecord r;
  r.round = round;
  r.context = Context{std::move(x), batch};
  r.action = action;
  r.reward = reward;
  return r;
}

inline BanditLog MakeLog(std::vector<LogRecord> records, int num_actions = 2) {
  BanditLog log;
  log.records = std::move(records);
  log.action_set.count = num_actions;
  int batches = 1;
  for (const auto& r : log.records) batches = std::max(batches, r.context.batch_id);
  log.num_batches = batches;
  return log;
}

// L4: one context, D1 = [1,1,0,1], Y = [1,0,0,1], p0 = (0.5, 0.5), realized
// p1 = [0.7, 0.3, 0.7, 0.7].
inline BanditLog L4() {
  const int actions[] = {1, 1, 0, 1};
  const double rewards[] = {1, 0, 0, 1};
  const double realized1[] = {0.7, 0.3, 0.7, 0.7};
  std::vector<LogRecord> records;
  for (int t = 0; t < 4; ++t) {
    auto r = Record(t, actions[t], rewards[t]);
    r.true_propensity = ProbabilityVector{0.5, 0.5};
    r.realized_propensity = ProbabilityVector{1.0 - realized1[t], realized1[t]};
    records.push_back(r);
  }
  return MakeLog(std::move(records));
}

}  // namespace ope::testing

#endif  // OPE_TESTS_FIXTURES_HPP_
