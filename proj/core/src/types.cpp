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

#include "ope/types.hpp"

#include <cmath>

#include "ope/numeric.hpp"

namespace ope {

bool IsProbabilityVector(std::span<const double> p, double tolerance) {
  if (p.empty()) return false;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) return false;
  }
  return std::abs(PairwiseSum(p) - 1.0) <= tolerance;
}

BanditLog SliceBatches(const BanditLog& log, int first_batch, int last_batch) {
  BanditLog out;
  out.action_set = log.action_set;
  out.num_batches = log.num_batches;
  for (const auto& r : log.records) {
    if (r.context.batch_id >= first_batch && r.context.batch_id <= last_batch) {
      out.records.push_back(r);
    }
  }
  return out;
}

}  // namespace ope
