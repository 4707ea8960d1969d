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

#ifndef OPE_TYPES_HPP_
#define OPE_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ope {

using ProbabilityVector = std::vector<double>;
using FeatureVector = std::vector<double>;

// Tolerance on |sum(p) - 1| for any probability vector.
inline constexpr double kProbabilitySumTolerance = 1e-9;

// A round's covariates. The batch number is carried as a separate coordinate.
struct Context {
  FeatureVector features;
  int batch_id = 1;

  friend bool operator==(const Context&, const Context&) = default;
};

struct ActionSet {
  int count = 2;
  std::vector<std::string> labels;  // Cosmetic; may be empty.

  friend bool operator==(const ActionSet&, const ActionSet&) = default;
};

struct LogRecord {
  std::int64_t round = 0;
  Context context;
  int action = 0;
  double reward = 0.0;
  // Absent means "not observed"; never encoded as zeros.
  std::optional<ProbabilityVector> realized_propensity;
  std::optional<ProbabilityVector> true_propensity;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct BanditLog {
  std::vector<LogRecord> records;
  ActionSet action_set;
  int num_batches = 1;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  int num_actions() const { return action_set.count; }
  // Feature dimensionality of the first record, or 0 for an empty log.
  std::size_t feature_dim() const {
    return records.empty() ? 0 : records.front().context.features.size();
  }

  friend bool operator==(const BanditLog&, const BanditLog&) = default;
};

// True iff every coordinate is >= 0 and the sum is 1 within tolerance.
bool IsProbabilityVector(std::span<const double> p,
                         double tolerance = kProbabilitySumTolerance);

// Returns a copy of `log` restricted to records whose batch id lies in
// [first_batch, last_batch]. Batch ids are preserved.
BanditLog SliceBatches(const BanditLog& log, int first_batch, int last_batch);

}  // namespace ope

#endif  // OPE_TYPES_HPP_
