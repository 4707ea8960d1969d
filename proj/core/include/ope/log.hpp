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

#ifndef OPE_LOG_HPP_
#define OPE_LOG_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ope/types.hpp"

namespace ope {

struct Violation {
  std::optional<std::size_t> record;  // Absent for log-level rules.
  std::string rule;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

// Checks every structural invariant of a log. An empty result means the log
// is well formed. Violations are data, never exceptions.
std::vector<Violation> ValidateLog(const BanditLog& log);

// CSV schema, one row per round:
//   round,batch,action,reward,x_0..x_{k-1}[,p_real_0..p_real_m][,p_true_0..p_true_m]
// The header row is mandatory; each optional propensity group is present in
// full or not at all. When no propensity columns are present the action
// count is `num_actions` if given, else max(action) + 1 (at least 2).
// Throws ValidationError on malformed input.
BanditLog ReadLogCsv(std::istream& in, std::optional<int> num_actions = std::nullopt);
BanditLog ReadLogCsvFile(const std::string& path,
                         std::optional<int> num_actions = std::nullopt);

// Writes shortest round-trip decimal text, so a written log reads back
// bit-identically.
void WriteLogCsv(std::ostream& out, const BanditLog& log);
void WriteLogCsvFile(const std::string& path, const BanditLog& log);

// Shortest decimal text that round-trips to the same double.
std::string FormatDouble(double v);

}  // namespace ope

#endif  // OPE_LOG_HPP_
