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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "ope/error.hpp"
#include "ope/log.hpp"
#include "ope/numeric.hpp"

namespace ope {
namespace {

std::vector<std::string_view> SplitCsvLine(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    auto cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                   : comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
      cell.remove_suffix(1);
    }
    cells.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double ParseDouble(std::string_view s, std::size_t line_no, std::string_view column) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("line " + std::to_string(line_no) + ": cannot parse '" +
                          std::string(s) + "' in column " + std::string(column));
  }
  return v;
}

std::int64_t ParseInt(std::string_view s, std::size_t line_no, std::string_view column) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("line " + std::to_string(line_no) + ": expected an integer, got '" +
                          std::string(s) + "' in column " + std::string(column));
  }
  return v;
}

// Returns the count of consecutive columns named prefix0, prefix1, ...
// starting at `pos`.
std::size_t CountIndexed(const std::vector<std::string_view>& header, std::size_t pos,
                         std::string_view prefix) {
  std::size_t n = 0;
  while (pos + n < header.size() &&
         header[pos + n] == std::string(prefix) + std::to_string(n)) {
    ++n;
  }
  return n;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<Violation> ValidateLog(const BanditLog& log) {
  std::vector<Violation> out;
  const int count = log.action_set.count;
  if (count < 2) {
    out.push_back({std::nullopt, "action_count", "action set needs at least 2 actions"});
  }
  if (log.num_batches < 1) {
    out.push_back({std::nullopt, "batch_count", "number of batches must be >= 1"});
  }
  const std::size_t dim = log.feature_dim();
  int prev_batch = 0;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    const std::string at = " at record " + std::to_string(i);
    if (r.context.features.size() != dim) {
      out.push_back({i, "feature_dim", "feature dimensionality differs" + at});
    }
    for (double x : r.context.features) {
      if (!std::isfinite(x)) {
        out.push_back({i, "feature_finite", "non-finite feature" + at});
        break;
      }
    }
    if (r.context.batch_id < 1 || r.context.batch_id > log.num_batches) {
      out.push_back({i, "batch_range", "batch id " + std::to_string(r.context.batch_id) +
                                           " outside 1.." + std::to_string(log.num_batches) + at});
    }
    if (r.context.batch_id < prev_batch) {
      out.push_back({i, "batch_order", "batch order not nondecreasing" + at});
    }
    prev_batch = std::max(prev_batch, r.context.batch_id);
    if (r.action < 0 || r.action >= count) {
      out.push_back({i, "action_range", "action " + std::to_string(r.action) +
                                            " outside 0.." + std::to_string(count - 1) + at});
    }
    if (!std::isfinite(r.reward)) {
      out.push_back({i, "reward_finite", "non-finite reward" + at});
    }
    auto check_vector = [&](const std::optional<ProbabilityVector>& p, const char* name) {
      if (!p) return;
      if (static_cast<int>(p->size()) != count) {
        out.push_back({i, std::string(name) + "_length",
                       std::string(name) + " propensity has wrong length" + at});
        return;
      }
      for (double v : *p) {
        if (!std::isfinite(v) || v < 0.0) {
          out.push_back({i, std::string(name) + "_negative",
                         std::string(name) + " propensity has a negative or non-finite entry" + at});
          return;
        }
      }
      if (std::abs(PairwiseSum(*p) - 1.0) > kProbabilitySumTolerance) {
        out.push_back({i, std::string(name) + "_sum",
                       std::string(name) + " propensity sum != 1" + at});
      }
    };
    check_vector(r.realized_propensity, "realized");
    check_vector(r.true_propensity, "true");
  }
  return out;
}

BanditLog ReadLogCsv(std::istream& in, std::optional<int> num_actions) {
  std::string line;
  std::size_t line_no = 0;
  // Skip leading blank lines.
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  if (line_no == 0 || line.find_first_not_of(" \t\r") == std::string::npos) {
    throw ValidationError("log CSV is empty (header row is mandatory)");
  }
  const std::string header_line = line;
  const auto header = SplitCsvLine(header_line);
  static constexpr std::string_view kFixed[] = {"round", "batch", "action", "reward"};
  if (header.size() < 4) throw ValidationError("log CSV header has fewer than 4 columns");
  for (std::size_t i = 0; i < 4; ++i) {
    if (header[i] != kFixed[i]) {
      throw ValidationError("log CSV header column " + std::to_string(i) + " must be '" +
                            std::string(kFixed[i]) + "', got '" + std::string(header[i]) + "'");
    }
  }
  std::size_t pos = 4;
  const std::size_t k = CountIndexed(header, pos, "x_");
  pos += k;
  const std::size_t n_real = CountIndexed(header, pos, "p_real_");
  pos += n_real;
  const std::size_t n_true = CountIndexed(header, pos, "p_true_");
  pos += n_true;
  if (pos != header.size()) {
    throw ValidationError("unexpected log CSV column '" + std::string(header[pos]) + "'");
  }
  if (n_real && n_true && n_real != n_true) {
    throw ValidationError("p_real and p_true column groups have different lengths");
  }
  if ((n_real && n_real < 2) || (n_true && n_true < 2)) {
    throw ValidationError("a propensity column group needs one column per action (at least 2)");
  }
  std::optional<int> width;
  if (n_real) width = static_cast<int>(n_real);
  if (n_true) width = static_cast<int>(n_true);
  if (width && num_actions && *width != *num_actions) {
    throw ValidationError("propensity columns imply " + std::to_string(*width) +
                          " actions, caller expects " + std::to_string(*num_actions));
  }

  BanditLog log;
  int max_action = 0;
  int max_batch = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = SplitCsvLine(line);
    if (cells.size() != header.size()) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
    }
    LogRecord r;
    r.round = ParseInt(cells[0], line_no, "round");
    r.context.batch_id = static_cast<int>(ParseInt(cells[1], line_no, "batch"));
    r.action = static_cast<int>(ParseInt(cells[2], line_no, "action"));
    r.reward = ParseDouble(cells[3], line_no, "reward");
    std::size_t c = 4;
    r.context.features.reserve(k);
    for (std::size_t j = 0; j < k; ++j, ++c) {
      r.context.features.push_back(ParseDouble(cells[c], line_no, header[c]));
    }
    if (n_real) {
      ProbabilityVector p;
      for (std::size_t j = 0; j < n_real; ++j, ++c) p.push_back(ParseDouble(cells[c], line_no, header[c]));
      r.realized_propensity = std::move(p);
    }
    if (n_true) {
      ProbabilityVector p;
      for (std::size_t j = 0; j < n_true; ++j, ++c) p.push_back(ParseDouble(cells[c], line_no, header[c]));
      r.true_propensity = std::move(p);
    }
    max_action = std::max(max_action, r.action);
    max_batch = std::max(max_batch, r.context.batch_id);
    log.records.push_back(std::move(r));
  }
  log.action_set.count = width ? *width : (num_actions ? *num_actions : std::max(2, max_action + 1));
  log.num_batches = max_batch;
  return log;
}

BanditLog ReadLogCsvFile(const std::string& path, std::optional<int> num_actions) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open log file '" + path + "'");
  return ReadLogCsv(in, num_actions);
}

void WriteLogCsv(std::ostream& out, const BanditLog& log) {
  const std::size_t k = log.feature_dim();
  const bool has_real = !log.empty() && std::all_of(log.records.begin(), log.records.end(),
                                                    [](const LogRecord& r) { return r.realized_propensity.has_value(); });
  const bool has_true = !log.empty() && std::all_of(log.records.begin(), log.records.end(),
                                                    [](const LogRecord& r) { return r.true_propensity.has_value(); });
  const auto any_real = std::any_of(log.records.begin(), log.records.end(),
                                    [](const LogRecord& r) { return r.realized_propensity.has_value(); });
  const auto any_true = std::any_of(log.records.begin(), log.records.end(),
                                    [](const LogRecord& r) { return r.true_propensity.has_value(); });
  if (any_real != has_real || any_true != has_true) {
    throw ValidationError("propensity columns must be present on every record or none");
  }
  const int m1 = log.action_set.count;
  out << "round,batch,action,reward";
  for (std::size_t j = 0; j < k; ++j) out << ",x_" << j;
  if (has_real) for (int a = 0; a < m1; ++a) out << ",p_real_" << a;
  if (has_true) for (int a = 0; a < m1; ++a) out << ",p_true_" << a;
  out << '\n';
  for (const auto& r : log.records) {
    out << r.round << ',' << r.context.batch_id << ',' << r.action << ',' << FormatDouble(r.reward);
    for (double x : r.context.features) out << ',' << FormatDouble(x);
    if (has_real) for (double p : *r.realized_propensity) out << ',' << FormatDouble(p);
    if (has_true) for (double p : *r.true_propensity) out << ',' << FormatDouble(p);
    out << '\n';
  }
}

void WriteLogCsvFile(const std::string& path, const BanditLog& log) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  WriteLogCsv(out, log);
  if (!out) throw Error("failed writing log to '" + path + "'");
}

}  // namespace ope
