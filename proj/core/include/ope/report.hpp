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

#ifndef OPE_REPORT_HPP_
#define OPE_REPORT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "ope/monte_carlo.hpp"

namespace ope {

enum class ReportFormat { kJson, kCsv, kMarkdown };
ReportFormat ParseReportFormat(const std::string& text);  // json | csv | md | markdown

struct ReportRow {
  std::string estimator;
  double value = 0.0;
  std::optional<double> bias;
  std::optional<double> empirical_variance;
  std::optional<double> mean_avar;
  std::optional<double> coverage;
  std::optional<double> half_width;
  bool reference = false;  // Shrinkage is measured against this row.
};

// 100 * (half_width / reference - 1).
double ShrinkagePercent(double half_width, double reference_half_width);
// One decimal and a percent sign, e.g. "-23.4%"; never "-0.0%".
std::string FormatPercent(double percent);

std::vector<ReportRow> ReportRows(const ReplicationSummary& summary);

// Shrinkage column present only with more than one row and a reference row
// that has a half-width.
std::string RenderReport(const std::vector<ReportRow>& rows, ReportFormat format);
std::string RenderReport(const ReplicationSummary& summary, ReportFormat format);

}  // namespace ope

#endif  // OPE_REPORT_HPP_
