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

#include "ope/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ope/error.hpp"

namespace ope {
namespace {

std::string Num(const std::optional<double>& v, int digits = 6) {
  if (!v || std::isnan(*v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, *v);
  return buf;
}

const ReportRow* Reference(const std::vector<ReportRow>& rows) {
  if (rows.size() < 2) return nullptr;
  for (const auto& r : rows) {
    if (r.reference && r.half_width && !std::isnan(*r.half_width) && *r.half_width > 0.0) return &r;
  }
  return nullptr;
}

std::optional<double> RowShrinkage(const ReportRow& r, const ReportRow* ref) {
  if (!ref || !r.half_width || std::isnan(*r.half_width)) return std::nullopt;
  return ShrinkagePercent(*r.half_width, *ref->half_width);
}

}  // namespace

ReportFormat ParseReportFormat(const std::string& text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "md" || text == "markdown") return ReportFormat::kMarkdown;
  throw ValidationError("unknown report format '" + text + "' (json, csv, md)");
}

double ShrinkagePercent(double half_width, double reference_half_width) {
  return 100.0 * (half_width / reference_half_width - 1.0);
}

std::string FormatPercent(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", percent);
  std::string s = buf;
  if (s == "-0.0%") s = "0.0%";
  return s;
}

std::vector<ReportRow> ReportRows(const ReplicationSummary& s) {
  std::vector<ReportRow> rows;
  if (s.pipeline) {
    const auto& p = *s.pipeline;
    rows.push_back({"best_action", p.best_mean, p.best_mean - p.best_truth, std::nullopt, std::nullopt,
                    p.best_coverage, p.best_mean_half_width, false});
    rows.push_back({"logging", p.logging_mean,
                    std::isnan(p.logging_truth) ? std::nullopt : std::optional(p.logging_mean - p.logging_truth),
                    std::nullopt, std::nullopt, p.logging_coverage, p.logging_mean_half_width, false});
    return rows;
  }
  bool have_reference = false;
  for (auto kind : {EstimatorKind::kTilde, EstimatorKind::kTildeSn}) {
    for (const auto& e : s.estimators) {
      if (!have_reference && e.kind == kind && e.mean_half_width) have_reference = true;
    }
  }
  for (const auto& e : s.estimators) {
    ReportRow r{ToString(e.kind), e.mean, e.bias, e.empirical_variance, e.mean_avar, e.coverage,
                e.mean_half_width, false};
    rows.push_back(r);
  }
  // Prefer tilde, then tilde_sn, as the reference.
  for (auto kind : {"tilde", "tilde_sn"}) {
    for (auto& r : rows) {
      if (have_reference && r.estimator == kind && r.half_width) {
        r.reference = true;
        return rows;
      }
    }
  }
  return rows;
}

std::string RenderReport(const std::vector<ReportRow>& rows, ReportFormat format) {
  const ReportRow* ref = Reference(rows);
  if (format == ReportFormat::kJson) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json x = {{"estimator", r.estimator}, {"value", r.value}};
      auto put = [&](const char* k, const std::optional<double>& v) {
        x[k] = v && !std::isnan(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
      };
      put("bias", r.bias);
      put("empirical_variance", r.empirical_variance);
      put("mean_avar", r.mean_avar);
      put("coverage", r.coverage);
      put("ci_half_width", r.half_width);
      if (ref) put("shrinkage_percent", RowShrinkage(r, ref));
      j.push_back(std::move(x));
    }
    return j.dump(2) + "\n";
  }

  std::vector<std::string> header{"estimator", "value", "bias", "empirical_variance",
                                  "mean_avar", "coverage", "ci_half_width"};
  if (ref) header.push_back("shrinkage_in_ci");
  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows) {
    std::vector<std::string> cells{r.estimator,         Num(r.value),     Num(r.bias),
                                   Num(r.empirical_variance), Num(r.mean_avar), Num(r.coverage),
                                   Num(r.half_width)};
    if (ref) {
      const auto s = RowShrinkage(r, ref);
      cells.push_back(s ? FormatPercent(*s) : "");
    }
    body.push_back(std::move(cells));
  }

  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << "\n";
    };
    line(header);
    for (const auto& b : body) line(b);
    return out.str();
  }
  auto line = [&](const std::vector<std::string>& cells) {
    out << "|";
    for (const auto& c : cells) out << " " << c << " |";
    out << "\n";
  };
  line(header);
  out << "|";
  for (std::size_t i = 0; i < header.size(); ++i) out << (i == 0 ? " --- |" : " ---: |");
  out << "\n";
  for (const auto& b : body) line(b);
  return out.str();
}

std::string RenderReport(const ReplicationSummary& summary, ReportFormat format) {
  return RenderReport(ReportRows(summary), format);
}

}  // namespace ope
