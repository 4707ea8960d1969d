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

#include "ope/propensity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "logit_solver.hpp"
#include "ope/error.hpp"
#include "ope/log.hpp"

namespace ope {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void CheckClipFloor(double floor, int num_actions) {
  if (!(floor >= 0.0 && floor < 1.0 / num_actions)) {
    throw ValidationError("clip floor must lie in [0, 1/(m+1))");
  }
}

void CheckFittable(const BanditLog& log, const Basis& basis) {
  if (log.empty()) throw ValidationError("cannot fit a propensity model on an empty log");
  if (basis.dimension() > log.size()) {
    throw ValidationError("basis dimension " + std::to_string(basis.dimension()) +
                          " exceeds the number of records " + std::to_string(log.size()));
  }
}

MatrixXd ActionIndicators(const BanditLog& log) {
  MatrixXd d = MatrixXd::Zero(static_cast<Index>(log.size()), log.num_actions());
  for (std::size_t t = 0; t < log.size(); ++t) {
    const int a = log.records[t].action;
    if (a < 0 || a >= log.num_actions()) {
      throw ValidationError("action out of range at record " + std::to_string(t));
    }
    d(static_cast<Index>(t), a) = 1.0;
  }
  return d;
}

std::size_t CountClamped(const PropensityModel& model, const BanditLog& log) {
  std::size_t n = 0;
  for (const auto& r : log.records) {
    const auto raw = model.PredictRaw(r);
    if (std::any_of(raw.begin(), raw.end(),
                    [&](double p) { return p < model.clip_floor() || p > 1.0; })) {
      ++n;
    }
  }
  return n;
}

}  // namespace

std::string ToString(PropensityFamily family) {
  switch (family) {
    case PropensityFamily::kSieveLs: return "sieve-ls";
    case PropensityFamily::kSieveLogit: return "sieve-logit";
    case PropensityFamily::kRidgeLogistic: return "ridge-logistic";
    case PropensityFamily::kExternalImport: return "external-import";
    case PropensityFamily::kExactTrue: return "exact-true";
  }
  return "unknown";
}

PropensityFamily ParsePropensityFamily(const std::string& text) {
  if (text == "sieve-ls") return PropensityFamily::kSieveLs;
  if (text == "sieve-logit") return PropensityFamily::kSieveLogit;
  if (text == "ridge-logistic" || text == "ridge") return PropensityFamily::kRidgeLogistic;
  if (text == "external-import" || text == "import") return PropensityFamily::kExternalImport;
  if (text == "exact-true" || text == "true") return PropensityFamily::kExactTrue;
  throw ValidationError("unknown propensity family '" + text + "'");
}

ProbabilityVector ClipPropensity(const ProbabilityVector& p, double floor) {
  CheckClipFloor(floor, static_cast<int>(p.size()));
  ProbabilityVector out = p;
  for (double& v : out) v = std::max(v, floor);
  return out;
}

ProbabilityVector PropensityModel::Clip(ProbabilityVector raw) const {
  for (double& v : raw) {
    v = std::max(v, clip_floor_);
    if (family_ == PropensityFamily::kSieveLs) v = std::min(v, 1.0);
  }
  return raw;
}

ProbabilityVector PropensityModel::PredictRaw(const Context& context) const {
  switch (family_) {
    case PropensityFamily::kSieveLs:
    case PropensityFamily::kSieveLogit:
    case PropensityFamily::kRidgeLogistic: {
      const VectorXd q = basis_->Evaluate(context);
      const VectorXd eta = coefficients_ * q;
      ProbabilityVector out(static_cast<std::size_t>(num_actions_));
      if (family_ == PropensityFamily::kSieveLs) {
        for (int a = 0; a < num_actions_; ++a) out[a] = eta[a];
        return out;
      }
      const double mx = eta.maxCoeff();
      double total = 0.0;
      for (int a = 0; a < num_actions_; ++a) total += out[a] = std::exp(eta[a] - mx);
      for (double& v : out) v /= total;
      return out;
    }
    case PropensityFamily::kExactTrue: {
      auto it = table_.find({context.features, context.batch_id});
      if (it == table_.end()) it = table_.find({context.features, 0});
      if (it == table_.end()) throw ValidationError("context not covered by exact propensity table");
      return it->second;
    }
    case PropensityFamily::kExternalImport:
      throw ValidationError("imported propensities are keyed by round; predict from a record");
  }
  throw ValidationError("unknown propensity family");
}

ProbabilityVector PropensityModel::PredictRaw(const LogRecord& record) const {
  if (family_ == PropensityFamily::kExternalImport) {
    auto it = imported_.find(record.round);
    if (it == imported_.end()) {
      throw ValidationError("no imported propensity for round " + std::to_string(record.round));
    }
    return it->second;
  }
  return PredictRaw(record.context);
}

ProbabilityVector PropensityModel::Predict(const LogRecord& record) const {
  return Clip(PredictRaw(record));
}

ProbabilityVector PropensityModel::Predict(const Context& context) const {
  return Clip(PredictRaw(context));
}

PropensityModel PropensityModel::ExactTable(
    int num_actions, std::map<std::pair<FeatureVector, int>, ProbabilityVector> table,
    double clip_floor) {
  CheckClipFloor(clip_floor, num_actions);
  for (const auto& [key, p] : table) {
    if (static_cast<int>(p.size()) != num_actions || !IsProbabilityVector(p)) {
      throw ValidationError("exact propensity table holds an invalid probability vector");
    }
  }
  PropensityModel m;
  m.family_ = PropensityFamily::kExactTrue;
  m.num_actions_ = num_actions;
  m.clip_floor_ = clip_floor;
  m.table_ = std::move(table);
  return m;
}

PropensityModel PropensityModel::Imported(int num_actions,
                                          std::map<std::int64_t, ProbabilityVector> scores,
                                          double clip_floor) {
  CheckClipFloor(clip_floor, num_actions);
  for (const auto& [round, p] : scores) {
    if (static_cast<int>(p.size()) != num_actions) {
      throw ValidationError("imported propensity for round " + std::to_string(round) +
                            " has the wrong length");
    }
    for (double v : p) {
      if (!std::isfinite(v)) throw ValidationError("non-finite imported propensity");
    }
  }
  PropensityModel m;
  m.family_ = PropensityFamily::kExternalImport;
  m.num_actions_ = num_actions;
  m.clip_floor_ = clip_floor;
  m.imported_ = std::move(scores);
  return m;
}

PropensityModel FitSieveLs(const BanditLog& log, const BasisSpec& spec,
                           const PropensityFitOptions& options) {
  CheckClipFloor(options.clip_floor, log.num_actions());
  Basis basis = Basis::Build(spec, log);
  CheckFittable(log, basis);
  const MatrixXd x = basis.Design(log);
  const MatrixXd d = ActionIndicators(log);

  Eigen::ColPivHouseholderQR<MatrixXd> qr(x);
  if (qr.rank() < x.cols()) {
    // The first pivot beyond the numerical rank names a dependent column.
    const auto dependent = qr.colsPermutation().indices()[qr.rank()];
    throw NumericalError("singular basis: design matrix has rank " + std::to_string(qr.rank()) +
                         " < " + std::to_string(x.cols()) + " (dimension " +
                         std::to_string(dependent) + " is linearly dependent)");
  }
  PropensityModel m;
  m.family_ = PropensityFamily::kSieveLs;
  m.num_actions_ = log.num_actions();
  m.clip_floor_ = options.clip_floor;
  m.coefficients_ = qr.solve(d).transpose();
  m.basis_ = std::move(basis);
  m.diagnostics_.clamped_rounds = CountClamped(m, log);
  return m;
}

PropensityModel FitLogitFamily(const BanditLog& log, const BasisSpec& spec, double lambda,
                               PropensityFamily family, const PropensityFitOptions& options) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("ridge penalty must be finite and >= 0");
  }
  CheckClipFloor(options.clip_floor, log.num_actions());
  Basis basis = Basis::Build(spec, log);
  CheckFittable(log, basis);
  const MatrixXd x = basis.Design(log);
  const MatrixXd d = ActionIndicators(log);

  internal::LogitProblem problem;
  problem.design = &x;
  problem.targets = &d;
  problem.penalty_weights = VectorXd::Ones(x.cols());
  if (auto ic = basis.intercept_column()) problem.penalty_weights[static_cast<Index>(*ic)] = 0.0;
  problem.lambda = lambda;
  problem.max_iter = options.max_iter;
  problem.tol = options.tol;
  const auto fit = internal::FitMultinomialLogit(problem);

  PropensityModel m;
  m.family_ = family;
  m.num_actions_ = log.num_actions();
  m.clip_floor_ = options.clip_floor;
  m.coefficients_ = fit.coefficients.transpose();
  m.basis_ = std::move(basis);
  m.diagnostics_.iterations = fit.iterations;
  m.diagnostics_.gradient_norm = fit.gradient_norm;
  m.diagnostics_.clamped_rounds = CountClamped(m, log);
  return m;
}

PropensityModel FitSieveLogit(const BanditLog& log, const BasisSpec& basis,
                              const PropensityFitOptions& options) {
  return FitLogitFamily(log, basis, 0.0, PropensityFamily::kSieveLogit, options);
}

PropensityModel FitRidgeLogisticPropensity(const BanditLog& log, const BasisSpec& basis,
                                           double lambda, const PropensityFitOptions& options) {
  return FitLogitFamily(log, basis, lambda, PropensityFamily::kRidgeLogistic, options);
}

PropensityModel ExactTruePropensity(const BanditLog& log, double clip_floor) {
  std::map<std::pair<FeatureVector, int>, ProbabilityVector> table;
  for (std::size_t t = 0; t < log.size(); ++t) {
    const auto& r = log.records[t];
    if (!r.true_propensity) {
      throw ValidationError("record " + std::to_string(t) + " has no true propensity");
    }
    auto [it, inserted] = table.emplace(std::make_pair(r.context.features, r.context.batch_id),
                                        *r.true_propensity);
    if (!inserted && it->second != *r.true_propensity) {
      throw ValidationError("true propensity varies within a context at record " +
                            std::to_string(t));
    }
  }
  return PropensityModel::ExactTable(log.num_actions(), std::move(table), clip_floor);
}

PropensityModel ReadImportedPropensity(std::istream& in, double clip_floor) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("imported propensity CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      header.push_back(cell);
    }
  }
  if (header.size() < 3 || header[0] != "round") {
    throw ValidationError("imported propensity header must be round,p_0..p_m");
  }
  for (std::size_t a = 1; a < header.size(); ++a) {
    if (header[a] != "p_" + std::to_string(a - 1)) {
      throw ValidationError("imported propensity header must be round,p_0..p_m");
    }
  }
  const int m1 = static_cast<int>(header.size()) - 1;
  std::map<std::int64_t, ProbabilityVector> scores;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != m1 + 1) {
      throw ValidationError("imported propensity line " + std::to_string(line_no) +
                            " has the wrong number of cells");
    }
    try {
      std::size_t pos = 0;
      const std::int64_t round = std::stoll(cells[0], &pos);
      ProbabilityVector p;
      for (int a = 0; a < m1; ++a) p.push_back(std::stod(cells[a + 1]));
      if (!scores.emplace(round, std::move(p)).second) {
        throw ValidationError("duplicate round " + std::to_string(round) + " in imported propensities");
      }
    } catch (const std::logic_error&) {
      throw ValidationError("cannot parse imported propensity line " + std::to_string(line_no));
    }
  }
  return PropensityModel::Imported(m1, std::move(scores), clip_floor);
}

PropensityModel ReadImportedPropensityFile(const std::string& path, double clip_floor) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open imported propensity file '" + path + "'");
  return ReadImportedPropensity(in, clip_floor);
}

nlohmann::json PropensityModel::ToJson() const {
  nlohmann::json j = {{"family", ToString(family_)},
                      {"num_actions", num_actions_},
                      {"clip_floor", clip_floor_}};
  if (basis_) {
    j["basis"] = basis_->ToJson();
    auto coefs = nlohmann::json::array();
    for (Index a = 0; a < coefficients_.rows(); ++a) {
      std::vector<double> row(coefficients_.cols());
      for (Index c = 0; c < coefficients_.cols(); ++c) row[c] = coefficients_(a, c);
      coefs.push_back(row);
    }
    j["coefficients"] = std::move(coefs);
    j["diagnostics"] = {{"iterations", diagnostics_.iterations},
                        {"gradient_norm", diagnostics_.gradient_norm},
                        {"clamped_rounds", diagnostics_.clamped_rounds}};
  } else {
    j["basis"] = nullptr;
    j["coefficients"] = nlohmann::json::array();
  }
  if (family_ == PropensityFamily::kExactTrue) {
    auto table = nlohmann::json::array();
    for (const auto& [key, p] : table_) {
      table.push_back({{"features", key.first}, {"batch", key.second}, {"probabilities", p}});
    }
    j["table"] = std::move(table);
  }
  if (family_ == PropensityFamily::kExternalImport) {
    auto rows = nlohmann::json::array();
    for (const auto& [round, p] : imported_) rows.push_back({{"round", round}, {"probabilities", p}});
    j["scores"] = std::move(rows);
  }
  return j;
}

PropensityModel PropensityModel::FromJson(const nlohmann::json& j) {
  try {
    const auto family = ParsePropensityFamily(j.at("family").get<std::string>());
    const int num_actions = j.at("num_actions").get<int>();
    const double clip = j.at("clip_floor").get<double>();
    if (family == PropensityFamily::kExactTrue) {
      std::map<std::pair<FeatureVector, int>, ProbabilityVector> table;
      for (const auto& row : j.at("table")) {
        table[{row.at("features").get<FeatureVector>(), row.at("batch").get<int>()}] =
            row.at("probabilities").get<ProbabilityVector>();
      }
      return ExactTable(num_actions, std::move(table), clip);
    }
    if (family == PropensityFamily::kExternalImport) {
      std::map<std::int64_t, ProbabilityVector> scores;
      for (const auto& row : j.at("scores")) {
        scores[row.at("round").get<std::int64_t>()] = row.at("probabilities").get<ProbabilityVector>();
      }
      return Imported(num_actions, std::move(scores), clip);
    }
    CheckClipFloor(clip, num_actions);
    PropensityModel m;
    m.family_ = family;
    m.num_actions_ = num_actions;
    m.clip_floor_ = clip;
    m.basis_ = Basis::FromJson(j.at("basis"));
    const auto rows = j.at("coefficients").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(rows.size()) != num_actions) {
      throw ValidationError("propensity model needs one coefficient vector per action");
    }
    const auto k = static_cast<Index>(m.basis_->dimension());
    m.coefficients_.resize(num_actions, k);
    for (int a = 0; a < num_actions; ++a) {
      if (static_cast<Index>(rows[a].size()) != k) {
        throw ValidationError("coefficient vector length does not match the basis dimension");
      }
      for (Index c = 0; c < k; ++c) m.coefficients_(a, c) = rows[a][c];
    }
    if (j.contains("diagnostics")) {
      const auto& d = j.at("diagnostics");
      m.diagnostics_.iterations = d.value("iterations", 0);
      m.diagnostics_.gradient_norm = d.value("gradient_norm", 0.0);
      m.diagnostics_.clamped_rounds = d.value("clamped_rounds", std::size_t{0});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed propensity model JSON: ") + e.what());
  }
}

double MeanNegativeLogLikelihood(const PropensityModel& model, const BanditLog& log) {
  if (log.empty()) throw ValidationError("empty log");
  double total = 0.0;
  for (const auto& r : log.records) total -= std::log(model.Predict(r)[r.action]);
  return total / static_cast<double>(log.size());
}

double MeanSquaredError(const PropensityModel& model, const BanditLog& log) {
  if (log.empty()) throw ValidationError("empty log");
  double total = 0.0;
  for (const auto& r : log.records) {
    const auto p = model.PredictRaw(r);
    for (int a = 0; a < model.num_actions(); ++a) {
      const double d = (a == r.action ? 1.0 : 0.0) - p[a];
      total += d * d;
    }
  }
  return total / static_cast<double>(log.size());
}

}  // namespace ope
