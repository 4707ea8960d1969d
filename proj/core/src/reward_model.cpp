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

#include "ope/reward_model.hpp"

#include <cmath>

#include "logit_solver.hpp"
#include "ope/error.hpp"

namespace ope {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string ToString(RewardLink link) {
  return link == RewardLink::kLogistic ? "logistic" : "identity";
}

RewardLink ParseRewardLink(const std::string& text) {
  if (text == "logistic") return RewardLink::kLogistic;
  if (text == "identity") return RewardLink::kIdentity;
  throw ValidationError("unknown reward link '" + text + "'");
}

RewardModel RewardModel::Table(int action, std::map<FeatureVector, double> means) {
  if (means.empty()) throw ValidationError("empty reward table");
  RewardModel m;
  m.action_ = action;
  m.table_ = std::move(means);
  return m;
}

RewardModel RewardModel::Constant(int action, double mean) {
  RewardModel m;
  m.action_ = action;
  m.constant_ = mean;
  return m;
}

double RewardModel::Predict(const Context& context) const {
  if (constant_) return *constant_;
  if (!table_.empty()) {
    auto it = table_.find(context.features);
    if (it == table_.end()) throw ValidationError("context not covered by reward table");
    return it->second;
  }
  const double eta = coefficients_.dot(basis_->Evaluate(context));
  if (link_ == RewardLink::kIdentity) return eta;
  return 1.0 / (1.0 + std::exp(-eta));
}

RewardModel FitRewardModelOnBasis(const BanditLog& log, int action, const Basis& basis,
                                  double lambda, RewardLink link) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ValidationError("ridge penalty must be finite and >= 0");
  }
  std::vector<std::size_t> rows;
  for (std::size_t t = 0; t < log.size(); ++t) {
    if (log.records[t].action == action) rows.push_back(t);
  }
  if (rows.empty()) {
    throw ValidationError("no observations for action " + std::to_string(action));
  }
  const auto n = static_cast<Index>(rows.size());
  const auto k = static_cast<Index>(basis.dimension());
  MatrixXd x(n, k);
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    const auto& r = log.records[rows[static_cast<std::size_t>(i)]];
    x.row(i) = basis.Evaluate(r.context).transpose();
    y[i] = r.reward;
  }
  VectorXd penalty = VectorXd::Ones(k);
  if (auto ic = basis.intercept_column()) penalty[static_cast<Index>(*ic)] = 0.0;

  RewardModel m;
  m.action_ = action;
  m.link_ = link;
  m.lambda_ = lambda;
  m.basis_ = basis;

  if (link == RewardLink::kIdentity) {
    MatrixXd gram = x.transpose() * x;
    gram.diagonal() += lambda * penalty;
    Eigen::ColPivHouseholderQR<MatrixXd> qr(gram);
    if (qr.rank() < k) {
      throw NumericalError("singular basis in reward regression for action " +
                           std::to_string(action) + " (rank " + std::to_string(qr.rank()) +
                           " < " + std::to_string(k) + ")");
    }
    m.coefficients_ = qr.solve(x.transpose() * y);
    return m;
  }

  for (Index i = 0; i < n; ++i) {
    if (!(y[i] >= 0.0 && y[i] <= 1.0)) {
      throw ValidationError("logistic reward model needs rewards in [0, 1]");
    }
  }
  MatrixXd targets(n, 2);
  targets.col(0) = VectorXd::Ones(n) - y;
  targets.col(1) = y;
  internal::LogitProblem problem;
  problem.design = &x;
  problem.targets = &targets;
  problem.penalty_weights = penalty;
  problem.lambda = lambda;
  const auto fit = internal::FitMultinomialLogit(problem);
  m.coefficients_ = fit.coefficients.col(1);
  return m;
}

RewardModel FitRewardModel(const BanditLog& log, int action, const BasisSpec& spec,
                           double lambda, RewardLink link) {
  BanditLog subsample;
  subsample.action_set = log.action_set;
  subsample.num_batches = log.num_batches;
  for (const auto& r : log.records) {
    if (r.action == action) subsample.records.push_back(r);
  }
  if (subsample.empty()) {
    throw ValidationError("no observations for action " + std::to_string(action));
  }
  return FitRewardModelOnBasis(subsample, action, Basis::Build(spec, subsample), lambda, link);
}

RewardModelSet FitRewardModels(const BanditLog& log, const BasisSpec& spec, double lambda,
                               RewardLink link) {
  const Basis basis = Basis::Build(spec, log);
  std::vector<RewardModel> models;
  for (int a = 0; a < log.num_actions(); ++a) {
    models.push_back(FitRewardModelOnBasis(log, a, basis, lambda, link));
  }
  return RewardModelSet(std::move(models));
}

RewardModelSet::RewardModelSet(std::vector<RewardModel> models) : models_(std::move(models)) {
  for (std::size_t a = 0; a < models_.size(); ++a) {
    if (models_[a].action() != static_cast<int>(a)) {
      throw ValidationError("reward models must be ordered by action");
    }
  }
}

std::vector<double> RewardModelSet::PredictAll(const Context& context) const {
  std::vector<double> out;
  out.reserve(models_.size());
  for (const auto& m : models_) out.push_back(m.Predict(context));
  return out;
}

bool RewardModelSet::any_fallback() const {
  for (const auto& m : models_) {
    if (m.fallback()) return true;
  }
  return false;
}

nlohmann::json RewardModel::ToJson() const {
  nlohmann::json j = {{"action", action_}};
  if (constant_) {
    j["kind"] = "constant";
    j["mean"] = *constant_;
    return j;
  }
  if (!table_.empty()) {
    j["kind"] = "table";
    auto rows = nlohmann::json::array();
    for (const auto& [f, mu] : table_) rows.push_back({{"features", f}, {"mean", mu}});
    j["table"] = std::move(rows);
    return j;
  }
  j["kind"] = "glm";
  j["link"] = ToString(link_);
  j["lambda"] = lambda_;
  j["basis"] = basis_->ToJson();
  j["coefficients"] = std::vector<double>(coefficients_.data(), coefficients_.data() + coefficients_.size());
  j["fallback"] = fallback_;
  return j;
}

RewardModel RewardModel::FromJson(const nlohmann::json& j) {
  try {
    const int action = j.at("action").get<int>();
    const std::string kind = j.value("kind", std::string("glm"));
    if (kind == "constant") return Constant(action, j.at("mean").get<double>());
    if (kind == "table") {
      std::map<FeatureVector, double> means;
      for (const auto& row : j.at("table")) {
        means[row.at("features").get<FeatureVector>()] = row.at("mean").get<double>();
      }
      return Table(action, std::move(means));
    }
    RewardModel m;
    m.action_ = action;
    m.link_ = ParseRewardLink(j.at("link").get<std::string>());
    m.lambda_ = j.value("lambda", 0.0);
    m.basis_ = Basis::FromJson(j.at("basis"));
    const auto coefs = j.at("coefficients").get<std::vector<double>>();
    if (coefs.size() != m.basis_->dimension()) {
      throw ValidationError("reward coefficients do not match the basis dimension");
    }
    m.coefficients_ = Eigen::Map<const VectorXd>(coefs.data(), static_cast<Index>(coefs.size()));
    m.fallback_ = j.value("fallback", false);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed reward model JSON: ") + e.what());
  }
}

nlohmann::json RewardModelSet::ToJson() const {
  auto models = nlohmann::json::array();
  for (const auto& m : models_) models.push_back(m.ToJson());
  return {{"models", models}};
}

RewardModelSet RewardModelSet::FromJson(const nlohmann::json& j) {
  std::vector<RewardModel> models;
  try {
    for (const auto& m : j.at("models")) models.push_back(RewardModel::FromJson(m));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed reward model set JSON: ") + e.what());
  }
  return RewardModelSet(std::move(models));
}

}  // namespace ope
