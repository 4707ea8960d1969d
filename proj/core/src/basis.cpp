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

#include "ope/basis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "ope/error.hpp"

namespace ope {
namespace {

// All exponent vectors of length `dim` with total degree <= `degree`, in
// graded order starting from the constant monomial.
std::vector<std::vector<int>> Monomials(std::size_t dim, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(dim, 0);
  for (int total = 0; total <= degree; ++total) {
    // Enumerate compositions of `total` into `dim` parts.
    std::vector<std::vector<int>> level;
    auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
      if (pos + 1 == dim || dim == 0) {
        if (dim == 0) {
          if (remaining == 0) level.push_back({});
          return;
        }
        current[pos] = remaining;
        level.push_back(current);
        return;
      }
      for (int e = remaining; e >= 0; --e) {
        current[pos] = e;
        self(self, pos + 1, remaining - e);
      }
    };
    rec(rec, 0, total);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace

BasisSpec BasisSpec::Parse(std::string_view text) {
  BasisSpec spec;
  constexpr std::string_view kBatch = "+batch";
  if (text.size() > kBatch.size() && text.substr(text.size() - kBatch.size()) == kBatch) {
    spec.include_batch = true;
    text.remove_suffix(kBatch.size());
  }
  if (text == "intercept") {
    if (spec.include_batch) throw ValidationError("intercept basis cannot include the batch");
    spec.kind = BasisKind::kIntercept;
    return spec;
  }
  if (text == "onehot") {
    spec.kind = BasisKind::kOneHot;
    return spec;
  }
  if (text.starts_with("poly:")) {
    spec.kind = BasisKind::kPolynomial;
    const auto digits = text.substr(5);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), spec.degree);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || spec.degree < 1) {
      throw ValidationError("bad polynomial degree in basis '" + std::string(text) + "'");
    }
    return spec;
  }
  throw ValidationError("unknown basis '" + std::string(text) +
                        "' (expected intercept, onehot[+batch] or poly:D[+batch])");
}

std::string BasisSpec::ToString() const {
  std::string s;
  switch (kind) {
    case BasisKind::kIntercept: return "intercept";
    case BasisKind::kOneHot: s = "onehot"; break;
    case BasisKind::kPolynomial: s = "poly:" + std::to_string(degree); break;
  }
  if (include_batch) s += "+batch";
  return s;
}

Basis Basis::Build(const BasisSpec& spec, const BanditLog& log) {
  Basis b;
  b.spec_ = spec;
  b.feature_dim_ = log.feature_dim();
  switch (spec.kind) {
    case BasisKind::kIntercept:
      break;
    case BasisKind::kOneHot: {
      std::set<Level> seen;
      for (const auto& r : log.records) seen.insert(b.KeyOf(r.context));
      b.levels_.assign(seen.begin(), seen.end());
      if (b.levels_.empty()) throw ValidationError("one-hot basis built on an empty log");
      break;
    }
    case BasisKind::kPolynomial: {
      b.exponents_ = Monomials(b.feature_dim_, spec.degree);
      if (spec.include_batch) {
        std::set<int> batches;
        for (const auto& r : log.records) batches.insert(r.context.batch_id);
        b.batch_levels_.assign(batches.begin(), batches.end());
      }
      break;
    }
  }
  return b;
}

Basis Basis::OneHotOver(std::vector<FeatureVector> levels) {
  Basis b;
  b.spec_.kind = BasisKind::kOneHot;
  std::set<Level> seen;
  for (auto& f : levels) seen.insert({std::move(f), 0});
  b.levels_.assign(seen.begin(), seen.end());
  if (b.levels_.empty()) throw ValidationError("one-hot basis over no contexts");
  b.feature_dim_ = b.levels_.front().features.size();
  return b;
}

Basis::Level Basis::KeyOf(const Context& context) const {
  return {context.features, spec_.include_batch ? context.batch_id : 0};
}

std::size_t Basis::dimension() const {
  switch (spec_.kind) {
    case BasisKind::kIntercept: return 1;
    case BasisKind::kOneHot: return levels_.size();
    case BasisKind::kPolynomial:
      return exponents_.size() + (batch_levels_.empty() ? 0 : batch_levels_.size() - 1);
  }
  return 0;
}

std::optional<std::size_t> Basis::intercept_column() const {
  if (spec_.kind == BasisKind::kOneHot) return std::nullopt;
  return 0;
}

bool Basis::Covers(const Context& context) const {
  if (spec_.kind == BasisKind::kIntercept) return true;
  if (context.features.size() != feature_dim_) return false;
  if (spec_.kind == BasisKind::kOneHot) {
    return std::binary_search(levels_.begin(), levels_.end(), KeyOf(context));
  }
  if (spec_.include_batch) {
    return std::binary_search(batch_levels_.begin(), batch_levels_.end(), context.batch_id);
  }
  return true;
}

Eigen::VectorXd Basis::Evaluate(const Context& context) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dimension()));
  if (spec_.kind == BasisKind::kIntercept) {
    v[0] = 1.0;
    return v;
  }
  if (context.features.size() != feature_dim_) {
    throw ValidationError("context has " + std::to_string(context.features.size()) +
                          " features, basis expects " + std::to_string(feature_dim_));
  }
  if (spec_.kind == BasisKind::kOneHot) {
    const auto key = KeyOf(context);
    auto it = std::lower_bound(levels_.begin(), levels_.end(), key);
    if (it == levels_.end() || !(*it == key)) {
      throw ValidationError("context not covered by one-hot basis");
    }
    v[it - levels_.begin()] = 1.0;
    return v;
  }
  Eigen::Index col = 0;
  for (const auto& exps : exponents_) {
    double term = 1.0;
    for (std::size_t j = 0; j < exps.size(); ++j) {
      if (exps[j]) term *= std::pow(context.features[j], exps[j]);
    }
    v[col++] = term;
  }
  if (!batch_levels_.empty()) {
    auto it = std::lower_bound(batch_levels_.begin(), batch_levels_.end(), context.batch_id);
    if (it == batch_levels_.end() || *it != context.batch_id) {
      throw ValidationError("batch " + std::to_string(context.batch_id) +
                            " not covered by polynomial basis");
    }
    const auto idx = it - batch_levels_.begin();
    if (idx > 0) v[col + idx - 1] = 1.0;
  }
  return v;
}

Eigen::MatrixXd Basis::Design(const BanditLog& log) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(log.size()), static_cast<Eigen::Index>(dimension()));
  for (std::size_t t = 0; t < log.size(); ++t) {
    x.row(static_cast<Eigen::Index>(t)) = Evaluate(log.records[t].context).transpose();
  }
  return x;
}

nlohmann::json Basis::ToJson() const {
  nlohmann::json j = {{"spec", spec_.ToString()}, {"feature_dim", feature_dim_}};
  if (spec_.kind == BasisKind::kOneHot) {
    auto levels = nlohmann::json::array();
    for (const auto& l : levels_) levels.push_back({{"features", l.features}, {"batch", l.batch}});
    j["levels"] = std::move(levels);
  }
  if (!batch_levels_.empty()) j["batch_levels"] = batch_levels_;
  return j;
}

Basis Basis::FromJson(const nlohmann::json& j) {
  try {
    Basis b;
    b.spec_ = BasisSpec::Parse(j.at("spec").get<std::string>());
    b.feature_dim_ = j.value("feature_dim", std::size_t{0});
    if (b.spec_.kind == BasisKind::kOneHot) {
      for (const auto& l : j.at("levels")) {
        b.levels_.push_back({l.at("features").get<FeatureVector>(), l.value("batch", 0)});
      }
      std::sort(b.levels_.begin(), b.levels_.end());
    }
    if (b.spec_.kind == BasisKind::kPolynomial) {
      b.exponents_ = Monomials(b.feature_dim_, b.spec_.degree);
      if (j.contains("batch_levels")) b.batch_levels_ = j.at("batch_levels").get<std::vector<int>>();
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed basis JSON: ") + e.what());
  }
}

}  // namespace ope
