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

#ifndef OPE_BASIS_HPP_
#define OPE_BASIS_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ope/types.hpp"

namespace ope {

enum class BasisKind { kIntercept, kOneHot, kPolynomial };

// Requested basis family. Text forms: "intercept", "onehot",
// "onehot+batch", "poly:D", "poly:D+batch".
struct BasisSpec {
  BasisKind kind = BasisKind::kIntercept;
  int degree = 1;              // kPolynomial only.
  bool include_batch = false;  // Treat the batch id as a categorical coordinate.

  static BasisSpec Parse(std::string_view text);
  std::string ToString() const;

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

// A basis instantiated on a log.
//
//  intercept: the constant function (k = 1).
//  onehot:    one indicator per distinct feature vector (optionally per
//             (features, batch) pair) seen in the log. Saturated on
//             discrete contexts; has no separate constant column.
//  poly:D:    all monomials of total degree <= D in the real features,
//             including the constant; with +batch, indicators for every
//             batch except the first.
class Basis {
 public:
  static Basis Build(const BasisSpec& spec, const BanditLog& log);
  // One-hot basis over an explicit list of feature vectors.
  static Basis OneHotOver(std::vector<FeatureVector> levels);

  const BasisSpec& spec() const { return spec_; }
  std::size_t dimension() const;
  // Column of the constant function, if the basis has one.
  std::optional<std::size_t> intercept_column() const;

  // Throws ValidationError when a one-hot basis has no column for the context.
  Eigen::VectorXd Evaluate(const Context& context) const;
  bool Covers(const Context& context) const;

  // Design matrix with one row per record.
  Eigen::MatrixXd Design(const BanditLog& log) const;

  nlohmann::json ToJson() const;
  static Basis FromJson(const nlohmann::json& j);

 private:
  struct Level {
    FeatureVector features;
    int batch = 0;  // 0 when the batch is not part of the key.
    auto operator<=>(const Level&) const = default;
  };

  Level KeyOf(const Context& context) const;

  BasisSpec spec_;
  std::size_t feature_dim_ = 0;
  std::vector<Level> levels_;                     // kOneHot, sorted.
  std::vector<std::vector<int>> exponents_;       // kPolynomial monomials.
  std::vector<int> batch_levels_;                 // kPolynomial + batch, sorted.
};

}  // namespace ope

#endif  // OPE_BASIS_HPP_
