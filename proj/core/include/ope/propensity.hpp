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

#ifndef OPE_PROPENSITY_HPP_
#define OPE_PROPENSITY_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "ope/basis.hpp"
#include "ope/types.hpp"

namespace ope {

enum class PropensityFamily {
  kSieveLs,         // Per-action least squares of D_a on the basis.
  kSieveLogit,      // Multinomial logit MLE, action 0 as base category.
  kRidgeLogistic,   // Multinomial logit with an L2 penalty off the intercept.
  kExternalImport,  // Per-round scores computed elsewhere, keyed by round.
  kExactTrue,       // Known logging propensities keyed by (features, batch).
};

std::string ToString(PropensityFamily family);
PropensityFamily ParsePropensityFamily(const std::string& text);

inline constexpr double kDefaultClipFloor = 0.01;

struct PropensityFitOptions {
  double clip_floor = kDefaultClipFloor;
  int max_iter = 200;
  double tol = 1e-8;
};

struct PropensityDiagnostics {
  int iterations = 0;
  double gradient_norm = 0.0;
  // Training rounds with at least one raw coordinate outside [clip_floor, 1].
  std::size_t clamped_rounds = 0;
};

// A fitted map from a logged round to a probability vector over actions.
class PropensityModel {
 public:
  PropensityFamily family() const { return family_; }
  int num_actions() const { return num_actions_; }
  double clip_floor() const { return clip_floor_; }
  const PropensityDiagnostics& diagnostics() const { return diagnostics_; }
  const std::optional<Basis>& basis() const { return basis_; }
  // (m+1) x k; row a is lambda_a. Empty for table-backed families.
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }

  // Unclipped model output. Logit families sum to one exactly; sieve-LS may
  // leave [0, 1].
  ProbabilityVector PredictRaw(const LogRecord& record) const;
  ProbabilityVector PredictRaw(const Context& context) const;

  // Model output with every coordinate raised to at least clip_floor (and,
  // for sieve-LS, capped at one). Not renormalized.
  ProbabilityVector Predict(const LogRecord& record) const;
  ProbabilityVector Predict(const Context& context) const;

  nlohmann::json ToJson() const;
  static PropensityModel FromJson(const nlohmann::json& j);

  // Known propensities keyed by (features, batch).
  static PropensityModel ExactTable(int num_actions,
                                    std::map<std::pair<FeatureVector, int>, ProbabilityVector> table,
                                    double clip_floor = kDefaultClipFloor);
  // Per-round scores keyed by round id.
  static PropensityModel Imported(int num_actions, std::map<std::int64_t, ProbabilityVector> scores,
                                  double clip_floor = kDefaultClipFloor);

 private:
  friend PropensityModel FitSieveLs(const BanditLog&, const BasisSpec&, const PropensityFitOptions&);
  friend PropensityModel FitLogitFamily(const BanditLog&, const BasisSpec&, double, PropensityFamily,
                                        const PropensityFitOptions&);

  ProbabilityVector Clip(ProbabilityVector raw) const;

  PropensityFamily family_ = PropensityFamily::kSieveLs;
  int num_actions_ = 0;
  double clip_floor_ = kDefaultClipFloor;
  std::optional<Basis> basis_;
  Eigen::MatrixXd coefficients_;
  std::map<std::pair<FeatureVector, int>, ProbabilityVector> table_;
  std::map<std::int64_t, ProbabilityVector> imported_;
  PropensityDiagnostics diagnostics_;
};

// Sieve least squares: regress each action indicator on the basis. Throws
// NumericalError ("singular basis") if the design is rank deficient and
// ValidationError if the basis has more columns than the log has rows.
PropensityModel FitSieveLs(const BanditLog& log, const BasisSpec& basis,
                           const PropensityFitOptions& options = {});

// Sieve multinomial logit MLE via damped Newton. Throws ConvergenceError on
// non-convergence and NumericalError on separation.
PropensityModel FitSieveLogit(const BanditLog& log, const BasisSpec& basis,
                              const PropensityFitOptions& options = {});

// Multinomial logit with penalty lambda * sum_a |lambda_a|^2, the intercept
// column excluded. lambda = 0 is exactly FitSieveLogit.
PropensityModel FitRidgeLogisticPropensity(const BanditLog& log, const BasisSpec& basis,
                                           double lambda,
                                           const PropensityFitOptions& options = {});

// Shared implementation of the two logit families.
PropensityModel FitLogitFamily(const BanditLog& log, const BasisSpec& basis, double lambda,
                               PropensityFamily family, const PropensityFitOptions& options);

// Exact-true model built from the logged true propensities. Throws if any
// record lacks them or two records with the same (features, batch) disagree.
PropensityModel ExactTruePropensity(const BanditLog& log, double clip_floor = 0.0);

// Reads `round,p_0..p_m` rows (header mandatory).
PropensityModel ReadImportedPropensity(std::istream& in, double clip_floor = kDefaultClipFloor);
PropensityModel ReadImportedPropensityFile(const std::string& path,
                                           double clip_floor = kDefaultClipFloor);

// Raises each coordinate to at least `floor`; no renormalization.
ProbabilityVector ClipPropensity(const ProbabilityVector& p, double floor);

// Mean negative log-likelihood of the logged actions under the clipped model.
double MeanNegativeLogLikelihood(const PropensityModel& model, const BanditLog& log);
// Mean over rounds of sum_a (D_a - p_a)^2 under the raw model.
double MeanSquaredError(const PropensityModel& model, const BanditLog& log);

}  // namespace ope

#endif  // OPE_PROPENSITY_HPP_
