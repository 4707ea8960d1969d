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

#ifndef OPE_MONTE_CARLO_HPP_
#define OPE_MONTE_CARLO_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "ope/estimators.hpp"
#include "ope/experiment.hpp"
#include "ope/oracle.hpp"

namespace ope {

// One estimator in one replication. avar/half_width are NaN when no
// variance estimator exists for the kind (ddot).
struct EstimatorDraw {
  double value = 0.0;
  double avar = 0.0;
  double half_width = 0.0;
  bool covered = false;
};

struct PipelineDraw {
  bool recovered = false;  // pi* equals the true best-action map.
  EstimatorDraw best;
  EstimatorDraw logging;
  bool dominates = false;  // lower CI bound of pi* > logging point estimate
  bool fallback = false;
};

struct ReplicationResult {
  std::vector<EstimatorDraw> draws;  // Parallel to config.estimators.
  std::optional<PipelineDraw> pipeline;
};

struct EstimatorSummary {
  EstimatorKind kind = EstimatorKind::kHat;
  double mean = 0.0;
  double bias = 0.0;
  // T * sample variance of the estimates, i.e. var of sqrt(T)(est - truth).
  std::optional<double> empirical_variance;
  std::optional<double> empirical_variance_se;  // Monte Carlo standard error.
  std::optional<double> mean_avar;
  std::optional<double> coverage;
  std::optional<double> mean_half_width;
  std::vector<double> values;  // Only when the config keeps values.
};

struct PipelineSummary {
  double recovery_rate = 0.0;
  double dominance_rate = 0.0;
  double fallback_rate = 0.0;
  double best_truth = 0.0;
  double logging_truth = 0.0;
  double best_mean = 0.0;
  double best_coverage = 0.0;
  double best_mean_half_width = 0.0;
  double logging_mean = 0.0;
  double logging_coverage = 0.0;
  double logging_mean_half_width = 0.0;
};

struct ReplicationSummary {
  int replications = 0;
  std::size_t rounds = 0;
  double level = 0.95;
  double true_value = 0.0;
  std::optional<GroundTruth> oracle;  // Absent when logging is data-dependent.
  std::vector<EstimatorSummary> estimators;
  std::optional<PipelineSummary> pipeline;

  const EstimatorSummary& Find(EstimatorKind kind) const;
};

// One replication with the given seed.
ReplicationResult RunReplication(const ExperimentConfig& config, std::uint64_t seed);

// Replications with seeds seed + i on `config.workers` threads, reduced in
// replication order. The first failing replication (lowest index) aborts the
// run with its index in the message.
std::vector<ReplicationResult> RunReplications(const ExperimentConfig& config);

ReplicationSummary Summarize(const ExperimentConfig& config,
                             const std::vector<ReplicationResult>& results);

ReplicationSummary MonteCarlo(const ExperimentConfig& config);

// Table policy choosing the truly best action per context.
PolicySpec TrueBestActionPolicy(const SyntheticEnv& env);

nlohmann::json ToJson(const ReplicationSummary& summary);
ReplicationSummary ReplicationSummaryFromJson(const nlohmann::json& j);

}  // namespace ope

#endif  // OPE_MONTE_CARLO_HPP_
