/*
 * Copyright 2026 The chainrca Authors.
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

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "chainrca/engine.hpp"
#include "chainrca/scenarios.hpp"

namespace chainrca {

struct IssueResult {
  GroundTruth truth;
  std::vector<RankedCandidate> ranked;
  double wall_time_seconds = 0.0;
  std::size_t edges_examined = 0;
  std::size_t detector_calls = 0;
  bool failed = false;
  std::string error;
};

/// True when a candidate in the top-k matches the ground truth on both the
/// service and the anomaly type.
bool hit_within(const IssueResult& result, int k);

/// Fraction of issues whose top-k list contains the true (service, type)
/// pair. Throws on empty input.
double hr_at_k(const std::vector<IssueResult>& results, int k);

/// Mean reciprocal rank of the first correct candidate; an absent root cause
/// contributes 0 (its rank is taken as infinite).
double mrr(const std::vector<IssueResult>& results);

struct BenchmarkReport {
  std::string scenario_name;
  std::vector<IssueResult> issues;
  double hr1 = 0.0, hr3 = 0.0, hr5 = 0.0, mrr_value = 0.0;
  double mean_wall_time_seconds = 0.0;
  double mean_edges_examined = 0.0;
  double mean_detector_calls = 0.0;

  nlohmann::json to_json() const;
  std::string text_table() const;
};

/// Localizes every issue of the scenario set and aggregates accuracy and
/// efficiency. Issues may run on a small worker pool; per-issue failures are
/// recorded and the batch continues.
BenchmarkReport run_benchmark(const ScenarioRunner& runner, const OneClassSeparator& rt_model,
                              const ForestClassifier& ec_model, const EngineConfig& config,
                              int threads = 1);

struct SweepPoint {
  double threshold = 0.0;
  double hr3 = 0.0;
  double mrr_value = 0.0;
  double mean_wall_time_seconds = 0.0;
  double mean_edges_examined = 0.0;
};

struct SweepReport {
  std::vector<SweepPoint> points;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// One benchmark run per pruning threshold (ascending).
SweepReport sweep_pruning_threshold(const ScenarioRunner& runner,
                                    const OneClassSeparator& rt_model,
                                    const ForestClassifier& ec_model, const EngineConfig& config,
                                    const std::vector<double>& thresholds, int threads = 1);

struct ScalingPoint {
  int n_services = 0;
  std::size_t n_edges = 0;
  double mean_wall_time_seconds = 0.0;
  double hr1 = 0.0;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  double slope_seconds_per_service = 0.0;
  double intercept_seconds = 0.0;
  double r_squared = 0.0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

/// Simulates and localizes at each system size (serially, to keep timings
/// clean) and reports the least-squares linear fit of time against size.
ScalingReport scaling_run(const std::vector<int>& sizes, int faults_per_size, std::uint64_t seed,
                          const OneClassSeparator& rt_model, const ForestClassifier& ec_model,
                          const EngineConfig& config);

/// Least-squares R^2 of y against x.
double linear_fit_r_squared(const std::vector<double>& x, const std::vector<double>& y,
                            double* slope = nullptr, double* intercept = nullptr);

}  // namespace chainrca
