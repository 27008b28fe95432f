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

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "chainrca/detection.hpp"
#include "chainrca/metric_store.hpp"
#include "chainrca/models.hpp"
#include "chainrca/propagation.hpp"
#include "chainrca/ranking.hpp"

namespace chainrca {

/// Reports carry this so downstream consumers can detect format changes.
constexpr int kReportSchemaVersion = 1;

/// Full engine configuration. The defaults are the production defaults:
/// 50ms RT threshold, 0.9 traffic correlation gate, 0.7 pruning threshold,
/// 30-minute call window, 60-minute metric window.
struct EngineConfig {
  DetectionConfig detection;
  double pruning_threshold = 0.7;
  int call_window_minutes = 30;
  int metric_window_minutes = 60;
  std::string rt_model_path = "rt_model.json";
  std::string ec_model_path = "ec_model.json";
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
  nlohmann::json to_json() const;
  static EngineConfig from_json(const nlohmann::json& j);
  static EngineConfig load(const std::string& path);
};

struct Incident {
  std::string initial_service;
  Minute incident_minute = 0;
  std::string business_metric;
};

struct LocalizationResult {
  Incident incident;
  std::vector<PropagationChain> chains;
  std::vector<RankedCandidate> ranked;
  AnalysisTrace trace;
  std::string diagnostic;  // set when the result is empty
  double wall_time_seconds = 0.0;
  std::size_t edges_examined = 0;
  std::size_t detector_calls = 0;
  std::size_t series_loads = 0;
};

/// Runs the full pipeline for one incident: call graph construction, anomaly
/// propagation chain analysis, candidate root cause ranking. An initial
/// service without active calls in the window yields an empty result with a
/// diagnostic rather than an error.
LocalizationResult localize(const MetricStore& store, const Incident& incident,
                            const OneClassSeparator& rt_model, const ForestClassifier& ec_model,
                            const EngineConfig& config);

// --- report serialization ---------------------------------------------------

nlohmann::json to_json(const EdgeKey& edge);
nlohmann::json to_json(const RankedCandidate& candidate);
nlohmann::json to_json(const PropagationChain& chain);
nlohmann::json to_json(const AnalysisTrace& trace);

/// Localization report: schema version, effective config, ranked candidates,
/// chains and the analysis trace.
nlohmann::json localization_report(const LocalizationResult& result, const EngineConfig& config);

/// Short human-readable summary of a localization run.
std::string summarize(const LocalizationResult& result);

}  // namespace chainrca
