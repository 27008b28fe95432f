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
#include <optional>
#include <string>
#include <vector>

#include "chainrca/engine.hpp"
#include "chainrca/simulator.hpp"

namespace chainrca {

/// One availability issue: a primary fault (the ground truth), optional
/// secondary faults active at the same time, decoy anomalies, and window
/// overrides applied last.
struct IssueSpec {
  std::vector<FaultSpec> faults;  // front() is the primary fault
  std::vector<DecoySpec> decoys;
  std::vector<WindowOverride> overrides;
  Minute incident_minute = 0;
  std::optional<std::string> initial_service;  // default: primary fault's nearest entry
};

/// A reproducible batch of issues over one topology and baseline stream.
struct ScenarioSet {
  std::string name;
  Topology topology;
  BaselineParams baseline;
  Minute baseline_minutes = 0;  // 0: baseline.days * 1440
  std::uint64_t seed = 0;
  std::vector<IssueSpec> issues;

  Minute stream_minutes() const {
    return baseline_minutes > 0 ? baseline_minutes : baseline.total_minutes();
  }

  void save(const std::string& path) const;
  static ScenarioSet load(const std::string& path);
};

/// Built-in presets: "fig2", "fig2-uncorrelated", "noise-free", "noisy",
/// "sweep". The seed offsets every stochastic choice; 0 keeps the preset's
/// canonical seed.
ScenarioSet make_scenario_set(const std::string& preset, std::uint64_t seed = 0);

std::vector<std::string> scenario_preset_names();

/// Short-history scaling workload: n services, perf faults, wall-time probe.
ScenarioSet scaling_scenario_set(int n_services, int issues, std::uint64_t seed);

struct MaterializedIssue {
  MetricStore store;
  std::vector<GroundTruth> truths;  // one per fault; front() is the primary
  Incident incident;
  std::set<EdgeKey> affected_edges;
};

/// Generates the shared baseline once; each issue is materialized as a copy
/// of it with that issue's faults, decoys and overrides applied.
class ScenarioRunner {
 public:
  explicit ScenarioRunner(ScenarioSet set);

  const ScenarioSet& set() const { return set_; }
  const MetricStore& base_store() const { return base_; }
  const BaselineModel& model() const { return model_; }
  std::size_t issue_count() const { return set_.issues.size(); }

  MaterializedIssue materialize(std::size_t index) const;

 private:
  ScenarioSet set_;
  BaselineModel model_;
  MetricStore base_;
};

// --- detector training corpus ----------------------------------------------

struct CorpusParams {
  TopologyParams topology{120, 1.8, 0.10, 0.03, 4};
  BaselineParams baseline;
  int rt_train_normal = 1200;
  int rt_holdout_positive = 300;
  int rt_holdout_negative = 300;
  int ec_train_positive = 250;  // paper ratio 1:3 for training
  int ec_train_negative = 750;
  int ec_holdout_positive = 250;  // and 5:3 held out
  int ec_holdout_negative = 150;
  int traffic_holdout_positive = 100;
  int traffic_holdout_negative = 100;

  CorpusParams() { baseline.days = 18; }
};

/// A traffic detector evaluation case: the QPS window of one edge, the
/// business window of the incident's entry service, and the injected label.
struct TrafficCase {
  std::vector<double> qps;
  std::vector<double> business;
  bool label = false;
};

struct TrainingCorpus {
  FeatureMatrix rt_train;  // normal-only
  FeatureMatrix rt_holdout_x;
  std::vector<bool> rt_holdout_y;
  FeatureMatrix ec_train_x;
  std::vector<bool> ec_train_y;
  FeatureMatrix ec_holdout_x;
  std::vector<bool> ec_holdout_y;
  std::vector<TrafficCase> traffic_holdout;

  void save(const std::string& dir) const;
  static TrainingCorpus load(const std::string& dir);
};

/// Cuts labelled detector cases from a baseline stream plus injected faults:
/// positives from fault-affected edges while the fault is active, negatives
/// from untouched edges. Training and held-out windows come from disjoint
/// time spans.
TrainingCorpus generate_training_corpus(const CorpusParams& params, std::uint64_t seed);

/// Evaluates the rule-based traffic detector over stored cases.
ClassificationMetrics evaluate_traffic_cases(const std::vector<TrafficCase>& cases,
                                             const DetectionConfig& config);

}  // namespace chainrca
