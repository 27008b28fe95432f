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

#include <set>
#include <string>
#include <vector>

#include "chainrca/call_graph.hpp"
#include "chainrca/detection.hpp"

namespace chainrca {

/// Binds the trained models, the incident context and the business metric of
/// the initial anomalous service into one verdict interface for the
/// traversal.
class Detectors {
 public:
  Detectors(const EdgeSeriesProvider& provider, Minute incident_minute,
            const OneClassSeparator& rt_model, const ForestClassifier& ec_model,
            Series business_series, DetectionConfig config);

  AnomalyVerdict detect(AnomalyType type, const EdgeKey& edge) const;

  const DetectionConfig& config() const { return config_; }
  const Series& business_series() const { return business_; }

 private:
  const EdgeSeriesProvider* provider_;
  Minute incident_minute_;
  const OneClassSeparator* rt_model_;
  const ForestClassifier* ec_model_;
  Series business_;
  DetectionConfig config_;
};

struct ChainMember {
  std::string service;
  EdgeKey via_edge;        // the anomalous edge through which the chain reached it
  std::string parent;      // previous chain member (the initial service for the origin)
};

/// A rooted set of anomalous services grown from one neighbor of the initial
/// anomalous service, for one anomaly type.
struct PropagationChain {
  AnomalyType anomaly_type = AnomalyType::Performance;
  std::string origin;
  EdgeKey entry_edge;
  std::vector<ChainMember> members;  // breadth-first insertion order; front() is the origin

  bool contains(const std::string& service) const;
};

struct CandidateRootCause {
  std::string service;
  AnomalyType anomaly_type = AnomalyType::Performance;
  EdgeKey terminal_edge;
};

// --- analysis trace -------------------------------------------------------

struct SeedEvent {
  AnomalyType anomaly_type;
  std::string origin;
  EdgeKey entry_edge;
};

struct VerdictEvent {
  EdgeKey edge;
  AnomalyType anomaly_type;
  bool anomalous = false;
  bool skipped = false;
  std::string stage;  // "entry" or "extension"
};

struct PruningEvent {
  EdgeKey candidate_edge;
  EdgeKey chain_edge;
  MetricKind metric;
  double correlation = 0.0;
  bool passed = false;
};

/// Machine-readable log of one analysis run: every seed, verdict and pruning
/// decision, plus the examined-edge set backing the efficiency counters.
struct AnalysisTrace {
  std::vector<SeedEvent> seeds;
  std::vector<VerdictEvent> verdicts;
  std::vector<PruningEvent> prunings;

  std::size_t detector_calls() const { return verdicts.size(); }
  std::size_t edges_examined() const;
};

// --- the three analysis steps ---------------------------------------------

/// Step 1: run all three detectors on every edge adjacent to the initial
/// anomalous service; seed one chain per anomalous verdict whose neighbor
/// side matches the anomaly type's propagation direction (traffic chains
/// start upstream, performance/reliability chains start downstream).
std::vector<PropagationChain> entry_node_analysis(const CallGraph& graph,
                                                  const std::string& initial_service,
                                                  const Detectors& detectors,
                                                  AnalysisTrace& trace);

/// Correlation gate between a candidate edge and the adjacent chain edge for
/// the chain's quality metric over the metric window. A threshold <= 0
/// disables pruning entirely (every check passes).
bool pruning_check(const CallGraph& graph, const EdgeKey& candidate_edge,
                   const EdgeKey& chain_edge, MetricKind metric, double threshold,
                   double* correlation_out = nullptr);

/// Step 2: breadth-first extension toward the anomaly source side. A
/// neighbor joins when its connecting edge is anomalous for the chain's
/// type, the pruning check against the traversal edge passes, and it is not
/// already a member. The initial anomalous service never joins a chain.
void extend_chain(const CallGraph& graph, const std::string& initial_service,
                  PropagationChain& chain, const Detectors& detectors, double pruning_threshold,
                  AnalysisTrace& trace);

/// Step 3: endpoints of every chain (members with no accepted extension),
/// deduplicated by (service, anomaly type) and ordered lexicographically.
std::vector<CandidateRootCause> collect_candidates(const std::vector<PropagationChain>& chains);

}  // namespace chainrca
