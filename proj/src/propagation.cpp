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

#include "chainrca/propagation.hpp"

#include <algorithm>
#include <stdexcept>

#include "chainrca/stats.hpp"

namespace chainrca {

Detectors::Detectors(const EdgeSeriesProvider& provider, Minute incident_minute,
                     const OneClassSeparator& rt_model, const ForestClassifier& ec_model,
                     Series business_series, DetectionConfig config)
    : provider_(&provider),
      incident_minute_(incident_minute),
      rt_model_(&rt_model),
      ec_model_(&ec_model),
      business_(std::move(business_series)),
      config_(config) {
  config_.validate();
}

AnomalyVerdict Detectors::detect(AnomalyType type, const EdgeKey& edge) const {
  switch (type) {
    case AnomalyType::Performance:
      return detect_performance(*provider_, edge, incident_minute_, *rt_model_, config_);
    case AnomalyType::Reliability:
      return detect_reliability(*provider_, edge, incident_minute_, *ec_model_, config_);
    case AnomalyType::Traffic:
      return detect_traffic(*provider_, edge, incident_minute_, business_, config_);
  }
  throw std::logic_error("unreachable anomaly type");
}

bool PropagationChain::contains(const std::string& service) const {
  return std::any_of(members.begin(), members.end(),
                     [&](const ChainMember& m) { return m.service == service; });
}

std::size_t AnalysisTrace::edges_examined() const {
  std::set<EdgeKey> edges;
  for (const VerdictEvent& v : verdicts) edges.insert(v.edge);
  return edges.size();
}

std::vector<PropagationChain> entry_node_analysis(const CallGraph& graph,
                                                  const std::string& initial_service,
                                                  const Detectors& detectors,
                                                  AnalysisTrace& trace) {
  if (!graph.has_node(initial_service)) {
    throw std::invalid_argument("initial service not in call graph: " + initial_service);
  }
  std::vector<PropagationChain> chains;
  for (Direction side : {Direction::Upstream, Direction::Downstream}) {
    for (const auto& [neighbor, edge] : graph.neighbors(initial_service, side)) {
      for (AnomalyType type : kAllAnomalyTypes) {
        const AnomalyVerdict verdict = detectors.detect(type, edge);
        trace.verdicts.push_back({edge, type, verdict.anomalous, verdict.skipped, "entry"});
        if (!verdict.anomalous) continue;
        // Only a neighbor on the side the anomaly propagates from can have
        // pushed this anomaly into the entry node.
        if (source_side(type) != side) continue;
        PropagationChain chain;
        chain.anomaly_type = type;
        chain.origin = neighbor;
        chain.entry_edge = edge;
        chain.members.push_back({neighbor, edge, initial_service});
        trace.seeds.push_back({type, neighbor, edge});
        chains.push_back(std::move(chain));
      }
    }
  }
  return chains;
}

bool pruning_check(const CallGraph& graph, const EdgeKey& candidate_edge,
                   const EdgeKey& chain_edge, MetricKind metric, double threshold,
                   double* correlation_out) {
  const Series& candidate = graph.edge_series(candidate_edge, metric);
  const Series& adjacent = graph.edge_series(chain_edge, metric);
  const double correlation = pearson(candidate.values, adjacent.values);
  if (correlation_out != nullptr) {
    *correlation_out = correlation;
  }
  return threshold <= 0.0 || correlation >= threshold;
}

void extend_chain(const CallGraph& graph, const std::string& initial_service,
                  PropagationChain& chain, const Detectors& detectors, double pruning_threshold,
                  AnalysisTrace& trace) {
  if (chain.members.empty()) {
    throw std::invalid_argument("extend_chain: chain has no seed member");
  }
  const Direction side = source_side(chain.anomaly_type);
  const MetricKind metric = metric_for(chain.anomaly_type);

  std::vector<ChainMember> frontier{chain.members.front()};
  while (!frontier.empty()) {
    std::vector<ChainMember> next;
    for (const ChainMember& current : frontier) {
      for (const auto& [neighbor, edge] : graph.neighbors(current.service, side)) {
        if (neighbor == initial_service || chain.contains(neighbor)) continue;
        const AnomalyVerdict verdict = detectors.detect(chain.anomaly_type, edge);
        trace.verdicts.push_back(
            {edge, chain.anomaly_type, verdict.anomalous, verdict.skipped, "extension"});
        if (!verdict.anomalous) continue;
        double correlation = 0.0;
        const bool passed = pruning_check(graph, edge, current.via_edge, metric,
                                          pruning_threshold, &correlation);
        trace.prunings.push_back({edge, current.via_edge, metric, correlation, passed});
        if (!passed) continue;
        ChainMember member{neighbor, edge, current.service};
        chain.members.push_back(member);
        next.push_back(std::move(member));
      }
    }
    frontier = std::move(next);
  }
}

std::vector<CandidateRootCause> collect_candidates(const std::vector<PropagationChain>& chains) {
  std::vector<CandidateRootCause> all;
  for (const PropagationChain& chain : chains) {
    std::set<std::string> extended;
    for (const ChainMember& m : chain.members) extended.insert(m.parent);
    for (const ChainMember& m : chain.members) {
      if (extended.count(m.service) == 0) {
        all.push_back({m.service, chain.anomaly_type, m.via_edge});
      }
    }
  }
  std::sort(all.begin(), all.end(), [](const CandidateRootCause& a, const CandidateRootCause& b) {
    return std::tie(a.service, a.anomaly_type, a.terminal_edge) <
           std::tie(b.service, b.anomaly_type, b.terminal_edge);
  });
  all.erase(std::unique(all.begin(), all.end(),
                        [](const CandidateRootCause& a, const CandidateRootCause& b) {
                          return a.service == b.service && a.anomaly_type == b.anomaly_type;
                        }),
            all.end());
  return all;
}

}  // namespace chainrca
