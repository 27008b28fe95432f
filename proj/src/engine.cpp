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

#include "chainrca/engine.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chainrca {

using nlohmann::json;

void EngineConfig::validate() const {
  detection.validate();
  if (call_window_minutes < 1 || metric_window_minutes < 1) {
    throw std::invalid_argument("window lengths must be positive");
  }
  if (metric_window_minutes < detection.detection_window_minutes) {
    throw std::invalid_argument("metric window must cover the detection window");
  }
  if (threads < 1) {
    throw std::invalid_argument("threads must be >= 1");
  }
}

json EngineConfig::to_json() const {
  return json{{"detection",
               {{"detection_window_minutes", detection.detection_window_minutes},
                {"rt_threshold_ms", detection.rt_threshold_ms},
                {"traffic_correlation_threshold", detection.traffic_correlation_threshold},
                {"moving_average_window", detection.moving_average_window}}},
              {"pruning_threshold", pruning_threshold},
              {"call_window_minutes", call_window_minutes},
              {"metric_window_minutes", metric_window_minutes},
              {"rt_model", rt_model_path},
              {"ec_model", ec_model_path},
              {"seed", seed},
              {"threads", threads}};
}

EngineConfig EngineConfig::from_json(const json& j) {
  EngineConfig config;
  if (j.contains("detection")) {
    const json& d = j.at("detection");
    config.detection.detection_window_minutes =
        d.value("detection_window_minutes", config.detection.detection_window_minutes);
    config.detection.rt_threshold_ms = d.value("rt_threshold_ms", config.detection.rt_threshold_ms);
    config.detection.traffic_correlation_threshold = d.value(
        "traffic_correlation_threshold", config.detection.traffic_correlation_threshold);
    config.detection.moving_average_window =
        d.value("moving_average_window", config.detection.moving_average_window);
  }
  config.pruning_threshold = j.value("pruning_threshold", config.pruning_threshold);
  config.call_window_minutes = j.value("call_window_minutes", config.call_window_minutes);
  config.metric_window_minutes = j.value("metric_window_minutes", config.metric_window_minutes);
  config.rt_model_path = j.value("rt_model", config.rt_model_path);
  config.ec_model_path = j.value("ec_model", config.ec_model_path);
  config.seed = j.value("seed", config.seed);
  config.threads = j.value("threads", config.threads);
  config.validate();
  return config;
}

EngineConfig EngineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed config " + path + ": " + e.what());
  }
  return from_json(j);
}

LocalizationResult localize(const MetricStore& store, const Incident& incident,
                            const OneClassSeparator& rt_model, const ForestClassifier& ec_model,
                            const EngineConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  LocalizationResult result;
  result.incident = incident;

  const CallGraph graph = CallGraph::build(store, incident.incident_minute,
                                           config.call_window_minutes,
                                           config.metric_window_minutes);
  const Series business = store.query_business_window(
      incident.initial_service, incident.business_metric, incident.incident_minute,
      static_cast<std::size_t>(config.metric_window_minutes));

  if (!graph.has_node(incident.initial_service)) {
    result.diagnostic = "initial service has no active calls in the call window";
  } else {
    const Detectors detectors(graph, incident.incident_minute, rt_model, ec_model, business,
                              config.detection);
    std::vector<PropagationChain> chains =
        entry_node_analysis(graph, incident.initial_service, detectors, result.trace);
    for (PropagationChain& chain : chains) {
      extend_chain(graph, incident.initial_service, chain, detectors, config.pruning_threshold,
                   result.trace);
    }
    result.chains = std::move(chains);
    const std::vector<CandidateRootCause> candidates = collect_candidates(result.chains);
    result.ranked = rank_candidates(candidates, graph, business);
    if (result.ranked.empty()) {
      result.diagnostic =
          "no propagation chain could be seeded: no anomalous neighbor is consistent with any "
          "propagation direction";
    }
  }

  result.edges_examined = result.trace.edges_examined();
  result.detector_calls = result.trace.detector_calls();
  result.series_loads = graph.series_loads();
  result.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

json to_json(const EdgeKey& edge) {
  return json{{"caller", edge.caller}, {"callee", edge.callee}};
}

json to_json(const RankedCandidate& candidate) {
  return json{{"rank", candidate.rank},
              {"service", candidate.candidate.service},
              {"anomaly_type", to_string(candidate.candidate.anomaly_type)},
              {"score", candidate.score},
              {"terminal_edge", to_json(candidate.candidate.terminal_edge)}};
}

json to_json(const PropagationChain& chain) {
  json members = json::array();
  for (const ChainMember& m : chain.members) {
    members.push_back(
        {{"service", m.service}, {"via_edge", to_json(m.via_edge)}, {"parent", m.parent}});
  }
  return json{{"anomaly_type", to_string(chain.anomaly_type)},
              {"origin", chain.origin},
              {"entry_edge", to_json(chain.entry_edge)},
              {"members", members}};
}

json to_json(const AnalysisTrace& trace) {
  json seeds = json::array();
  for (const SeedEvent& s : trace.seeds) {
    seeds.push_back({{"anomaly_type", to_string(s.anomaly_type)},
                     {"origin", s.origin},
                     {"entry_edge", to_json(s.entry_edge)}});
  }
  json verdicts = json::array();
  for (const VerdictEvent& v : trace.verdicts) {
    verdicts.push_back({{"edge", to_json(v.edge)},
                        {"anomaly_type", to_string(v.anomaly_type)},
                        {"anomalous", v.anomalous},
                        {"skipped", v.skipped},
                        {"stage", v.stage}});
  }
  json prunings = json::array();
  for (const PruningEvent& p : trace.prunings) {
    prunings.push_back({{"candidate_edge", to_json(p.candidate_edge)},
                        {"chain_edge", to_json(p.chain_edge)},
                        {"metric", to_string(p.metric)},
                        {"correlation", p.correlation},
                        {"passed", p.passed}});
  }
  return json{{"seeds", seeds}, {"verdicts", verdicts}, {"prunings", prunings}};
}

json localization_report(const LocalizationResult& result, const EngineConfig& config) {
  json candidates = json::array();
  for (const RankedCandidate& c : result.ranked) {
    candidates.push_back(to_json(c));
  }
  json chains = json::array();
  for (const PropagationChain& chain : result.chains) {
    chains.push_back(to_json(chain));
  }
  return json{{"schema_version", kReportSchemaVersion},
              {"config", config.to_json()},
              {"incident",
               {{"initial_service", result.incident.initial_service},
                {"incident_minute", result.incident.incident_minute},
                {"business_metric", result.incident.business_metric}}},
              {"candidates", candidates},
              {"chains", chains},
              {"trace", to_json(result.trace)},
              {"counters",
               {{"edges_examined", result.edges_examined},
                {"detector_calls", result.detector_calls},
                {"series_loads", result.series_loads}}},
              {"diagnostic", result.diagnostic},
              {"wall_time_seconds", result.wall_time_seconds}};
}

std::string summarize(const LocalizationResult& result) {
  std::ostringstream out;
  out << "incident: service " << result.incident.initial_service << " at minute "
      << result.incident.incident_minute << "\n";
  if (result.ranked.empty()) {
    out << "no candidate root causes";
    if (!result.diagnostic.empty()) {
      out << " (" << result.diagnostic << ")";
    }
    out << "\n";
  } else {
    out << "candidate root causes:\n";
    for (const RankedCandidate& c : result.ranked) {
      out << "  " << c.rank << ". " << c.candidate.service << " ["
          << to_string(c.candidate.anomaly_type) << "] score " << c.score << " via "
          << c.candidate.terminal_edge.label() << "\n";
    }
  }
  out << "examined " << result.edges_examined << " edges with " << result.detector_calls
      << " detector calls in " << result.wall_time_seconds << "s\n";
  return out.str();
}

}  // namespace chainrca
