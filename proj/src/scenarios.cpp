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

#include "chainrca/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "chainrca/stats.hpp"

namespace chainrca {

using nlohmann::json;

namespace {

constexpr Minute kDay = 1440;

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  a ^= b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2);
  return a;
}

json fault_to_json(const FaultSpec& f) {
  return json{{"root_service", f.root_service},
              {"root_edge", {{"caller", f.root_edge.caller}, {"callee", f.root_edge.callee}}},
              {"anomaly_type", to_string(f.anomaly_type)},
              {"onset_minute", f.onset_minute},
              {"duration_minutes", f.duration_minutes},
              {"magnitude", f.magnitude},
              {"attenuation", f.attenuation},
              {"lag_minutes", f.lag_minutes},
              {"max_hops", f.max_hops},
              {"reliability_rt_factor", f.reliability_rt_factor},
              {"business_dip", f.business_dip}};
}

FaultSpec fault_from_json(const json& j) {
  FaultSpec f;
  f.root_service = j.at("root_service").get<std::string>();
  f.root_edge = {j.at("root_edge").at("caller").get<std::string>(),
                 j.at("root_edge").at("callee").get<std::string>()};
  f.anomaly_type = anomaly_type_from_string(j.at("anomaly_type").get<std::string>());
  f.onset_minute = j.at("onset_minute").get<Minute>();
  f.duration_minutes = j.at("duration_minutes").get<int>();
  f.magnitude = j.at("magnitude").get<double>();
  f.attenuation = j.value("attenuation", f.attenuation);
  f.lag_minutes = j.value("lag_minutes", f.lag_minutes);
  f.max_hops = j.value("max_hops", f.max_hops);
  f.reliability_rt_factor = j.value("reliability_rt_factor", f.reliability_rt_factor);
  f.business_dip = j.value("business_dip", f.business_dip);
  return f;
}

json baseline_to_json(const BaselineParams& p) {
  return json{{"days", p.days},
              {"rt_base_ms", p.rt_base_ms},
              {"rt_diurnal_amplitude", p.rt_diurnal_amplitude},
              {"rt_weekly_amplitude", p.rt_weekly_amplitude},
              {"rt_noise", p.rt_noise},
              {"qps_base", p.qps_base},
              {"qps_diurnal_amplitude", p.qps_diurnal_amplitude},
              {"qps_noise", p.qps_noise},
              {"ec_burst_probability", p.ec_burst_probability},
              {"ec_burst_max_rate", p.ec_burst_max_rate},
              {"business_scale", p.business_scale},
              {"business_noise", p.business_noise},
              {"entry_external_factor", p.entry_external_factor}};
}

BaselineParams baseline_from_json(const json& j) {
  BaselineParams p;
  p.days = j.value("days", p.days);
  p.rt_base_ms = j.value("rt_base_ms", p.rt_base_ms);
  p.rt_diurnal_amplitude = j.value("rt_diurnal_amplitude", p.rt_diurnal_amplitude);
  p.rt_weekly_amplitude = j.value("rt_weekly_amplitude", p.rt_weekly_amplitude);
  p.rt_noise = j.value("rt_noise", p.rt_noise);
  p.qps_base = j.value("qps_base", p.qps_base);
  p.qps_diurnal_amplitude = j.value("qps_diurnal_amplitude", p.qps_diurnal_amplitude);
  p.qps_noise = j.value("qps_noise", p.qps_noise);
  p.ec_burst_probability = j.value("ec_burst_probability", p.ec_burst_probability);
  p.ec_burst_max_rate = j.value("ec_burst_max_rate", p.ec_burst_max_rate);
  p.business_scale = j.value("business_scale", p.business_scale);
  p.business_noise = j.value("business_noise", p.business_noise);
  p.entry_external_factor = j.value("entry_external_factor", p.entry_external_factor);
  return p;
}

json decoy_to_json(const DecoySpec& d) {
  return json{{"edge", {{"caller", d.edge.caller}, {"callee", d.edge.callee}}},
              {"anomaly_type", to_string(d.anomaly_type)},
              {"magnitude", d.magnitude},
              {"onset_minute", d.onset_minute},
              {"duration_minutes", d.duration_minutes}};
}

DecoySpec decoy_from_json(const json& j) {
  DecoySpec d;
  d.edge = {j.at("edge").at("caller").get<std::string>(),
            j.at("edge").at("callee").get<std::string>()};
  d.anomaly_type = anomaly_type_from_string(j.at("anomaly_type").get<std::string>());
  d.magnitude = j.at("magnitude").get<double>();
  d.onset_minute = j.at("onset_minute").get<Minute>();
  d.duration_minutes = j.at("duration_minutes").get<int>();
  return d;
}

json override_to_json(const WindowOverride& o) {
  json j{{"target", o.target == WindowOverride::Target::EdgeQps ? "edge_qps" : "business"},
         {"start_minute", o.start_minute},
         {"values", o.values}};
  if (o.target == WindowOverride::Target::EdgeQps) {
    j["edge"] = {{"caller", o.edge.caller}, {"callee", o.edge.callee}};
  } else {
    j["service"] = o.service;
    j["metric"] = o.metric;
  }
  return j;
}

WindowOverride override_from_json(const json& j) {
  WindowOverride o;
  const std::string target = j.at("target").get<std::string>();
  o.target = target == "edge_qps" ? WindowOverride::Target::EdgeQps
                                  : WindowOverride::Target::Business;
  if (o.target == WindowOverride::Target::EdgeQps) {
    o.edge = {j.at("edge").at("caller").get<std::string>(),
              j.at("edge").at("callee").get<std::string>()};
  } else {
    o.service = j.at("service").get<std::string>();
    o.metric = j.value("metric", std::string(kBusinessMetricName));
  }
  o.start_minute = j.at("start_minute").get<Minute>();
  o.values = j.at("values").get<std::vector<double>>();
  return o;
}

}  // namespace

void ScenarioSet::save(const std::string& path) const {
  json issues_json = json::array();
  for (const IssueSpec& issue : issues) {
    json ji;
    ji["incident_minute"] = issue.incident_minute;
    if (issue.initial_service) ji["initial_service"] = *issue.initial_service;
    json faults = json::array();
    for (const FaultSpec& f : issue.faults) faults.push_back(fault_to_json(f));
    ji["faults"] = faults;
    json decoys = json::array();
    for (const DecoySpec& d : issue.decoys) decoys.push_back(decoy_to_json(d));
    ji["decoys"] = decoys;
    json overrides = json::array();
    for (const WindowOverride& o : issue.overrides) overrides.push_back(override_to_json(o));
    ji["overrides"] = overrides;
    issues_json.push_back(ji);
  }
  json topo;
  topo["services"] = topology.services;
  json edge_list = json::array();
  for (const EdgeKey& e : topology.edges) {
    edge_list.push_back({{"caller", e.caller}, {"callee", e.callee}});
  }
  topo["edges"] = edge_list;
  topo["entry_services"] = topology.entry_services;

  json j{{"name", name},
         {"topology", topo},
         {"baseline", baseline_to_json(baseline)},
         {"baseline_minutes", baseline_minutes},
         {"seed", seed},
         {"issues", issues_json}};
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << j.dump(2) << '\n';
}

ScenarioSet ScenarioSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed scenario " + path + ": " + e.what());
  }
  ScenarioSet set;
  set.name = j.value("name", "custom");
  const json& topo = j.at("topology");
  set.topology.services = topo.at("services").get<std::vector<std::string>>();
  for (const json& je : topo.at("edges")) {
    set.topology.edges.push_back(
        {je.at("caller").get<std::string>(), je.at("callee").get<std::string>()});
  }
  set.topology.entry_services = topo.at("entry_services").get<std::vector<std::string>>();
  set.baseline = baseline_from_json(j.at("baseline"));
  set.baseline_minutes = j.value("baseline_minutes", Minute{0});
  set.seed = j.value("seed", std::uint64_t{0});
  for (const json& ji : j.at("issues")) {
    IssueSpec issue;
    issue.incident_minute = ji.at("incident_minute").get<Minute>();
    if (ji.contains("initial_service")) {
      issue.initial_service = ji.at("initial_service").get<std::string>();
    }
    for (const json& jf : ji.at("faults")) issue.faults.push_back(fault_from_json(jf));
    if (ji.contains("decoys")) {
      for (const json& jd : ji.at("decoys")) issue.decoys.push_back(decoy_from_json(jd));
    }
    if (ji.contains("overrides")) {
      for (const json& jo : ji.at("overrides")) issue.overrides.push_back(override_from_json(jo));
    }
    set.issues.push_back(std::move(issue));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Fault placement helpers
// ---------------------------------------------------------------------------

namespace {

/// Random walk from an entry toward the fault side: downstream for
/// performance/reliability roots, upstream for traffic origins. Returns the
/// visited path [entry, x1, ..., root]; length >= 2.
std::vector<std::string> fault_walk(const Topology& topo, const std::string& entry, Direction side,
                                    int hops, std::mt19937_64& rng) {
  std::vector<std::string> path{entry};
  std::string current = entry;
  for (int h = 0; h < hops; ++h) {
    std::vector<EdgeKey> adjacent =
        side == Direction::Downstream ? topo.out_edges(current) : topo.in_edges(current);
    std::vector<std::string> options;
    for (const EdgeKey& e : adjacent) {
      const std::string& next = side == Direction::Downstream ? e.callee : e.caller;
      if (std::find(path.begin(), path.end(), next) == path.end()) {
        options.push_back(next);
      }
    }
    if (options.empty()) break;
    std::sort(options.begin(), options.end());
    current = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    path.push_back(current);
  }
  return path;
}

/// Builds a single-fault spec rooted 1..max_hop_target hops from a cycling
/// entry service. Retries entries until a walk of at least one hop exists.
FaultSpec place_fault(const Topology& topo, AnomalyType type, Minute onset, int hop_target,
                      std::mt19937_64& rng, std::size_t entry_cursor) {
  const Direction side = source_side(type);
  for (std::size_t attempt = 0; attempt < topo.entry_services.size(); ++attempt) {
    const std::string& entry =
        topo.entry_services[(entry_cursor + attempt) % topo.entry_services.size()];
    const std::vector<std::string> path = fault_walk(topo, entry, side, hop_target, rng);
    if (path.size() < 2) continue;
    FaultSpec fault;
    fault.anomaly_type = type;
    fault.onset_minute = onset;
    fault.root_service = path.back();
    const std::string& parent = path[path.size() - 2];
    fault.root_edge = side == Direction::Downstream ? EdgeKey{parent, fault.root_service}
                                                    : EdgeKey{fault.root_service, parent};
    return fault;
  }
  throw std::runtime_error("no entry service supports a " + std::string(to_string(type)) +
                           " fault walk");
}

ScenarioSet base_preset(const std::string& name, std::uint64_t canonical, std::uint64_t seed) {
  ScenarioSet set;
  set.name = name;
  set.seed = seed == 0 ? canonical : seed;
  return set;
}

// Window overrides realizing the pruning counter-example: both edges pass
// the 0.9 business-correlation gate while correlating only ~0.656 with each
// other, which is below the 0.7 pruning threshold.
std::vector<WindowOverride> uncorrelated_traffic_overrides(Minute incident,
                                                           const std::string& entry) {
  constexpr std::size_t n = 60;
  const Minute start = incident - static_cast<Minute>(n);

  // Unit direction of the business drop (last 8 minutes of the window).
  std::vector<double> drop(n, 0.0);
  for (std::size_t i = 52; i < n; ++i) drop[i] = -1.0;
  const double drop_mean = -8.0 / 60.0;
  std::vector<double> b_hat(n);
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    b_hat[i] = drop[i] - drop_mean;
    norm += b_hat[i] * b_hat[i];
  }
  norm = std::sqrt(norm);
  for (double& v : b_hat) v /= norm;

  // Second direction: a later drop, orthogonalized against the first.
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 56; i < n; ++i) w[i] = -1.0;
  const double w_mean = -4.0 / 60.0;
  std::vector<double> u_hat(n);
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    u_hat[i] = w[i] - w_mean;
    dot += u_hat[i] * b_hat[i];
  }
  double u_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    u_hat[i] -= dot * b_hat[i];
    u_norm += u_hat[i] * u_hat[i];
  }
  u_norm = std::sqrt(u_norm);
  for (double& v : u_hat) v /= u_norm;

  const double gate = 0.91;  // just above the 0.9 correlation gate
  const double ortho = std::sqrt(1.0 - gate * gate);

  std::vector<double> business(n), qps_entry_edge(n), qps_upstream_edge(n);
  for (std::size_t i = 0; i < n; ++i) {
    business[i] = 200.0 + 420.0 * b_hat[i];
    qps_entry_edge[i] = 100.0 + 60.0 * (gate * b_hat[i] + ortho * u_hat[i]);
    qps_upstream_edge[i] = 100.0 + 60.0 * (gate * b_hat[i] - ortho * u_hat[i]);
  }

  const double cross = pearson(qps_entry_edge, qps_upstream_edge);
  const double gate_a = pearson(qps_entry_edge, business);
  const double gate_b = pearson(qps_upstream_edge, business);
  if (std::abs(gate_a - gate) > 1e-9 || std::abs(gate_b - gate) > 1e-9 || cross >= 0.7 ||
      cross <= 0.6) {
    throw std::logic_error("uncorrelated-variant construction out of tolerance");
  }

  WindowOverride biz;
  biz.target = WindowOverride::Target::Business;
  biz.service = entry;
  biz.start_minute = start;
  biz.values = business;

  WindowOverride entry_edge;
  entry_edge.target = WindowOverride::Target::EdgeQps;
  entry_edge.edge = {"S4", "S5"};
  entry_edge.start_minute = start;
  entry_edge.values = qps_entry_edge;

  WindowOverride upstream_edge;
  upstream_edge.target = WindowOverride::Target::EdgeQps;
  upstream_edge.edge = {"S1", "S4"};
  upstream_edge.start_minute = start;
  upstream_edge.values = qps_upstream_edge;

  return {biz, entry_edge, upstream_edge};
}

BaselineParams fig2_baseline() {
  BaselineParams p;
  p.days = 9;
  p.rt_diurnal_amplitude = 0.08;
  p.rt_weekly_amplitude = 0.02;
  p.rt_noise = 0.015;
  p.qps_diurnal_amplitude = 0.10;
  p.qps_noise = 0.01;
  p.ec_burst_probability = 0.0;
  p.business_noise = 0.003;
  return p;
}

ScenarioSet fig2_preset(std::uint64_t seed, bool uncorrelated) {
  ScenarioSet set = base_preset(uncorrelated ? "fig2-uncorrelated" : "fig2", 42, seed);
  set.topology = fig2_topology();
  set.baseline = fig2_baseline();

  const Minute incident = 9 * kDay - 20;
  const Minute onset = incident - 8;

  IssueSpec issue;
  issue.incident_minute = incident;
  issue.initial_service = "S5";

  FaultSpec traffic;
  traffic.anomaly_type = AnomalyType::Traffic;
  traffic.onset_minute = onset;
  traffic.duration_minutes = 60;
  traffic.magnitude = 0.2;
  traffic.attenuation = 0.85;
  if (uncorrelated) {
    traffic.root_service = "S4";
    traffic.root_edge = {"S4", "S5"};
  } else {
    traffic.root_service = "S1";
    traffic.root_edge = {"S1", "S4"};
  }

  FaultSpec perf9;
  perf9.anomaly_type = AnomalyType::Performance;
  perf9.onset_minute = onset;
  perf9.duration_minutes = 60;
  perf9.magnitude = 8.0;
  perf9.attenuation = 0.85;
  perf9.root_service = "S9";
  perf9.root_edge = {"S7", "S9"};

  FaultSpec perf10 = perf9;
  perf10.root_service = "S10";
  perf10.root_edge = {"S7", "S10"};

  issue.faults = {traffic, perf9, perf10};
  if (uncorrelated) {
    issue.overrides = uncorrelated_traffic_overrides(incident, "S5");
  }
  set.issues.push_back(std::move(issue));
  return set;
}

ScenarioSet noise_free_preset(std::uint64_t seed) {
  ScenarioSet set = base_preset("noise-free", 1001, seed);
  set.topology = generate_topology({36, 1.8, 0.10, 0.03, 3}, mix_seed(set.seed, 7));
  BaselineParams p;
  p.days = 10;
  p.rt_diurnal_amplitude = 0.0;
  p.rt_weekly_amplitude = 0.0;
  p.rt_noise = 0.0;
  p.qps_diurnal_amplitude = 0.0;
  p.qps_noise = 0.0;
  p.ec_burst_probability = 0.0;
  p.business_noise = 0.0;
  set.baseline = p;

  std::mt19937_64 rng(mix_seed(set.seed, 11));
  for (int i = 0; i < 50; ++i) {
    const AnomalyType type = kAllAnomalyTypes[static_cast<std::size_t>(i) % 3];
    IssueSpec issue;
    issue.incident_minute = 8 * kDay + 20 + i * 25;
    const int hops = 1 + static_cast<int>(rng() % 2);
    FaultSpec fault = place_fault(set.topology, type, issue.incident_minute - 6, hops, rng,
                                  static_cast<std::size_t>(i));
    fault.duration_minutes = 45;
    fault.attenuation = 0.8;
    fault.lag_minutes = 0;
    switch (type) {
      case AnomalyType::Performance: fault.magnitude = 10.0; break;
      case AnomalyType::Reliability:
        fault.magnitude = 0.3;
        fault.reliability_rt_factor = 1.0;
        break;
      case AnomalyType::Traffic: fault.magnitude = 0.2; break;
    }
    issue.faults.push_back(fault);
    set.issues.push_back(std::move(issue));
  }
  return set;
}

ScenarioSet noisy_preset(std::uint64_t seed) {
  ScenarioSet set = base_preset("noisy", 2002, seed);
  set.topology = generate_topology({48, 1.9, 0.10, 0.03, 4}, mix_seed(set.seed, 13));
  set.baseline.days = 10;  // default noise knobs

  std::mt19937_64 rng(mix_seed(set.seed, 17));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 75; ++i) {
    const AnomalyType type = kAllAnomalyTypes[static_cast<std::size_t>(i) % 3];
    IssueSpec issue;
    issue.incident_minute = 8 * kDay + 20 + i * 25;
    int hops = 1 + static_cast<int>(rng() % 2);
    if (type == AnomalyType::Traffic && unit(rng) < 0.7) hops = 1;
    FaultSpec fault = place_fault(set.topology, type, issue.incident_minute - 8, hops, rng,
                                  static_cast<std::size_t>(i));
    fault.duration_minutes = 45;
    fault.attenuation = 0.8;
    fault.business_dip = 0.45;
    switch (type) {
      case AnomalyType::Performance:
        fault.magnitude = 7.0 + 5.0 * unit(rng);
        fault.lag_minutes = static_cast<int>(rng() % 2);
        break;
      case AnomalyType::Reliability:
        fault.magnitude = 0.15 + 0.25 * unit(rng);
        fault.reliability_rt_factor = 1.0;
        fault.lag_minutes = static_cast<int>(rng() % 2);
        break;
      case AnomalyType::Traffic:
        fault.magnitude = unit(rng) < 0.8 ? 0.10 + 0.15 * unit(rng) : 2.5 + 1.5 * unit(rng);
        fault.lag_minutes = 0;
        break;
    }
    issue.faults.push_back(fault);
    set.issues.push_back(std::move(issue));
  }
  return set;
}

/// Decoy overlap classes: active windows sized like the in-window part of
/// the main fault but shifted, so their correlation with the chain edge
/// lands in a known band between two sweep thresholds.
struct DecoyClass {
  Minute onset_offset;  // relative to the incident minute
  double expected_correlation;
};

constexpr std::array<DecoyClass, 4> kDecoyClasses = {{
    {-11, 0.074},  // pruned at threshold 0.3
    {-9, 0.444},   // pruned at 0.5
    {-8, 0.630},   // pruned at 0.7
    {-7, 0.810},   // pruned at 0.9
}};

ScenarioSet sweep_preset(std::uint64_t seed) {
  ScenarioSet set = base_preset("sweep", 3003, seed);
  set.topology = generate_topology({70, 3.2, 0.12, 0.02, 3}, mix_seed(set.seed, 23));
  BaselineParams p;
  p.days = 9;
  p.rt_diurnal_amplitude = 0.05;
  p.rt_weekly_amplitude = 0.01;
  p.rt_noise = 0.01;
  p.qps_noise = 0.01;
  p.ec_burst_probability = 0.0;
  p.business_noise = 0.003;
  set.baseline = p;

  const std::set<std::string> entries(set.topology.entry_services.begin(),
                                      set.topology.entry_services.end());
  std::mt19937_64 rng(mix_seed(set.seed, 29));
  for (int i = 0; i < 12; ++i) {
    IssueSpec issue;
    issue.incident_minute = 8 * kDay + 30 + i * 40;
    // A two-hop fault keeps the chain origin off the entry, so decoys hang
    // off chain members rather than seeding chains of their own.
    FaultSpec fault;
    for (int attempt = 0;; ++attempt) {
      fault = place_fault(set.topology, AnomalyType::Performance, issue.incident_minute - 6, 2,
                          rng, static_cast<std::size_t>(i + attempt));
      if (!entries.count(fault.root_edge.caller)) break;
      if (attempt > 24) {
        throw std::runtime_error("sweep preset: no two-hop performance path found");
      }
    }
    fault.duration_minutes = 45;
    fault.magnitude = 9.0;
    fault.attenuation = 0.85;
    fault.lag_minutes = 0;
    issue.faults.push_back(fault);

    // Attach prunable branches: anomalous edges hanging off the chain whose
    // trends only partially match the propagation profile. Bushier branches
    // first, so pruning saves the most detector work.
    const std::vector<std::string> path_members{fault.root_edge.caller, fault.root_service};
    const std::set<std::string> on_path(path_members.begin(), path_members.end());
    std::vector<std::pair<int, EdgeKey>> decoy_candidates;  // (-out_degree, edge)
    for (const std::string& member : path_members) {
      for (const EdgeKey& e : set.topology.out_edges(member)) {
        if (on_path.count(e.callee) || entries.count(e.callee)) continue;
        decoy_candidates.push_back(
            {-static_cast<int>(set.topology.out_edges(e.callee).size()), e});
      }
    }
    std::sort(decoy_candidates.begin(), decoy_candidates.end());
    for (std::size_t c = 0; c < decoy_candidates.size() && c < kDecoyClasses.size(); ++c) {
      DecoySpec decoy;
      decoy.edge = decoy_candidates[c].second;
      decoy.anomaly_type = AnomalyType::Performance;
      decoy.magnitude = 8.0;
      decoy.onset_minute = issue.incident_minute + kDecoyClasses[c].onset_offset;
      decoy.duration_minutes = 6;
      issue.decoys.push_back(decoy);
    }
    set.issues.push_back(std::move(issue));
  }
  return set;
}

}  // namespace

std::vector<std::string> scenario_preset_names() {
  return {"fig2", "fig2-uncorrelated", "noise-free", "noisy", "sweep"};
}

ScenarioSet make_scenario_set(const std::string& preset, std::uint64_t seed) {
  if (preset == "fig2") return fig2_preset(seed, false);
  if (preset == "fig2-uncorrelated") return fig2_preset(seed, true);
  if (preset == "noise-free") return noise_free_preset(seed);
  if (preset == "noisy") return noisy_preset(seed);
  if (preset == "sweep") return sweep_preset(seed);
  throw std::invalid_argument("unknown scenario preset: " + preset);
}

ScenarioSet scaling_scenario_set(int n_services, int issues, std::uint64_t seed) {
  ScenarioSet set;
  set.name = "scaling-" + std::to_string(n_services);
  set.seed = seed == 0 ? 4004 : seed;
  set.topology =
      generate_topology({n_services, 2.0, 0.10, 0.02, 3}, mix_seed(set.seed, n_services));
  set.baseline.days = 10;
  set.baseline_minutes = 26 * 60;  // short history; far comparison periods degrade

  std::mt19937_64 rng(mix_seed(set.seed, 31));
  for (int i = 0; i < issues; ++i) {
    IssueSpec issue;
    issue.incident_minute = set.baseline_minutes - 60 + i * 10;
    FaultSpec fault =
        place_fault(set.topology, AnomalyType::Performance, issue.incident_minute - 8,
                    1 + static_cast<int>(rng() % 2), rng, static_cast<std::size_t>(i));
    fault.duration_minutes = 45;
    fault.magnitude = 9.0;
    fault.attenuation = 0.8;
    issue.faults.push_back(fault);
    set.issues.push_back(std::move(issue));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Materialization
// ---------------------------------------------------------------------------

ScenarioRunner::ScenarioRunner(ScenarioSet set)
    : set_(std::move(set)),
      model_(set_.topology, set_.baseline, set_.seed),
      base_(generate_baseline_minutes(set_.topology, set_.baseline, set_.stream_minutes(),
                                      set_.seed)) {}

MaterializedIssue ScenarioRunner::materialize(std::size_t index) const {
  if (index >= set_.issues.size()) {
    throw std::invalid_argument("issue index out of range");
  }
  const IssueSpec& spec = set_.issues[index];
  MaterializedIssue out;
  out.store = base_;

  std::vector<PendingDip> dips;
  Minute patch_from = std::numeric_limits<Minute>::max();
  Minute patch_to = std::numeric_limits<Minute>::min();
  for (const FaultSpec& fault : spec.faults) {
    const InjectionEffect effect = inject_fault_metrics(out.store, set_.topology, model_, fault);
    dips.insert(dips.end(), effect.dips.begin(), effect.dips.end());
    out.affected_edges.insert(effect.affected_edges.begin(), effect.affected_edges.end());
    int max_hop = 0;
    for (const auto& [edge, hop] : effect.edge_hops) max_hop = std::max(max_hop, hop);
    patch_from = std::min(patch_from, fault.onset_minute);
    patch_to = std::max(patch_to, fault.onset_minute + fault.duration_minutes +
                                      static_cast<Minute>(max_hop) * fault.lag_minutes);
    GroundTruth truth;
    truth.incident_minute = spec.incident_minute;
    truth.initial_service = effect.nearest_entry;
    truth.root_service = fault.root_service;
    truth.anomaly_type = fault.anomaly_type;
    out.truths.push_back(truth);
  }
  if (!spec.faults.empty()) {
    rebuild_business(out.store, set_.topology, model_, dips, patch_from, patch_to);
  }
  for (const DecoySpec& decoy : spec.decoys) {
    apply_decoy(out.store, model_, decoy);
  }
  for (const WindowOverride& o : spec.overrides) {
    apply_override(out.store, model_, o);
  }
  if (out.truths.empty()) {
    throw std::invalid_argument("issue has no faults");
  }
  out.incident.initial_service = spec.initial_service.value_or(out.truths.front().initial_service);
  out.incident.incident_minute = spec.incident_minute;
  out.incident.business_metric = kBusinessMetricName;
  for (GroundTruth& t : out.truths) t.initial_service = out.incident.initial_service;
  return out;
}

// ---------------------------------------------------------------------------
// Training corpus
// ---------------------------------------------------------------------------

namespace {

struct ScheduledFault {
  FaultSpec spec;
  std::set<EdgeKey> affected;
  std::string entry;
};

FeatureVector extract_rt_or_throw(const EdgeSeriesProvider& provider, const EdgeKey& edge,
                                  Minute minute, const DetectionConfig& config) {
  const auto features = extract_rt_features(provider, edge, minute, config);
  if (!features) {
    throw std::logic_error("corpus window unexpectedly predates history");
  }
  return features->as_vector();
}

FeatureVector extract_ec_or_throw(const EdgeSeriesProvider& provider, const EdgeKey& edge,
                                  Minute minute, const DetectionConfig& config) {
  const auto features = extract_ec_features(provider, edge, minute, config);
  if (!features) {
    throw std::logic_error("corpus window unexpectedly predates history");
  }
  return features->as_vector();
}

}  // namespace

TrainingCorpus generate_training_corpus(const CorpusParams& params, std::uint64_t seed) {
  if (params.baseline.days < 16) {
    throw std::invalid_argument("corpus needs >= 16 days: 8 of warmup plus two sampling spans");
  }
  const Topology topo = generate_topology(params.topology, mix_seed(seed, 101));
  const BaselineModel model(topo, params.baseline, mix_seed(seed, 202));
  MetricStore store =
      generate_baseline_minutes(topo, params.baseline, params.baseline.total_minutes(),
                                mix_seed(seed, 202));

  const Minute train_from = 8 * kDay;
  const Minute train_to = 12 * kDay;
  const Minute holdout_from = 12 * kDay;
  const Minute holdout_to = params.baseline.total_minutes();

  std::mt19937_64 rng(mix_seed(seed, 303));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto schedule = [&](AnomalyType type, int count, Minute span_from, Minute span_to,
                            std::vector<ScheduledFault>& out, Minute spacing) {
    for (int j = 0; j < count; ++j) {
      const Minute onset = span_from + 40 + j * spacing;
      if (onset + 40 >= span_to) {
        throw std::logic_error("corpus fault schedule overflows its span");
      }
      FaultSpec fault =
          place_fault(topo, type, onset, 1 + static_cast<int>(rng() % 2), rng,
                      static_cast<std::size_t>(j));
      fault.duration_minutes = 30;
      fault.max_hops = 2;
      fault.attenuation = 0.8;
      switch (type) {
        case AnomalyType::Performance: fault.magnitude = 5.0 + 7.0 * unit(rng); break;
        case AnomalyType::Reliability:
          fault.magnitude = 0.12 + 0.28 * unit(rng);
          fault.reliability_rt_factor = (j % 2 == 0) ? 3.0 : 1.0;
          break;
        case AnomalyType::Traffic: fault.magnitude = 0.10 + 0.20 * unit(rng); break;
      }
      const InjectionEffect effect = inject_fault_metrics(store, topo, model, fault);
      out.push_back({fault, effect.affected_edges, effect.nearest_entry});
    }
  };

  std::vector<ScheduledFault> rel_train, perf_holdout, rel_holdout, traffic_holdout;
  schedule(AnomalyType::Reliability, std::max(1, params.ec_train_positive / 10), train_from,
           train_to, rel_train, 200);
  schedule(AnomalyType::Performance, std::max(1, params.rt_holdout_positive / 10), holdout_from,
           holdout_to, perf_holdout, 90);
  schedule(AnomalyType::Reliability, std::max(1, params.ec_holdout_positive / 10),
           holdout_from + 2800, holdout_to, rel_holdout, 90);
  schedule(AnomalyType::Traffic, std::max(1, params.traffic_holdout_positive / 10),
           holdout_from + 5400, holdout_to, traffic_holdout, 90);

  // Reliability faults couple into RT, so their edges are excluded from the
  // clean pool as well.
  std::set<EdgeKey> dirty;
  for (const auto* group : {&rel_train, &perf_holdout, &rel_holdout, &traffic_holdout}) {
    for (const ScheduledFault& f : *group) dirty.insert(f.affected.begin(), f.affected.end());
  }
  std::vector<EdgeKey> clean_edges;
  for (const EdgeKey& e : topo.edges) {
    if (!dirty.count(e)) clean_edges.push_back(e);
  }
  if (clean_edges.size() < 10) {
    throw std::logic_error("corpus topology too contaminated; raise the service count");
  }

  {
    // Traffic faults patched QPS, which the business rebuild reads back;
    // perf/rel faults contribute explicit dips at their reached entries.
    std::vector<PendingDip> dips;
    for (const auto* group : {&rel_train, &perf_holdout, &rel_holdout}) {
      for (const ScheduledFault& f : *group) {
        PendingDip dip;
        dip.entry = f.entry;
        dip.onset = f.spec.onset_minute;
        dip.duration = f.spec.duration_minutes;
        dip.fraction = f.spec.business_dip;
        dips.push_back(dip);
      }
    }
    rebuild_business(store, topo, model, dips, train_from, holdout_to);
  }

  const StoreSeriesProvider provider(store);
  const DetectionConfig config;

  TrainingCorpus corpus;

  const auto sample_normal_minute = [&](Minute from, Minute to) {
    return from + static_cast<Minute>(rng() % static_cast<std::uint64_t>(to - from));
  };
  const auto next_clean_edge = [&, cursor = std::size_t{0}]() mutable -> const EdgeKey& {
    const EdgeKey& e = clean_edges[cursor % clean_edges.size()];
    ++cursor;
    return e;
  };

  for (int i = 0; i < params.rt_train_normal; ++i) {
    corpus.rt_train.push_back(extract_rt_or_throw(
        provider, next_clean_edge(), sample_normal_minute(train_from, train_to), config));
  }
  for (int i = 0; i < params.ec_train_negative; ++i) {
    corpus.ec_train_x.push_back(extract_ec_or_throw(
        provider, next_clean_edge(), sample_normal_minute(train_from, train_to), config));
    corpus.ec_train_y.push_back(false);
  }
  for (int i = 0; i < params.rt_holdout_negative; ++i) {
    corpus.rt_holdout_x.push_back(extract_rt_or_throw(
        provider, next_clean_edge(), sample_normal_minute(holdout_from, holdout_to), config));
    corpus.rt_holdout_y.push_back(false);
  }
  for (int i = 0; i < params.ec_holdout_negative; ++i) {
    corpus.ec_holdout_x.push_back(extract_ec_or_throw(
        provider, next_clean_edge(), sample_normal_minute(holdout_from, holdout_to), config));
    corpus.ec_holdout_y.push_back(false);
  }

  // Positive windows walk over each fault's affected edges at staggered
  // offsets into the fault's active period.
  const auto positive_windows = [&](const std::vector<ScheduledFault>& faults, int count,
                                    auto&& emit) {
    int produced = 0;
    int lap = 0;
    while (produced < count) {
      bool progressed = false;
      for (const ScheduledFault& f : faults) {
        if (produced >= count) break;
        const std::vector<EdgeKey> edges(f.affected.begin(), f.affected.end());
        const Minute offset = 6 + 4 * (lap % 7);
        const EdgeKey& edge = edges[static_cast<std::size_t>(lap) % edges.size()];
        emit(f, edge, f.spec.onset_minute + offset);
        ++produced;
        progressed = true;
      }
      ++lap;
      if (!progressed) {
        throw std::logic_error("no faults available for positive sampling");
      }
    }
  };

  positive_windows(perf_holdout, params.rt_holdout_positive,
                   [&](const ScheduledFault&, const EdgeKey& edge, Minute m) {
                     corpus.rt_holdout_x.push_back(extract_rt_or_throw(provider, edge, m, config));
                     corpus.rt_holdout_y.push_back(true);
                   });
  positive_windows(rel_train, params.ec_train_positive,
                   [&](const ScheduledFault&, const EdgeKey& edge, Minute m) {
                     corpus.ec_train_x.push_back(extract_ec_or_throw(provider, edge, m, config));
                     corpus.ec_train_y.push_back(true);
                   });
  positive_windows(rel_holdout, params.ec_holdout_positive,
                   [&](const ScheduledFault&, const EdgeKey& edge, Minute m) {
                     corpus.ec_holdout_x.push_back(extract_ec_or_throw(provider, edge, m, config));
                     corpus.ec_holdout_y.push_back(true);
                   });
  positive_windows(
      traffic_holdout, params.traffic_holdout_positive,
      [&](const ScheduledFault& f, const EdgeKey& edge, Minute m) {
        TrafficCase tc;
        tc.qps = store.query_window(edge, MetricKind::QPS, m, 60).values;
        tc.business = store.query_business_window(f.entry, kBusinessMetricName, m, 60).values;
        tc.label = true;
        corpus.traffic_holdout.push_back(std::move(tc));
      });
  for (int i = 0; i < params.traffic_holdout_negative; ++i) {
    const EdgeKey& edge = next_clean_edge();
    const Minute m = sample_normal_minute(holdout_from, holdout_to);
    TrafficCase tc;
    tc.qps = store.query_window(edge, MetricKind::QPS, m, 60).values;
    const std::string& entry =
        topo.entry_services[static_cast<std::size_t>(i) % topo.entry_services.size()];
    tc.business = store.query_business_window(entry, kBusinessMetricName, m, 60).values;
    tc.label = false;
    corpus.traffic_holdout.push_back(std::move(tc));
  }
  return corpus;
}

ClassificationMetrics evaluate_traffic_cases(const std::vector<TrafficCase>& cases,
                                             const DetectionConfig& config) {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const TrafficCase& tc : cases) {
    if (tc.qps.size() != 60 || tc.business.size() != 60) {
      throw std::invalid_argument("traffic case windows must be 60 minutes");
    }
    // Feed the stored windows through the real detector on a scratch store.
    MetricStore scratch;
    const EdgeKey edge{"case-caller", "case-callee"};
    for (std::size_t i = 0; i < 60; ++i) {
      CallRecord r;
      r.minute = static_cast<Minute>(i) + 60;
      r.caller = edge.caller;
      r.callee = edge.callee;
      r.rt_ms = 1.0;
      r.qps = std::max(0.0, tc.qps[i]);
      r.request_count = r.qps * 60.0;
      scratch.ingest(r);
    }
    const StoreSeriesProvider provider(scratch);
    const Series business{tc.business, 60};
    const AnomalyVerdict verdict = detect_traffic(provider, edge, 120, business, config);
    if (tc.label) {
      verdict.anomalous ? ++tp : ++fn;
    } else {
      verdict.anomalous ? ++fp : ++tn;
    }
  }
  return ClassificationMetrics::from_counts(tp, fp, tn, fn);
}

// ---------------------------------------------------------------------------
// Corpus persistence
// ---------------------------------------------------------------------------

namespace {

void save_feature_file(const std::string& path, const FeatureMatrix& x,
                       const std::vector<bool>* labels) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    json line{{"features", x[i]}};
    if (labels != nullptr) line["label"] = (*labels)[i];
    out << line.dump() << '\n';
  }
}

void load_feature_file(const std::string& path, FeatureMatrix& x, std::vector<bool>* labels) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + path);
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    x.push_back(j.at("features").get<FeatureVector>());
    if (labels != nullptr) labels->push_back(j.at("label").get<bool>());
  }
}

}  // namespace

void TrainingCorpus::save(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  save_feature_file(dir + "/rt_train.jsonl", rt_train, nullptr);
  save_feature_file(dir + "/rt_holdout.jsonl", rt_holdout_x, &rt_holdout_y);
  save_feature_file(dir + "/ec_train.jsonl", ec_train_x, &ec_train_y);
  save_feature_file(dir + "/ec_holdout.jsonl", ec_holdout_x, &ec_holdout_y);
  std::ofstream out(dir + "/traffic_holdout.jsonl");
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + dir + "/traffic_holdout.jsonl");
  }
  for (const TrafficCase& tc : traffic_holdout) {
    out << json{{"qps", tc.qps}, {"business", tc.business}, {"label", tc.label}}.dump() << '\n';
  }
}

TrainingCorpus TrainingCorpus::load(const std::string& dir) {
  TrainingCorpus corpus;
  load_feature_file(dir + "/rt_train.jsonl", corpus.rt_train, nullptr);
  load_feature_file(dir + "/rt_holdout.jsonl", corpus.rt_holdout_x, &corpus.rt_holdout_y);
  load_feature_file(dir + "/ec_train.jsonl", corpus.ec_train_x, &corpus.ec_train_y);
  load_feature_file(dir + "/ec_holdout.jsonl", corpus.ec_holdout_x, &corpus.ec_holdout_y);
  std::ifstream in(dir + "/traffic_holdout.jsonl");
  if (!in) {
    throw std::runtime_error("cannot open corpus file: " + dir + "/traffic_holdout.jsonl");
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    TrafficCase tc;
    tc.qps = j.at("qps").get<std::vector<double>>();
    tc.business = j.at("business").get<std::vector<double>>();
    tc.label = j.at("label").get<bool>();
    corpus.traffic_holdout.push_back(std::move(tc));
  }
  return corpus;
}

}  // namespace chainrca
