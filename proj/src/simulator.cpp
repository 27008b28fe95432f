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

#include "chainrca/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace chainrca {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Keyed noise: every draw is a pure function of (seed, stream tag, entity
// key, minute), so patched ranges can be regenerated bit-identically.
// ---------------------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

double uniform01(std::uint64_t key) {
  return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

double gaussian(std::uint64_t key) {
  const double u1 = std::max(uniform01(mix(key, 0x6e0a1c3f)), 1e-300);
  const double u2 = uniform01(mix(key, 0x52fd2e9b));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

constexpr Minute kMinutesPerDay = 1440;
constexpr Minute kMinutesPerWeek = 7 * kMinutesPerDay;

double diurnal(Minute m, double phase) {
  return std::sin(2.0 * std::numbers::pi * static_cast<double>(m % kMinutesPerDay) /
                      static_cast<double>(kMinutesPerDay) +
                  phase);
}

double weekly(Minute m, double phase) {
  return std::sin(2.0 * std::numbers::pi * static_cast<double>(m % kMinutesPerWeek) /
                      static_cast<double>(kMinutesPerWeek) +
                  phase);
}

}  // namespace

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

std::vector<EdgeKey> Topology::in_edges(const std::string& service) const {
  std::vector<EdgeKey> result;
  for (const EdgeKey& e : edges) {
    if (e.callee == service) result.push_back(e);
  }
  return result;
}

std::vector<EdgeKey> Topology::out_edges(const std::string& service) const {
  std::vector<EdgeKey> result;
  for (const EdgeKey& e : edges) {
    if (e.caller == service) result.push_back(e);
  }
  return result;
}

void Topology::save(const std::string& path) const {
  json j;
  j["services"] = services;
  json edge_list = json::array();
  for (const EdgeKey& e : edges) {
    edge_list.push_back({{"caller", e.caller}, {"callee", e.callee}});
  }
  j["edges"] = edge_list;
  j["entry_services"] = entry_services;
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << j.dump(2) << '\n';
}

Topology Topology::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open topology file: " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed topology " + path + ": " + e.what());
  }
  Topology t;
  t.services = j.at("services").get<std::vector<std::string>>();
  for (const json& je : j.at("edges")) {
    t.edges.push_back({je.at("caller").get<std::string>(), je.at("callee").get<std::string>()});
  }
  t.entry_services = j.at("entry_services").get<std::vector<std::string>>();
  return t;
}

Topology fig2_topology() {
  Topology t;
  t.services = {"S1", "S2", "S3", "S4", "S5", "S6", "S7", "S8", "S9", "S10"};
  t.edges = {{"S1", "S4"}, {"S4", "S5"},  {"S5", "S7"}, {"S6", "S7"}, {"S7", "S9"},
             {"S7", "S10"}, {"S2", "S5"}, {"S5", "S8"}, {"S3", "S6"}};
  t.entry_services = {"S5"};
  return t;
}

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

Topology generate_topology(const TopologyParams& params, std::uint64_t seed) {
  const int n = params.n_services;
  if (n < 2) {
    throw std::invalid_argument("topology needs at least 2 services");
  }
  const auto target_edges = static_cast<std::size_t>(std::lround(params.avg_out_degree * n));
  if (params.avg_out_degree <= 0.0 ||
      target_edges > static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 3) {
    throw std::invalid_argument("infeasible average out-degree for this service count");
  }

  Topology topo;
  const int width = static_cast<int>(std::to_string(n).size());
  for (int i = 1; i <= n; ++i) {
    std::string id = std::to_string(i);
    topo.services.push_back("S" + std::string(static_cast<std::size_t>(width) - id.size(), '0') +
                            id);
  }

  const int layer_count = n < 6 ? 2 : n < 25 ? 3 : n < 80 ? 4 : n < 400 ? 5 : 6;
  std::vector<std::vector<std::string>> layers(static_cast<std::size_t>(layer_count));
  std::vector<int> layer_of(static_cast<std::size_t>(n));
  {
    // ~10% front layer, ~30% leaf layer, the rest split across the middle.
    std::vector<double> fractions(static_cast<std::size_t>(layer_count),
                                  layer_count > 2 ? 0.6 / (layer_count - 2) : 0.0);
    fractions.front() = 0.1;
    fractions.back() = 0.3;
    if (layer_count == 2) fractions = {0.4, 0.6};
    std::size_t next = 0;
    for (int k = 0; k < layer_count; ++k) {
      auto count = static_cast<std::size_t>(std::max(1.0, std::floor(fractions[k] * n)));
      if (k == layer_count - 1) count = static_cast<std::size_t>(n) - next;
      count = std::min(count, static_cast<std::size_t>(n) - next -
                                  static_cast<std::size_t>(layer_count - 1 - k));
      for (std::size_t i = 0; i < count; ++i, ++next) {
        layers[static_cast<std::size_t>(k)].push_back(topo.services[next]);
        layer_of[next] = k;
      }
    }
  }

  std::mt19937_64 rng(seed);
  std::set<EdgeKey> edges;
  const auto pick = [&rng](const std::vector<std::string>& pool) -> const std::string& {
    std::uniform_int_distribution<std::size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
  };

  // Every non-front service gets one or two callers from the previous layer.
  for (int k = 1; k < layer_count; ++k) {
    for (const std::string& callee : layers[static_cast<std::size_t>(k)]) {
      const int caller_count = 1 + static_cast<int>(rng() % 2);
      for (int c = 0; c < caller_count; ++c) {
        edges.insert({pick(layers[static_cast<std::size_t>(k - 1)]), callee});
      }
    }
  }
  // Every non-leaf service calls someone.
  for (int k = 0; k + 1 < layer_count; ++k) {
    for (const std::string& caller : layers[static_cast<std::size_t>(k)]) {
      const bool has_out = std::any_of(edges.begin(), edges.end(),
                                       [&](const EdgeKey& e) { return e.caller == caller; });
      if (!has_out) {
        edges.insert({caller, pick(layers[static_cast<std::size_t>(k + 1)])});
      }
    }
  }
  // Densify with forward, skip and back edges up to the target count.
  std::size_t attempts = 0;
  while (edges.size() < target_edges && attempts < 40 * target_edges + 400) {
    ++attempts;
    std::uniform_int_distribution<int> lay(0, layer_count - 2);
    const int k = lay(rng);
    const std::string& caller = pick(layers[static_cast<std::size_t>(k)]);
    const double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    int callee_layer;
    if (r < params.back_edge_fraction && k >= 1) {
      callee_layer = static_cast<int>(rng() % static_cast<std::uint64_t>(k + 1));
    } else if (r < params.back_edge_fraction + params.skip_edge_fraction &&
               k + 2 < layer_count) {
      callee_layer = k + 2;
    } else {
      callee_layer = k + 1;
    }
    const std::string& callee = pick(layers[static_cast<std::size_t>(callee_layer)]);
    if (caller != callee) {
      edges.insert({caller, callee});
    }
  }

  // Stitch stray components onto the first front-layer service.
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < topo.services.size(); ++i) index[topo.services[i]] = i;
  UnionFind uf(topo.services.size());
  for (const EdgeKey& e : edges) uf.unite(index[e.caller], index[e.callee]);
  const std::size_t main_component = uf.find(index[layers[0].front()]);
  for (int k = 1; k < layer_count; ++k) {
    for (const std::string& service : layers[static_cast<std::size_t>(k)]) {
      if (uf.find(index[service]) != main_component) {
        edges.insert({layers[0].front(), service});
        uf.unite(index[service], index[layers[0].front()]);
      }
    }
  }

  topo.edges.assign(edges.begin(), edges.end());

  // Entry services: prefer second-layer services that both receive and make
  // calls, so every anomaly direction is exercisable around them.
  std::vector<std::string> candidates;
  for (int k = 1; k < layer_count && candidates.size() < 4 * static_cast<std::size_t>(params.entry_count);
       ++k) {
    for (const std::string& s : layers[static_cast<std::size_t>(k)]) {
      const bool has_in = std::any_of(edges.begin(), edges.end(),
                                      [&](const EdgeKey& e) { return e.callee == s; });
      const bool has_out = std::any_of(edges.begin(), edges.end(),
                                       [&](const EdgeKey& e) { return e.caller == s; });
      if (has_in && has_out) candidates.push_back(s);
    }
  }
  if (candidates.empty()) {
    for (const std::string& s : topo.services) {
      const bool has_in = std::any_of(edges.begin(), edges.end(),
                                      [&](const EdgeKey& e) { return e.callee == s; });
      if (has_in) candidates.push_back(s);
    }
  }
  if (candidates.empty()) {
    throw std::runtime_error("generated topology has no viable entry service");
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const auto entry_count =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(1, params.entry_count)),
                            candidates.size());
  topo.entry_services.assign(candidates.begin(), candidates.begin() + entry_count);
  std::sort(topo.entry_services.begin(), topo.entry_services.end());
  return topo;
}

// ---------------------------------------------------------------------------
// Baseline model
// ---------------------------------------------------------------------------

BaselineModel::BaselineModel(const Topology& topology, const BaselineParams& params,
                             std::uint64_t seed)
    : params_(params), seed_(seed) {
  for (const EdgeKey& edge : topology.edges) {
    EdgeParams p;
    p.key = mix(seed_, fnv1a(edge.label()));
    p.rt_base = params.rt_base_ms * (0.6 + uniform01(mix(p.key, 1)) );
    // Log-uniform volume spread across edges, [0.3x, 3x] of the base rate.
    p.qps_base = params.qps_base *
                 std::exp(std::log(0.3) + uniform01(mix(p.key, 2)) * (std::log(3.0) - std::log(0.3)));
    p.diurnal_phase = uniform01(mix(p.key, 3)) * 2.0 * std::numbers::pi;
    p.weekly_phase = uniform01(mix(p.key, 4)) * 2.0 * std::numbers::pi;
    edges_[edge] = p;
  }
  for (const std::string& entry : topology.entry_services) {
    EntryParams p;
    p.key = mix(seed_, fnv1a("entry:" + entry));
    p.external_base =
        params.qps_base * params.entry_external_factor * (0.7 + 0.6 * uniform01(mix(p.key, 1)));
    p.diurnal_phase = uniform01(mix(p.key, 2)) * 2.0 * std::numbers::pi;
    entries_[entry] = p;
  }
}

const BaselineModel::EdgeParams& BaselineModel::edge_params(const EdgeKey& edge) const {
  const auto it = edges_.find(edge);
  if (it == edges_.end()) {
    throw std::invalid_argument("edge not in topology: " + edge.label());
  }
  return it->second;
}

double BaselineModel::edge_qps_base(const EdgeKey& edge) const {
  return edge_params(edge).qps_base;
}

double BaselineModel::edge_rt_base(const EdgeKey& edge) const {
  return edge_params(edge).rt_base;
}

CallRecord BaselineModel::call_record(const EdgeKey& edge, Minute minute) const {
  const EdgeParams& p = edge_params(edge);
  CallRecord r;
  r.minute = minute;
  r.caller = edge.caller;
  r.callee = edge.callee;

  double rt = p.rt_base * (1.0 + params_.rt_diurnal_amplitude * diurnal(minute, p.diurnal_phase) +
                           params_.rt_weekly_amplitude * weekly(minute, p.weekly_phase));
  if (params_.rt_noise > 0.0) {
    rt += p.rt_base * params_.rt_noise * gaussian(mix(p.key, mix(11, static_cast<std::uint64_t>(minute))));
  }
  r.rt_ms = std::max(rt, 0.05);

  double qps = p.qps_base * (1.0 + params_.qps_diurnal_amplitude * diurnal(minute, p.diurnal_phase));
  if (params_.qps_noise > 0.0) {
    qps += p.qps_base * params_.qps_noise *
           gaussian(mix(p.key, mix(12, static_cast<std::uint64_t>(minute))));
  }
  r.qps = std::max(qps, 0.0);
  r.request_count = r.qps * 60.0;

  double ec = 0.0;
  if (params_.ec_burst_probability > 0.0 &&
      uniform01(mix(p.key, mix(13, static_cast<std::uint64_t>(minute)))) <
          params_.ec_burst_probability) {
    const double rate = params_.ec_burst_max_rate *
                        uniform01(mix(p.key, mix(14, static_cast<std::uint64_t>(minute))));
    ec = rate * r.request_count;
  }
  r.error_count = std::min(ec, r.request_count);
  return r;
}

double BaselineModel::external_qps(const std::string& entry, Minute minute) const {
  const auto it = entries_.find(entry);
  if (it == entries_.end()) {
    throw std::invalid_argument("not an entry service: " + entry);
  }
  const EntryParams& p = it->second;
  return std::max(
      0.0, p.external_base * (1.0 + params_.qps_diurnal_amplitude * diurnal(minute, p.diurnal_phase)));
}

double BaselineModel::business_noise(const std::string& entry, Minute minute) const {
  if (params_.business_noise <= 0.0) return 0.0;
  const auto it = entries_.find(entry);
  if (it == entries_.end()) {
    throw std::invalid_argument("not an entry service: " + entry);
  }
  const EntryParams& p = it->second;
  const double scale = params_.business_scale * (p.external_base + params_.qps_base);
  return scale * params_.business_noise *
         gaussian(mix(p.key, mix(15, static_cast<std::uint64_t>(minute))));
}

// ---------------------------------------------------------------------------
// Stream generation
// ---------------------------------------------------------------------------

namespace {

double business_value(const BaselineModel& model, const std::string& entry, Minute minute,
                      double inbound_qps_sum, double dip_factor) {
  const double raw = model.params().business_scale *
                         (model.external_qps(entry, minute) + inbound_qps_sum) * dip_factor +
                     model.business_noise(entry, minute);
  return std::max(raw, 0.0);
}

}  // namespace

MetricStore generate_baseline_minutes(const Topology& topology, const BaselineParams& params,
                                      Minute total_minutes, std::uint64_t seed) {
  if (total_minutes < 1) {
    throw std::invalid_argument("baseline needs at least one minute");
  }
  const BaselineModel model(topology, params, seed);
  MetricStore store;
  for (const EdgeKey& edge : topology.edges) {
    for (Minute m = 0; m < total_minutes; ++m) {
      store.ingest(model.call_record(edge, m));
    }
  }
  for (const std::string& entry : topology.entry_services) {
    const std::vector<EdgeKey> inbound = topology.in_edges(entry);
    for (Minute m = 0; m < total_minutes; ++m) {
      double sum = 0.0;
      for (const EdgeKey& e : inbound) {
        sum += model.call_record(e, m).qps;
      }
      store.ingest(BusinessRecord{m, entry, kBusinessMetricName,
                                  business_value(model, entry, m, sum, 1.0)});
    }
  }
  return store;
}

MetricStore generate_baseline(const Topology& topology, const BaselineParams& params,
                              std::uint64_t seed) {
  if (params.days < 8) {
    throw std::invalid_argument(
        "baseline needs >= 8 days so all detector comparison periods exist");
  }
  return generate_baseline_minutes(topology, params, params.total_minutes(), seed);
}

// ---------------------------------------------------------------------------
// Fault injection
// ---------------------------------------------------------------------------

void FaultSpec::validate() const {
  if (magnitude < 0.0) {
    throw std::invalid_argument("fault magnitude must be >= 0");
  }
  if (duration_minutes < 1) {
    throw std::invalid_argument("fault duration must be >= 1 minute");
  }
  if (attenuation <= 0.0 || attenuation > 1.0) {
    throw std::invalid_argument("attenuation must lie in (0, 1]");
  }
  if (lag_minutes < 0) {
    throw std::invalid_argument("lag must be >= 0");
  }
  if (anomaly_type == AnomalyType::Traffic) {
    if (root_edge.caller != root_service) {
      throw std::invalid_argument(
          "traffic fault root edge must leave the root service (root is the upstream origin)");
    }
  } else {
    if (root_edge.callee != root_service) {
      throw std::invalid_argument(
          "performance/reliability fault root edge must enter the root service");
    }
  }
}

namespace {

/// Multiplies the deformation at hop k: 1 + (magnitude - 1) * attenuation^k.
double hop_factor(double magnitude, double attenuation, int hop) {
  return 1.0 + (magnitude - 1.0) * std::pow(attenuation, hop);
}

void deform_edge_window(MetricStore& store, const EdgeKey& edge, AnomalyType type,
                        double magnitude, double attenuation, int hop, Minute from, Minute to,
                        double rt_coupling) {
  if (to <= from) return;
  const auto length = static_cast<std::size_t>(to - from);
  const MetricStore::EdgeSpan span = store.query_call_span(edge, to, length);
  const double att = std::pow(attenuation, hop);
  for (std::size_t i = 0; i < length; ++i) {
    CallRecord r;
    r.minute = from + static_cast<Minute>(i);
    r.caller = edge.caller;
    r.callee = edge.callee;
    r.rt_ms = span.rt.values[i];
    r.error_count = span.ec.values[i];
    r.qps = span.qps.values[i];
    r.request_count = span.request_count.values[i];
    switch (type) {
      case AnomalyType::Performance:
        r.rt_ms *= hop_factor(magnitude, attenuation, hop);
        break;
      case AnomalyType::Reliability:
        r.error_count = std::min(r.error_count + magnitude * att * r.request_count,
                                 r.request_count);
        r.rt_ms *= hop_factor(rt_coupling, attenuation, hop);
        break;
      case AnomalyType::Traffic:
        r.qps = std::max(0.0, r.qps * hop_factor(magnitude, attenuation, hop));
        r.request_count = r.qps * 60.0;
        r.error_count = std::min(r.error_count, r.request_count);
        break;
    }
    store.ingest(r);
  }
}

}  // namespace

InjectionEffect inject_fault_metrics(MetricStore& store, const Topology& topology,
                                     const BaselineModel& model, const FaultSpec& fault) {
  fault.validate();
  const Minute stream_end = store.latest_minute() ? *store.latest_minute() + 1 : 0;
  if (fault.onset_minute >= stream_end) {
    throw std::invalid_argument("fault onset lies beyond the generated stream");
  }

  const bool upward = fault.anomaly_type != AnomalyType::Traffic;
  const std::set<std::string> entry_set(topology.entry_services.begin(),
                                        topology.entry_services.end());

  InjectionEffect effect;
  // Hop-levelled flood along the propagation direction. Performance and
  // reliability deformations climb through the in-edges of each slowed
  // caller; traffic deformations descend through the out-edges of each
  // callee that lost traffic.
  std::set<std::string> visited;
  std::vector<std::string> frontier;
  effect.affected_edges.insert(fault.root_edge);
  effect.edge_hops[fault.root_edge] = 0;
  {
    const std::string& first = upward ? fault.root_edge.caller : fault.root_edge.callee;
    visited.insert(first);
    frontier.push_back(first);
    if (entry_set.count(first)) effect.reached_entries[first] = 0;
  }
  int hop = 0;
  while (!frontier.empty() && (fault.max_hops < 0 || hop < fault.max_hops)) {
    ++hop;
    std::vector<std::string> next;
    for (const std::string& service : frontier) {
      const std::vector<EdgeKey> adjacent =
          upward ? topology.in_edges(service) : topology.out_edges(service);
      for (const EdgeKey& edge : adjacent) {
        if (effect.affected_edges.insert(edge).second) {
          effect.edge_hops[edge] = hop;
        }
        const std::string& beyond = upward ? edge.caller : edge.callee;
        if (visited.insert(beyond).second) {
          next.push_back(beyond);
          if (entry_set.count(beyond) && !effect.reached_entries.count(beyond)) {
            effect.reached_entries[beyond] = hop;
          }
        }
      }
    }
    frontier = std::move(next);
  }

  if (effect.reached_entries.empty()) {
    throw std::invalid_argument("fault at " + fault.root_edge.label() +
                                " cannot reach any entry service");
  }
  int best_hop = std::numeric_limits<int>::max();
  for (const auto& [entry, h] : effect.reached_entries) {
    if (h < best_hop || (h == best_hop && entry < effect.nearest_entry)) {
      best_hop = h;
      effect.nearest_entry = entry;
    }
  }

  for (const auto& [edge, edge_hop] : effect.edge_hops) {
    const Minute from = fault.onset_minute + static_cast<Minute>(edge_hop) * fault.lag_minutes;
    const Minute to = std::min<Minute>(from + fault.duration_minutes, stream_end);
    deform_edge_window(store, edge, fault.anomaly_type, fault.magnitude, fault.attenuation,
                       edge_hop, from, to, fault.reliability_rt_factor);
  }

  if (fault.anomaly_type != AnomalyType::Traffic) {
    for (const auto& [entry, h] : effect.reached_entries) {
      PendingDip dip;
      dip.entry = entry;
      dip.onset = fault.onset_minute + static_cast<Minute>(h) * fault.lag_minutes;
      dip.duration = fault.duration_minutes;
      dip.fraction = fault.business_dip * std::pow(fault.attenuation, h);
      effect.dips.push_back(dip);
    }
  }
  return effect;
}

void rebuild_business(MetricStore& store, const Topology& topology, const BaselineModel& model,
                      const std::vector<PendingDip>& dips, Minute from, Minute to) {
  const Minute stream_end = store.latest_minute() ? *store.latest_minute() + 1 : 0;
  from = std::max<Minute>(from, 0);
  to = std::min(to, stream_end);
  if (to <= from) return;
  const auto length = static_cast<std::size_t>(to - from);
  for (const std::string& entry : topology.entry_services) {
    std::vector<double> inbound(length, 0.0);
    for (const EdgeKey& e : topology.in_edges(entry)) {
      const MetricStore::EdgeSpan span = store.query_call_span(e, to, length);
      for (std::size_t i = 0; i < length; ++i) inbound[i] += span.qps.values[i];
    }
    for (std::size_t i = 0; i < length; ++i) {
      const Minute m = from + static_cast<Minute>(i);
      double dip_factor = 1.0;
      for (const PendingDip& dip : dips) {
        if (dip.entry == entry && m >= dip.onset && m < dip.onset + dip.duration) {
          dip_factor *= 1.0 - dip.fraction;
        }
      }
      store.ingest(BusinessRecord{m, entry, kBusinessMetricName,
                                  business_value(model, entry, m, inbound[i], dip_factor)});
    }
  }
}

void apply_decoy(MetricStore& store, const BaselineModel& model, const DecoySpec& decoy) {
  const Minute stream_end = store.latest_minute() ? *store.latest_minute() + 1 : 0;
  const Minute to = std::min<Minute>(decoy.onset_minute + decoy.duration_minutes, stream_end);
  deform_edge_window(store, decoy.edge, decoy.anomaly_type, decoy.magnitude,
                     /*attenuation=*/1.0, /*hop=*/0, decoy.onset_minute, to,
                     /*rt_coupling=*/3.0);
  (void)model;
}

void apply_override(MetricStore& store, const BaselineModel& model,
                    const WindowOverride& override_spec) {
  if (override_spec.target == WindowOverride::Target::Business) {
    for (std::size_t i = 0; i < override_spec.values.size(); ++i) {
      store.ingest(BusinessRecord{override_spec.start_minute + static_cast<Minute>(i),
                                  override_spec.service, override_spec.metric,
                                  override_spec.values[i]});
    }
    return;
  }
  const auto length = override_spec.values.size();
  const Minute to = override_spec.start_minute + static_cast<Minute>(length);
  const MetricStore::EdgeSpan span = store.query_call_span(override_spec.edge, to, length);
  for (std::size_t i = 0; i < length; ++i) {
    CallRecord r;
    r.minute = override_spec.start_minute + static_cast<Minute>(i);
    r.caller = override_spec.edge.caller;
    r.callee = override_spec.edge.callee;
    r.rt_ms = span.rt.values[i];
    r.qps = std::max(0.0, override_spec.values[i]);
    r.request_count = r.qps * 60.0;
    r.error_count = std::min(span.ec.values[i], r.request_count);
    store.ingest(r);
  }
  (void)model;
}

}  // namespace chainrca
