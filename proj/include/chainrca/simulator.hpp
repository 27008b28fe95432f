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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chainrca/detection.hpp"
#include "chainrca/metric_store.hpp"
#include "chainrca/series.hpp"

namespace chainrca {

/// Synthetic service topology: layered call structure with optional skip and
/// back edges, plus the entry services that carry business metrics.
struct Topology {
  std::vector<std::string> services;
  std::vector<EdgeKey> edges;
  std::vector<std::string> entry_services;

  std::vector<EdgeKey> in_edges(const std::string& service) const;
  std::vector<EdgeKey> out_edges(const std::string& service) const;

  void save(const std::string& path) const;
  static Topology load(const std::string& path);
};

struct TopologyParams {
  int n_services = 40;
  double avg_out_degree = 1.8;
  double skip_edge_fraction = 0.10;  // edges jumping a layer
  double back_edge_fraction = 0.03;  // edges pointing to earlier layers (cycles)
  int entry_count = 3;
};

/// Deterministic layered topology. Throws when the requested degree is
/// infeasible for the service count.
Topology generate_topology(const TopologyParams& params, std::uint64_t seed);

/// The worked-example topology: S1->S4->S5, S5->{S7,S8}, S2->S5, S6->S7,
/// S7->{S9,S10}, with S5 as the entry service.
Topology fig2_topology();

/// Baseline stream shape. Noise and fluctuation knobs live here so that a
/// noise-free preset is a configuration, not a code branch. RT is in
/// milliseconds, QPS in requests/second; sinusoid amplitudes and noise are
/// fractions of each edge's base level.
struct BaselineParams {
  int days = 10;
  double rt_base_ms = 20.0;
  double rt_diurnal_amplitude = 0.25;
  double rt_weekly_amplitude = 0.08;
  double rt_noise = 0.05;
  double qps_base = 100.0;
  double qps_diurnal_amplitude = 0.30;
  double qps_noise = 0.03;
  double ec_burst_probability = 0.012;  // per-minute chance of a benign error burst
  double ec_burst_max_rate = 0.004;     // burst errors as a fraction of request count
  double business_scale = 0.5;
  double business_noise = 0.005;
  double entry_external_factor = 0.3;  // external user traffic relative to qps_base

  Minute total_minutes() const { return static_cast<Minute>(days) * 1440; }
};

/// Pure per-(edge, minute) signal model. Every stochastic draw is keyed by
/// (seed, stream, edge, minute), so any sub-range of the stream can be
/// recomputed identically after fault injection patches the store.
class BaselineModel {
 public:
  BaselineModel(const Topology& topology, const BaselineParams& params, std::uint64_t seed);

  CallRecord call_record(const EdgeKey& edge, Minute minute) const;
  double external_qps(const std::string& entry, Minute minute) const;
  double business_noise(const std::string& entry, Minute minute) const;
  double edge_qps_base(const EdgeKey& edge) const;
  double edge_rt_base(const EdgeKey& edge) const;

  const BaselineParams& params() const { return params_; }

 private:
  struct EdgeParams {
    double rt_base = 0.0;
    double qps_base = 0.0;
    double diurnal_phase = 0.0;
    double weekly_phase = 0.0;
    std::uint64_t key = 0;
  };
  struct EntryParams {
    double external_base = 0.0;
    double diurnal_phase = 0.0;
    std::uint64_t key = 0;
  };

  const EdgeParams& edge_params(const EdgeKey& edge) const;

  BaselineParams params_;
  std::uint64_t seed_ = 0;
  std::map<EdgeKey, EdgeParams> edges_;
  std::map<std::string, EntryParams> entries_;
};

/// Generates the full baseline stream (call records for every edge plus the
/// business metric of every entry service) into a store. Requires at least 8
/// days so every detector comparison period exists.
MetricStore generate_baseline(const Topology& topology, const BaselineParams& params,
                              std::uint64_t seed);

/// Short-horizon variant used by the scalability runs, where detector
/// comparison periods are allowed to degrade.
MetricStore generate_baseline_minutes(const Topology& topology, const BaselineParams& params,
                                      Minute total_minutes, std::uint64_t seed);

/// Name of the business metric every entry service carries.
inline constexpr const char* kBusinessMetricName = "successful_orders";

/// An injected fault. The magnitude is a multiplier for RT (performance) and
/// QPS (traffic; < 1 is a drop, > 1 a surge) and a target error rate for
/// reliability. The deformation decays by `attenuation` per hop and shifts by
/// `lag_minutes` per hop while it propagates along the anomaly type's
/// direction (performance/reliability climb to callers, traffic descends to
/// callees).
struct FaultSpec {
  std::string root_service;
  EdgeKey root_edge;
  AnomalyType anomaly_type = AnomalyType::Performance;
  Minute onset_minute = 0;
  int duration_minutes = 45;
  double magnitude = 8.0;
  double attenuation = 0.8;
  int lag_minutes = 0;
  int max_hops = -1;                   // < 0: propagate to the graph boundary
  double reliability_rt_factor = 3.0;  // RT coupling of reliability faults
  double business_dip = 0.4;           // business drop when a perf/rel fault reaches an entry

  void validate() const;
};

struct GroundTruth {
  Minute incident_minute = 0;
  std::string initial_service;
  std::string business_metric = kBusinessMetricName;
  std::string root_service;
  AnomalyType anomaly_type = AnomalyType::Performance;
};

/// Entry-service business dip pending application, in minutes
/// [onset, onset + duration) at the given fraction.
struct PendingDip {
  std::string entry;
  Minute onset = 0;
  int duration = 0;
  double fraction = 0.0;
};

struct InjectionEffect {
  std::set<EdgeKey> affected_edges;
  std::map<EdgeKey, int> edge_hops;
  std::map<std::string, int> reached_entries;  // entry -> hop distance
  std::string nearest_entry;
  std::vector<PendingDip> dips;
};

/// Deforms the edge streams of one fault. Business metrics are NOT touched
/// here: collect the dips of all faults of the issue and call
/// rebuild_business once, so concurrent faults stack consistently.
/// Throws when the fault cannot reach any entry service.
InjectionEffect inject_fault_metrics(MetricStore& store, const Topology& topology,
                                     const BaselineModel& model, const FaultSpec& fault);

/// Recomputes every entry's business series over [from, to) from the
/// (possibly patched) QPS in the store, the external traffic model, and the
/// pending dips. Keyed noise makes this bit-identical to the baseline where
/// nothing changed.
void rebuild_business(MetricStore& store, const Topology& topology, const BaselineModel& model,
                      const std::vector<PendingDip>& dips, Minute from, Minute to);

/// A single-edge anomaly with no propagation and no business impact; used to
/// exercise the pruning strategy with branch anomalies that are irrelevant
/// to the availability issue.
struct DecoySpec {
  EdgeKey edge;
  AnomalyType anomaly_type = AnomalyType::Performance;
  double magnitude = 6.0;
  Minute onset_minute = 0;
  int duration_minutes = 6;
};

void apply_decoy(MetricStore& store, const BaselineModel& model, const DecoySpec& decoy);

/// Replaces one window of an edge QPS stream (request counts follow) or of a
/// business metric with explicit values.
struct WindowOverride {
  enum class Target { EdgeQps, Business };
  Target target = Target::EdgeQps;
  EdgeKey edge;
  std::string service;
  std::string metric = kBusinessMetricName;
  Minute start_minute = 0;
  std::vector<double> values;
};

void apply_override(MetricStore& store, const BaselineModel& model, const WindowOverride& override_spec);

}  // namespace chainrca
