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
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chainrca/metric_store.hpp"
#include "chainrca/series.hpp"

namespace chainrca {

enum class Direction { Upstream, Downstream };

inline const char* to_string(Direction d) {
  return d == Direction::Upstream ? "upstream" : "downstream";
}

/// Serves per-edge metric history to the anomaly detectors. Implemented by
/// CallGraph (cached, on-demand) and by a plain store adapter for offline
/// feature extraction.
class EdgeSeriesProvider {
 public:
  virtual ~EdgeSeriesProvider() = default;

  /// Gap-filled values for [end_minute - length, end_minute).
  virtual Series history(const EdgeKey& edge, MetricKind kind, Minute end_minute,
                         std::size_t length) const = 0;

  /// Per-minute request counts for the same window convention.
  virtual Series request_history(const EdgeKey& edge, Minute end_minute,
                                 std::size_t length) const = 0;

  /// Earliest minute with data, for short-history degradation decisions.
  virtual std::optional<Minute> earliest_minute() const = 0;
};

/// Uncached pass-through provider over a MetricStore.
class StoreSeriesProvider final : public EdgeSeriesProvider {
 public:
  explicit StoreSeriesProvider(const MetricStore& store) : store_(&store) {}
  Series history(const EdgeKey& edge, MetricKind kind, Minute end_minute,
                 std::size_t length) const override;
  Series request_history(const EdgeKey& edge, Minute end_minute,
                         std::size_t length) const override;
  std::optional<Minute> earliest_minute() const override { return store_->earliest_minute(); }

 private:
  const MetricStore* store_;
};

/// Snapshot of the service call graph around one incident.
///
/// Nodes and edges come from the calls observed in the call window (default
/// the last 30 minutes before the incident). Edge metric series spanning the
/// metric window (default 60 minutes) and the detector comparison periods are
/// pulled from the store only when an edge is first reached by the analysis,
/// one span read per edge, and cached for the rest of the run.
class CallGraph final : public EdgeSeriesProvider {
 public:
  static constexpr int kDefaultCallWindowMinutes = 30;
  static constexpr int kDefaultMetricWindowMinutes = 60;

  static CallGraph build(const MetricStore& store, Minute incident_minute,
                         int call_window_minutes = kDefaultCallWindowMinutes,
                         int metric_window_minutes = kDefaultMetricWindowMinutes);

  const std::set<std::string>& nodes() const { return nodes_; }
  const std::vector<EdgeKey>& edges() const { return edges_; }
  bool has_node(const std::string& service) const { return nodes_.count(service) > 0; }
  bool has_edge(const EdgeKey& edge) const;

  /// Neighbors of a service on one side, ordered lexicographically by
  /// neighbor id. Upstream pairs are (caller, caller->service); downstream
  /// pairs are (callee, service->callee). Throws for unknown services.
  std::vector<std::pair<std::string, EdgeKey>> neighbors(const std::string& service,
                                                         Direction direction) const;

  /// Metric-window series ending at the incident minute, loaded on demand
  /// and cached; repeated calls return the identical values.
  const Series& edge_series(const EdgeKey& edge, MetricKind kind) const;
  const Series& edge_request_counts(const EdgeKey& edge) const;

  // EdgeSeriesProvider: arbitrary historical windows for detector comparison
  // periods, sliced from the cached per-edge span.
  Series history(const EdgeKey& edge, MetricKind kind, Minute end_minute,
                 std::size_t length) const override;
  Series request_history(const EdgeKey& edge, Minute end_minute,
                         std::size_t length) const override;
  std::optional<Minute> earliest_minute() const override { return store_->earliest_minute(); }

  Minute incident_minute() const { return incident_minute_; }
  int call_window_minutes() const { return call_window_minutes_; }
  int metric_window_minutes() const { return metric_window_minutes_; }

  /// Distinct edges whose span has been pulled from the store so far.
  std::size_t series_loads() const;

 private:
  struct CachedSpan {
    MetricStore::EdgeSpan span;
    Series metric_window_rt, metric_window_ec, metric_window_qps, metric_window_req;
  };

  CallGraph() = default;
  const CachedSpan& span_for(const EdgeKey& edge) const;
  void require_edge(const EdgeKey& edge) const;

  const MetricStore* store_ = nullptr;
  Minute incident_minute_ = 0;
  int call_window_minutes_ = kDefaultCallWindowMinutes;
  int metric_window_minutes_ = kDefaultMetricWindowMinutes;
  Minute span_start_ = 0;

  std::set<std::string> nodes_;
  std::vector<EdgeKey> edges_;  // sorted
  std::map<std::string, std::vector<std::pair<std::string, EdgeKey>>> out_edges_;
  std::map<std::string, std::vector<std::pair<std::string, EdgeKey>>> in_edges_;

  mutable std::mutex cache_mutex_;
  mutable std::map<EdgeKey, std::shared_ptr<const CachedSpan>> cache_;
};

/// History needed by the detectors: a week-ago comparison hour plus the
/// detection window and one spare minute for previous-minute deltas.
Minute detector_lookback_minutes(int detection_window_minutes);

}  // namespace chainrca
