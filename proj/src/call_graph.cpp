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

#include "chainrca/call_graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace chainrca {

namespace {
constexpr Minute kMinutesPerDay = 1440;
constexpr Minute kMinutesPerWeek = 7 * kMinutesPerDay;
constexpr Minute kComparisonPeriodMinutes = 60;
}  // namespace

Minute detector_lookback_minutes(int detection_window_minutes) {
  return kMinutesPerWeek + kComparisonPeriodMinutes + detection_window_minutes + 1;
}

Series StoreSeriesProvider::history(const EdgeKey& edge, MetricKind kind, Minute end_minute,
                                    std::size_t length) const {
  return store_->query_window(edge, kind, end_minute, length);
}

Series StoreSeriesProvider::request_history(const EdgeKey& edge, Minute end_minute,
                                            std::size_t length) const {
  return store_->query_call_span(edge, end_minute, length).request_count;
}

CallGraph CallGraph::build(const MetricStore& store, Minute incident_minute,
                           int call_window_minutes, int metric_window_minutes) {
  if (call_window_minutes < 1 || metric_window_minutes < 1) {
    throw std::invalid_argument("CallGraph::build: window lengths must be positive");
  }
  CallGraph graph;
  graph.store_ = &store;
  graph.incident_minute_ = incident_minute;
  graph.call_window_minutes_ = call_window_minutes;
  graph.metric_window_minutes_ = metric_window_minutes;

  // One cached span per edge covers the metric window and every detector
  // comparison period, clamped to the data actually present.
  Minute lookback = detector_lookback_minutes(/*detection_window_minutes=*/10);
  lookback = std::max<Minute>(lookback, metric_window_minutes);
  graph.span_start_ = incident_minute - lookback;
  if (auto earliest = store.earliest_minute(); earliest && *earliest > graph.span_start_) {
    graph.span_start_ = std::min(*earliest, incident_minute - metric_window_minutes);
  }

  graph.edges_ = store.edges_active(incident_minute, static_cast<std::size_t>(call_window_minutes));
  for (const EdgeKey& edge : graph.edges_) {
    graph.nodes_.insert(edge.caller);
    graph.nodes_.insert(edge.callee);
    graph.out_edges_[edge.caller].push_back({edge.callee, edge});
    graph.in_edges_[edge.callee].push_back({edge.caller, edge});
  }
  for (auto& [service, adj] : graph.out_edges_) {
    std::sort(adj.begin(), adj.end());
  }
  for (auto& [service, adj] : graph.in_edges_) {
    std::sort(adj.begin(), adj.end());
  }
  return graph;
}

bool CallGraph::has_edge(const EdgeKey& edge) const {
  return std::binary_search(edges_.begin(), edges_.end(), edge);
}

void CallGraph::require_edge(const EdgeKey& edge) const {
  if (!has_edge(edge)) {
    throw std::invalid_argument("unknown edge: " + edge.label());
  }
}

std::vector<std::pair<std::string, EdgeKey>> CallGraph::neighbors(const std::string& service,
                                                                  Direction direction) const {
  if (!has_node(service)) {
    throw std::invalid_argument("unknown service: " + service);
  }
  const auto& adjacency = direction == Direction::Upstream ? in_edges_ : out_edges_;
  const auto it = adjacency.find(service);
  if (it == adjacency.end()) {
    return {};
  }
  return it->second;
}

const CallGraph::CachedSpan& CallGraph::span_for(const EdgeKey& edge) const {
  require_edge(edge);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto it = cache_.find(edge);
  if (it == cache_.end()) {
    auto entry = std::make_shared<CachedSpan>();
    const auto length = static_cast<std::size_t>(incident_minute_ - span_start_);
    entry->span = store_->query_call_span(edge, incident_minute_, length);
    const Minute window_start = incident_minute_ - metric_window_minutes_;
    const auto window = static_cast<std::size_t>(metric_window_minutes_);
    entry->metric_window_rt = entry->span.rt.slice(window_start, window);
    entry->metric_window_ec = entry->span.ec.slice(window_start, window);
    entry->metric_window_qps = entry->span.qps.slice(window_start, window);
    entry->metric_window_req = entry->span.request_count.slice(window_start, window);
    it = cache_.emplace(edge, std::move(entry)).first;
  }
  return *it->second;
}

const Series& CallGraph::edge_series(const EdgeKey& edge, MetricKind kind) const {
  const CachedSpan& cached = span_for(edge);
  switch (kind) {
    case MetricKind::RT: return cached.metric_window_rt;
    case MetricKind::EC: return cached.metric_window_ec;
    case MetricKind::QPS: return cached.metric_window_qps;
  }
  throw std::logic_error("unreachable metric kind");
}

const Series& CallGraph::edge_request_counts(const EdgeKey& edge) const {
  return span_for(edge).metric_window_req;
}

Series CallGraph::history(const EdgeKey& edge, MetricKind kind, Minute end_minute,
                          std::size_t length) const {
  const CachedSpan& cached = span_for(edge);
  const Series* full = nullptr;
  switch (kind) {
    case MetricKind::RT: full = &cached.span.rt; break;
    case MetricKind::EC: full = &cached.span.ec; break;
    case MetricKind::QPS: full = &cached.span.qps; break;
  }
  const Minute start = end_minute - static_cast<Minute>(length);
  if (start >= full->start_minute && end_minute <= full->end_minute()) {
    return full->slice(start, length);
  }
  // Outside the cached span (unusually long lookback): fall through to the
  // store so the window contract still holds.
  return store_->query_window(edge, kind, end_minute, length);
}

Series CallGraph::request_history(const EdgeKey& edge, Minute end_minute,
                                  std::size_t length) const {
  const CachedSpan& cached = span_for(edge);
  const Series& full = cached.span.request_count;
  const Minute start = end_minute - static_cast<Minute>(length);
  if (start >= full.start_minute && end_minute <= full.end_minute()) {
    return full.slice(start, length);
  }
  return store_->query_call_span(edge, end_minute, length).request_count;
}

std::size_t CallGraph::series_loads() const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  return cache_.size();
}

}  // namespace chainrca
