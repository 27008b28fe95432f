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

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chainrca/series.hpp"

namespace chainrca {

/// One minute of aggregated metrics for a service call edge.
struct CallRecord {
  Minute minute = 0;
  std::string caller;
  std::string callee;
  double rt_ms = 0.0;
  double error_count = 0.0;
  double qps = 0.0;
  double request_count = 0.0;

  EdgeKey edge() const { return EdgeKey{caller, callee}; }
};

/// One minute of a business metric (e.g. successful orders) for a service.
struct BusinessRecord {
  Minute minute = 0;
  std::string service;
  std::string metric_name;
  double value = 0.0;
};

/// In-memory, minute-bucketed store for service-call and business metrics.
/// Stands in for the production TSDB: single-writer ingestion, then immutable
/// multi-reader queries during an analysis run.
///
/// Window queries are gap-filled: EC/QPS/request-count gaps mean "no calls"
/// and read as 0; RT gaps forward-fill from the last observed value (0 when
/// there is none) so that an uncalled edge does not look like a latency drop.
/// All windows are half-open [end - length, end).
class MetricStore {
 public:
  /// Rejects records violating field invariants (empty/equal service ids,
  /// negative values, error_count > request_count, request_count vs qps*60
  /// off by more than 1%). Re-ingesting the same key and minute overwrites.
  void ingest(const CallRecord& record);
  void ingest(const BusinessRecord& record);

  Series query_window(const EdgeKey& edge, MetricKind kind, Minute end_minute,
                      std::size_t length) const;

  Series query_business_window(const std::string& service, const std::string& metric_name,
                               Minute end_minute, std::size_t length) const;

  /// All four call-metric windows of one edge, materialized in a single read.
  struct EdgeSpan {
    Series rt;
    Series ec;
    Series qps;
    Series request_count;
  };
  EdgeSpan query_call_span(const EdgeKey& edge, Minute end_minute, std::size_t length) const;

  /// Edges with at least one record with request_count > 0 in the window.
  std::vector<EdgeKey> edges_active(Minute window_end, std::size_t length) const;

  /// Earliest minute with any ingested record; nullopt for an empty store.
  std::optional<Minute> earliest_minute() const { return earliest_; }
  std::optional<Minute> latest_minute() const { return latest_; }

  /// True if the service was ever seen as caller, callee or business owner.
  bool knows_service(const std::string& service) const;
  std::vector<std::string> known_services() const;

  std::size_t edge_count() const { return edges_.size(); }
  std::size_t call_record_count() const;
  std::size_t business_record_count() const;

  /// Number of window/span queries served; used to verify on-demand loading.
  std::uint64_t read_count() const { return reads_.load(std::memory_order_relaxed); }

  void save_jsonl(const std::string& path) const;
  static MetricStore load_jsonl(const std::string& path);

  MetricStore() = default;
  MetricStore(const MetricStore& other);
  MetricStore& operator=(const MetricStore& other);
  MetricStore(MetricStore&&) = default;
  MetricStore& operator=(MetricStore&&) = default;

 private:
  // Column layout per edge, sorted by minute. Appends in minute order are
  // O(1); out-of-order ingest falls back to a binary-search upsert.
  struct EdgeData {
    std::vector<Minute> minutes;
    std::vector<double> rt, ec, qps, req;
    void upsert(const CallRecord& r);
  };
  struct BusinessData {
    std::vector<Minute> minutes;
    std::vector<double> values;
    void upsert(Minute minute, double value);
  };

  void note_minute(Minute m);
  static void fill_window(const std::vector<Minute>& minutes, const std::vector<double>& column,
                          Minute start, std::size_t length, bool forward_fill, double* out);

  std::map<EdgeKey, EdgeData> edges_;
  std::map<std::pair<std::string, std::string>, BusinessData> business_;
  std::set<std::string> services_;
  std::optional<Minute> earliest_;
  std::optional<Minute> latest_;
  mutable std::atomic<std::uint64_t> reads_{0};
};

}  // namespace chainrca
