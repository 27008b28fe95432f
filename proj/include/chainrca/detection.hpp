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

#include <array>
#include <optional>
#include <string>

#include "chainrca/call_graph.hpp"
#include "chainrca/models.hpp"
#include "chainrca/series.hpp"

namespace chainrca {

/// The three anomaly classes this engine localizes. Each binds one quality
/// metric and one propagation direction: performance (RT) and reliability
/// (EC) anomalies travel from callees to callers, traffic (QPS) anomalies
/// from callers to callees.
enum class AnomalyType { Performance, Reliability, Traffic };

inline const char* to_string(AnomalyType t) {
  switch (t) {
    case AnomalyType::Performance: return "Performance";
    case AnomalyType::Reliability: return "Reliability";
    case AnomalyType::Traffic: return "Traffic";
  }
  return "?";
}

AnomalyType anomaly_type_from_string(const std::string& name);

inline MetricKind metric_for(AnomalyType t) {
  switch (t) {
    case AnomalyType::Performance: return MetricKind::RT;
    case AnomalyType::Reliability: return MetricKind::EC;
    case AnomalyType::Traffic: return MetricKind::QPS;
  }
  return MetricKind::RT;
}

/// Side of a service, relative to the call direction, where the anomaly
/// source lies: chains extend toward this side.
inline Direction source_side(AnomalyType t) {
  return t == AnomalyType::Traffic ? Direction::Upstream : Direction::Downstream;
}

constexpr std::array<AnomalyType, 3> kAllAnomalyTypes = {
    AnomalyType::Performance, AnomalyType::Reliability, AnomalyType::Traffic};

struct DetectionConfig {
  int detection_window_minutes = 10;
  double rt_threshold_ms = 50.0;
  double traffic_correlation_threshold = 0.9;
  int moving_average_window = 10;

  void validate() const;
};

/// Historical reference windows for the RT features: the hour before the
/// detection window, and the identical clock hour one day and one week back.
enum class ComparisonPeriod { LastHour, SameHourPreviousDay, SameHourPreviousWeek };

constexpr std::array<ComparisonPeriod, 3> kComparisonPeriods = {
    ComparisonPeriod::LastHour, ComparisonPeriod::SameHourPreviousDay,
    ComparisonPeriod::SameHourPreviousWeek};

Minute comparison_period_offset(ComparisonPeriod period);

/// 12 RT features: per comparison period, the count of detection-window
/// values over the period maximum, the delta of maxima, the count over the
/// period's maximum moving average, and the ratio of averages.
struct RtFeatureVector {
  std::array<double, 12> values{};
  bool degraded = false;  // some comparison period predates the data

  FeatureVector as_vector() const { return {values.begin(), values.end()}; }
};

/// 5 EC features: previous-day and previous-minute delta outlier means,
/// RT-over-threshold flag, maximum error rate, and EC/RT correlation over
/// the detection window.
struct EcFeatureVector {
  std::array<double, 5> values{};
  bool degraded = false;

  FeatureVector as_vector() const { return {values.begin(), values.end()}; }
};

struct AnomalyVerdict {
  bool anomalous = false;
  bool skipped = false;  // missing history; treated as non-anomalous
  AnomalyType anomaly_type = AnomalyType::Performance;
  EdgeKey edge;
};

/// Ratio-of-averages fallback when the reference moving-average maximum is 0:
/// 0/0 reads as 0, anything positive over 0 reads as this sentinel.
constexpr double kRatioOverZeroSentinel = 1e6;

/// Returns nullopt when even the last-hour comparison period predates the
/// available history (the caller treats the edge as non-anomalous).
std::optional<RtFeatureVector> extract_rt_features(const EdgeSeriesProvider& provider,
                                                   const EdgeKey& edge, Minute incident_minute,
                                                   const DetectionConfig& config);

std::optional<EcFeatureVector> extract_ec_features(const EdgeSeriesProvider& provider,
                                                   const EdgeKey& edge, Minute incident_minute,
                                                   const DetectionConfig& config);

AnomalyVerdict detect_performance(const EdgeSeriesProvider& provider, const EdgeKey& edge,
                                  Minute incident_minute, const OneClassSeparator& model,
                                  const DetectionConfig& config);

AnomalyVerdict detect_reliability(const EdgeSeriesProvider& provider, const EdgeKey& edge,
                                  Minute incident_minute, const ForestClassifier& model,
                                  const DetectionConfig& config);

/// 3-sigma outliers on the detection window (reference: the rest of the last
/// hour) gated by Pearson correlation against the initial anomalous
/// service's business metric over the metric window.
AnomalyVerdict detect_traffic(const EdgeSeriesProvider& provider, const EdgeKey& edge,
                              Minute incident_minute, const Series& business_series,
                              const DetectionConfig& config);

}  // namespace chainrca
