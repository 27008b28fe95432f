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

#include "chainrca/detection.hpp"

#include <algorithm>
#include <stdexcept>

#include "chainrca/stats.hpp"

namespace chainrca {

namespace {
constexpr Minute kMinutesPerDay = 1440;
constexpr Minute kMinutesPerWeek = 7 * kMinutesPerDay;
constexpr std::size_t kComparisonLength = 60;
}  // namespace

AnomalyType anomaly_type_from_string(const std::string& name) {
  if (name == "Performance") return AnomalyType::Performance;
  if (name == "Reliability") return AnomalyType::Reliability;
  if (name == "Traffic") return AnomalyType::Traffic;
  throw std::invalid_argument("unknown anomaly type: " + name);
}

void DetectionConfig::validate() const {
  if (detection_window_minutes < 2 || detection_window_minutes > 30) {
    throw std::invalid_argument("detection_window_minutes must lie in [2, 30]");
  }
  if (moving_average_window < 1 ||
      moving_average_window > static_cast<int>(kComparisonLength)) {
    throw std::invalid_argument("moving_average_window must lie in [1, 60]");
  }
  if (traffic_correlation_threshold < 0.0 || traffic_correlation_threshold > 1.0) {
    throw std::invalid_argument("traffic_correlation_threshold must lie in [0, 1]");
  }
}

Minute comparison_period_offset(ComparisonPeriod period) {
  switch (period) {
    case ComparisonPeriod::LastHour: return 0;
    case ComparisonPeriod::SameHourPreviousDay: return kMinutesPerDay;
    case ComparisonPeriod::SameHourPreviousWeek: return kMinutesPerWeek;
  }
  return 0;
}

namespace {

bool window_available(const std::optional<Minute>& earliest, Minute start) {
  return earliest.has_value() && *earliest <= start;
}

}  // namespace

std::optional<RtFeatureVector> extract_rt_features(const EdgeSeriesProvider& provider,
                                                   const EdgeKey& edge, Minute incident_minute,
                                                   const DetectionConfig& config) {
  config.validate();
  const auto window = static_cast<std::size_t>(config.detection_window_minutes);
  const Minute periods_end = incident_minute - static_cast<Minute>(window);
  const auto earliest = provider.earliest_minute();
  if (!window_available(earliest, periods_end - static_cast<Minute>(kComparisonLength))) {
    return std::nullopt;  // not even the last hour exists yet
  }

  const Series current = provider.history(edge, MetricKind::RT, incident_minute, window);
  const double current_max = *std::max_element(current.values.begin(), current.values.end());
  const double current_mean = mean(current.values);

  RtFeatureVector features;
  std::size_t slot = 0;
  for (ComparisonPeriod period : kComparisonPeriods) {
    Minute end = periods_end - comparison_period_offset(period);
    if (!window_available(earliest, end - static_cast<Minute>(kComparisonLength))) {
      end = periods_end;  // short history: fall back to the last hour
      features.degraded = true;
    }
    const Series reference = provider.history(edge, MetricKind::RT, end, kComparisonLength);
    const double ref_max =
        *std::max_element(reference.values.begin(), reference.values.end());
    const std::vector<double> averages =
        moving_average(reference.values, static_cast<std::size_t>(config.moving_average_window));
    const double ref_avg_max = *std::max_element(averages.begin(), averages.end());

    double over_max = 0.0, over_avg = 0.0;
    for (double v : current.values) {
      if (v > ref_max) over_max += 1.0;
      if (v > ref_avg_max) over_avg += 1.0;
    }
    double ratio;
    if (ref_avg_max == 0.0) {
      ratio = current_mean == 0.0 ? 0.0 : kRatioOverZeroSentinel;
    } else {
      ratio = current_mean / ref_avg_max;
    }

    features.values[slot++] = over_max;
    features.values[slot++] = current_max - ref_max;
    features.values[slot++] = over_avg;
    features.values[slot++] = ratio;
  }
  return features;
}

namespace {

/// Mean value of the 3-sigma outliers among the detection-window deltas,
/// with all 60 deltas as the reference; 0 when there are none.
double delta_outlier_mean(const std::vector<double>& deltas, std::size_t window) {
  const std::span<const double> probe{deltas.data() + (deltas.size() - window), window};
  const auto outliers = three_sigma_outliers(deltas, probe);
  if (outliers.empty()) return 0.0;
  double sum = 0.0;
  for (const Outlier& o : outliers) sum += o.value;
  return sum / static_cast<double>(outliers.size());
}

}  // namespace

std::optional<EcFeatureVector> extract_ec_features(const EdgeSeriesProvider& provider,
                                                   const EdgeKey& edge, Minute incident_minute,
                                                   const DetectionConfig& config) {
  config.validate();
  const auto window = static_cast<std::size_t>(config.detection_window_minutes);
  const auto earliest = provider.earliest_minute();
  // The previous-minute deltas need one extra minute before the hour.
  if (!window_available(earliest,
                        incident_minute - static_cast<Minute>(kComparisonLength) - 1)) {
    return std::nullopt;
  }

  EcFeatureVector features;

  const Series ec_hour =
      provider.history(edge, MetricKind::EC, incident_minute, kComparisonLength);

  Series ec_prev_day;
  const Minute prev_day_end = incident_minute - kMinutesPerDay;
  if (window_available(earliest, prev_day_end - static_cast<Minute>(kComparisonLength))) {
    ec_prev_day = provider.history(edge, MetricKind::EC, prev_day_end, kComparisonLength);
  } else {
    ec_prev_day = ec_hour;  // short history: deltas collapse to zero
    features.degraded = true;
  }
  std::vector<double> day_deltas(kComparisonLength);
  for (std::size_t i = 0; i < kComparisonLength; ++i) {
    day_deltas[i] = ec_hour.values[i] - ec_prev_day.values[i];
  }
  features.values[0] = delta_outlier_mean(day_deltas, window);

  const Series ec_hour_plus =
      provider.history(edge, MetricKind::EC, incident_minute, kComparisonLength + 1);
  std::vector<double> minute_deltas(kComparisonLength);
  for (std::size_t i = 0; i < kComparisonLength; ++i) {
    minute_deltas[i] = ec_hour_plus.values[i + 1] - ec_hour_plus.values[i];
  }
  features.values[1] = delta_outlier_mean(minute_deltas, window);

  const Series rt_window = provider.history(edge, MetricKind::RT, incident_minute, window);
  features.values[2] = mean(rt_window.values) > config.rt_threshold_ms ? 1.0 : 0.0;

  const Series ec_window = provider.history(edge, MetricKind::EC, incident_minute, window);
  const Series req_window = provider.request_history(edge, incident_minute, window);
  double max_rate = 0.0;
  for (std::size_t i = 0; i < window; ++i) {
    if (req_window.values[i] > 0.0) {
      max_rate = std::max(max_rate, ec_window.values[i] / req_window.values[i]);
    }
  }
  features.values[3] = max_rate;

  features.values[4] = pearson(ec_window.values, rt_window.values);
  return features;
}

AnomalyVerdict detect_performance(const EdgeSeriesProvider& provider, const EdgeKey& edge,
                                  Minute incident_minute, const OneClassSeparator& model,
                                  const DetectionConfig& config) {
  if (model.support_vector_count() == 0) {
    throw std::logic_error("performance detector: model is untrained");
  }
  AnomalyVerdict verdict{false, false, AnomalyType::Performance, edge};
  const auto features = extract_rt_features(provider, edge, incident_minute, config);
  if (!features) {
    verdict.skipped = true;
    return verdict;
  }
  verdict.anomalous = model.is_outlier(features->as_vector());
  return verdict;
}

AnomalyVerdict detect_reliability(const EdgeSeriesProvider& provider, const EdgeKey& edge,
                                  Minute incident_minute, const ForestClassifier& model,
                                  const DetectionConfig& config) {
  if (model.tree_count() == 0) {
    throw std::logic_error("reliability detector: model is untrained");
  }
  AnomalyVerdict verdict{false, false, AnomalyType::Reliability, edge};
  const auto features = extract_ec_features(provider, edge, incident_minute, config);
  if (!features) {
    verdict.skipped = true;
    return verdict;
  }
  verdict.anomalous = model.predict(features->as_vector());
  return verdict;
}

AnomalyVerdict detect_traffic(const EdgeSeriesProvider& provider, const EdgeKey& edge,
                              Minute incident_minute, const Series& business_series,
                              const DetectionConfig& config) {
  config.validate();
  AnomalyVerdict verdict{false, false, AnomalyType::Traffic, edge};
  const auto window = static_cast<std::size_t>(config.detection_window_minutes);
  const auto earliest = provider.earliest_minute();
  if (!window_available(earliest, incident_minute - static_cast<Minute>(kComparisonLength))) {
    verdict.skipped = true;
    return verdict;
  }
  const Series qps =
      provider.history(edge, MetricKind::QPS, incident_minute, kComparisonLength);
  if (business_series.size() != qps.size()) {
    throw std::invalid_argument("detect_traffic: business series must cover the metric window");
  }

  // Reference excludes the detection window so the probe cannot dilute it.
  const std::span<const double> all{qps.values};
  const auto outliers = three_sigma_outliers(all.first(kComparisonLength - window),
                                             all.last(window));
  if (outliers.empty()) {
    return verdict;
  }
  const double correlation = pearson(qps.values, business_series.values);
  verdict.anomalous = std::abs(correlation) >= config.traffic_correlation_threshold;
  return verdict;
}

}  // namespace chainrca
