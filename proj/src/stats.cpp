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

#include "chainrca/stats.hpp"

#include <cmath>
#include <stdexcept>

#include "chainrca/series.hpp"

namespace chainrca {

double mean(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("mean: empty input");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) {
  const double m = mean(values);
  double acc = 0.0;
  for (double v : values) {
    const double d = v - m;
    acc += d * d;
  }
  return acc / static_cast<double>(values.size());
}

double population_stddev(std::span<const double> values) {
  return std::sqrt(population_variance(values));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("pearson: length mismatch");
  }
  if (x.size() < 2) {
    throw std::invalid_argument("pearson: need at least 2 values");
  }
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    return 0.0;
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<Outlier> three_sigma_outliers(std::span<const double> reference,
                                          std::span<const double> probe) {
  if (reference.size() < 2) {
    throw std::invalid_argument("three_sigma_outliers: reference needs at least 2 values");
  }
  const double mu = mean(reference);
  const double sigma = population_stddev(reference);
  const double bound = 3.0 * sigma;
  std::vector<Outlier> out;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    if (std::abs(probe[i] - mu) > bound) {
      out.push_back({i, probe[i]});
    }
  }
  return out;
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  if (window == 0 || window > values.size()) {
    throw std::invalid_argument("moving_average: window must be in [1, size]");
  }
  std::vector<double> out;
  out.reserve(values.size() - window + 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < window; ++i) sum += values[i];
  out.push_back(sum / static_cast<double>(window));
  for (std::size_t i = window; i < values.size(); ++i) {
    sum += values[i] - values[i - window];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

MetricKind metric_kind_from_string(const std::string& name) {
  if (name == "RT") return MetricKind::RT;
  if (name == "EC") return MetricKind::EC;
  if (name == "QPS") return MetricKind::QPS;
  throw std::invalid_argument("unknown metric kind: " + name);
}

}  // namespace chainrca
