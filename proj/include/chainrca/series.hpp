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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainrca {

/// Minutes since the data origin (simulation start or Unix epoch minutes).
using Minute = std::int64_t;

/// A gap-free, minute-aligned sequence of metric values.
struct Series {
  std::vector<double> values;
  Minute start_minute = 0;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }

  /// Minute one past the last covered minute.
  Minute end_minute() const { return start_minute + static_cast<Minute>(values.size()); }

  /// Sub-series covering [from, from + length); must lie within this series.
  Series slice(Minute from, std::size_t length) const {
    if (from < start_minute || from + static_cast<Minute>(length) > end_minute()) {
      throw std::invalid_argument("Series::slice: requested window not covered");
    }
    const auto offset = static_cast<std::size_t>(from - start_minute);
    return Series{{values.begin() + offset, values.begin() + offset + length}, from};
  }

  std::span<const double> span() const { return values; }
};

/// Per-edge quality metrics recorded by the call graph.
enum class MetricKind { RT, EC, QPS };

inline const char* to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::RT: return "RT";
    case MetricKind::EC: return "EC";
    case MetricKind::QPS: return "QPS";
  }
  return "?";
}

MetricKind metric_kind_from_string(const std::string& name);

/// Directed service call: caller invokes callee.
struct EdgeKey {
  std::string caller;
  std::string callee;

  auto operator<=>(const EdgeKey&) const = default;

  std::string label() const { return caller + "->" + callee; }
};

}  // namespace chainrca
