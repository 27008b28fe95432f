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

#include <cstddef>
#include <span>
#include <vector>

namespace chainrca {

double mean(std::span<const double> values);

/// Population variance (divides by n, not n-1).
double population_variance(std::span<const double> values);

double population_stddev(std::span<const double> values);

/// Pearson correlation coefficient of two equal-length vectors (n >= 2).
/// Returns 0 when either vector has zero variance; flat series carry no
/// trend information, so they correlate with nothing.
/// Throws std::invalid_argument on length mismatch or n < 2.
double pearson(std::span<const double> x, std::span<const double> y);

struct Outlier {
  std::size_t index;  // position within the probe
  double value;
};

/// Flags every probe value farther than three reference standard deviations
/// from the reference mean. Uses the population standard deviation. When the
/// reference is constant (sigma == 0) any probe value different from the mean
/// is an outlier. Reference must hold at least 2 values; an empty probe
/// yields an empty result.
std::vector<Outlier> three_sigma_outliers(std::span<const double> reference,
                                          std::span<const double> probe);

/// Simple moving average: out[i] = mean(values[i .. i+window-1]).
/// Output length is values.size() - window + 1. Requires 1 <= window <= size.
std::vector<double> moving_average(std::span<const double> values, std::size_t window);

}  // namespace chainrca
