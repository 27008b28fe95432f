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

#include "chainrca/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "chainrca/stats.hpp"

namespace chainrca {

std::vector<RankedCandidate> rank_candidates(const std::vector<CandidateRootCause>& candidates,
                                             const CallGraph& graph,
                                             const Series& business_series) {
  std::vector<RankedCandidate> ranked;
  ranked.reserve(candidates.size());
  for (const CandidateRootCause& candidate : candidates) {
    const Series& metric =
        graph.edge_series(candidate.terminal_edge, metric_for(candidate.anomaly_type));
    const double score = std::abs(pearson(business_series.values, metric.values));
    ranked.push_back({candidate, score, 0});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    const int by_service = a.candidate.service.compare(b.candidate.service);
    if (by_service != 0) return by_service < 0;
    return std::strcmp(to_string(a.candidate.anomaly_type), to_string(b.candidate.anomaly_type)) <
           0;
  });
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    ranked[i].rank = static_cast<int>(i) + 1;
  }
  return ranked;
}

}  // namespace chainrca
