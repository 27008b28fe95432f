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

#include <vector>

#include "chainrca/call_graph.hpp"
#include "chainrca/propagation.hpp"

namespace chainrca {

struct RankedCandidate {
  CandidateRootCause candidate;
  double score = 0.0;  // |Pearson| of the terminal edge metric vs. the business metric
  int rank = 0;        // 1-based, non-increasing score
};

/// Orders candidates by the absolute Pearson correlation between the initial
/// service's business metric and each candidate's terminal-edge quality
/// metric, both over the metric window. Ties break ascending by service id,
/// then anomaly type name.
std::vector<RankedCandidate> rank_candidates(const std::vector<CandidateRootCause>& candidates,
                                             const CallGraph& graph,
                                             const Series& business_series);

}  // namespace chainrca
