// Copyright 2026 The dhprep Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "dhprep/temporal_graph.hpp"

namespace dhprep::testing {

/// Network whose snapshot t holds the pairs of snapshots[t-1], weight 1.
inline DynamicNetwork make_network(std::size_t n,
                                   std::initializer_list<std::initializer_list<std::pair<VertexId, VertexId>>> snapshots) {
  std::vector<std::vector<WeightedEdge>> sets;
  for (const auto& s : snapshots) {
    auto& set = sets.emplace_back();
    for (const auto& [u, v] : s) set.push_back({u, v, 1.0});
  }
  return DynamicNetwork(n, std::move(sets));
}

inline std::vector<TemporalEdge> parse(const std::string& text) {
  std::istringstream in(text);
  return ingest_edges(in);
}

}  // namespace dhprep::testing
