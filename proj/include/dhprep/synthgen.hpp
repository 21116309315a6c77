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

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dhprep/errors.hpp"
#include "dhprep/random.hpp"
#include "dhprep/temporal_graph.hpp"

namespace dhprep {

enum class DecayMode { none, exponential };

/// Planted-partition dynamic network. Block b owns a contiguous id range.
struct PlantedSpec {
  std::size_t vertex_count = 100;
  std::vector<std::size_t> block_sizes = {50, 50};
  int snapshots = 6;
  double p_in = 0.1;
  double p_out = 0.01;
  /// Probabilities for snapshot 1 only; default to p_in / p_out.
  std::optional<double> p_in_initial;
  std::optional<double> p_out_initial;
  double persistence = 0.5;
  DecayMode decay = DecayMode::none;
  double rho = 1.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (vertex_count < 2) throw ValidationError("vertices: need at least 2");
    if (block_sizes.empty()) throw ValidationError("blocks: need at least one block");
    for (auto b : block_sizes) {
      if (b == 0) throw ValidationError("blocks: block sizes must be positive");
    }
    if (std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0}) != vertex_count)
      throw ValidationError("blocks: sizes must sum to vertices");
    if (snapshots < 1) throw ValidationError("snapshots: need at least one");
    auto check_pair = [](double in, double out, const char* name) {
      if (!(out >= 0.0 && out <= in && in <= 1.0))
        throw ValidationError(std::string(name) + ": need 0 <= p_out <= p_in <= 1");
    };
    check_pair(p_in, p_out, "p_in/p_out");
    check_pair(p_in_initial.value_or(p_in), p_out_initial.value_or(p_out), "p_in_initial/p_out_initial");
    if (!(persistence >= 0.0 && persistence <= 1.0)) throw ValidationError("persistence: must lie in [0, 1]");
    if (!(rho > 0.0)) throw ValidationError("rho: must be > 0");
  }
};

struct PlantedNetwork {
  DynamicNetwork net;
  std::vector<int> blocks;  // block label per vertex
};

/// Snapshot 1 is blockwise Bernoulli. Later snapshots keep each edge of the
/// previous one with probability `persistence` and add fresh pairs with
/// probability 1 - (1 - p) exp(-x), where p is the block probability and x
/// sums exp(-rho (t - s)) over the pair's past snapshots s (exponential
/// mode) or is 0 (none). All weights are 1.
inline PlantedNetwork generate(const PlantedSpec& spec) {
  spec.validate();
  const std::size_t n = spec.vertex_count;
  PlantedNetwork out;
  out.blocks.resize(n);
  {
    std::size_t v = 0;
    for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) {
      for (std::size_t k = 0; k < spec.block_sizes[b]; ++k) out.blocks[v++] = static_cast<int>(b);
    }
  }
  Rng rng = derive_rng(spec.seed, 0x5eed);
  const std::size_t pairs = n * (n - 1) / 2;
  auto pair_index = [n](std::size_t u, std::size_t v) { return u * n - u * (u + 1) / 2 + (v - u - 1); };

  std::vector<char> present(pairs, 0), next(pairs, 0);
  std::vector<double> excitation(pairs, 0.0);  // decayed co-occurrence mass seen from the next snapshot
  const double step_decay = std::exp(-spec.rho);
  std::vector<std::vector<WeightedEdge>> sets(static_cast<std::size_t>(spec.snapshots));

  for (int t = 1; t <= spec.snapshots; ++t) {
    const double pin = t == 1 ? spec.p_in_initial.value_or(spec.p_in) : spec.p_in;
    const double pout = t == 1 ? spec.p_out_initial.value_or(spec.p_out) : spec.p_out;
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        const std::size_t k = pair_index(u, v);
        const double base = out.blocks[u] == out.blocks[v] ? pin : pout;
        bool on = false;
        if (t > 1 && present[k] && uniform01(rng) < spec.persistence) on = true;
        const double fresh = t == 1 ? base : 1.0 - (1.0 - base) * std::exp(-excitation[k]);
        if (uniform01(rng) < fresh) on = true;
        next[k] = on;
        if (on) sets[static_cast<std::size_t>(t - 1)].push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), 1.0});
      }
    }
    present.swap(next);
    if (spec.decay == DecayMode::exponential) {
      for (std::size_t k = 0; k < pairs; ++k) excitation[k] = step_decay * (excitation[k] + (present[k] ? 1.0 : 0.0));
    }
  }
  // Snapshot t covers timestamp t, matching write_generated_edges at interval 1.
  out.net = DynamicNetwork(n, std::move(sets), 1, 1);
  return out;
}

/// Edge list in the ingestible format with timestamp = t * interval.
inline void write_generated_edges(const DynamicNetwork& net, std::int64_t interval, std::ostream& out) {
  for (int t = 1; t <= net.snapshot_count(); ++t) {
    for (const auto& e : net.snapshot(t).edges()) {
      out << e.u << '\t' << e.v << '\t' << static_cast<std::int64_t>(t) * interval << '\t'
          << text::format_double(e.weight) << '\n';
    }
  }
}

inline void write_labels(std::span<const int> blocks, std::ostream& out) {
  for (std::size_t v = 0; v < blocks.size(); ++v) out << v << '\t' << blocks[v] << '\n';
}

/// Jaccard similarity of the edge sets of snapshots a and b.
inline double edge_jaccard(const DynamicNetwork& net, int a, int b) {
  const auto ea = net.snapshot(a).edges();
  const auto eb = net.snapshot(b).edges();
  std::size_t inter = 0, ia = 0, ib = 0;
  while (ia < ea.size() && ib < eb.size()) {
    const auto ka = std::pair(ea[ia].u, ea[ia].v), kb = std::pair(eb[ib].u, eb[ib].v);
    if (ka == kb) {
      ++inter;
      ++ia;
      ++ib;
    } else if (ka < kb) {
      ++ia;
    } else {
      ++ib;
    }
  }
  const std::size_t uni = ea.size() + eb.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace dhprep
