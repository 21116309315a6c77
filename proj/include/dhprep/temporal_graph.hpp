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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dhprep/alias_table.hpp"
#include "dhprep/errors.hpp"
#include "dhprep/text.hpp"

namespace dhprep {

/// Dense vertex index in [0, N).
using VertexId = std::uint32_t;

/// One raw interaction as read from an edge stream. Ids are external.
struct TemporalEdge {
  std::uint64_t src = 0;
  std::uint64_t dst = 0;
  std::int64_t timestamp = 0;
  double weight = 1.0;

  friend bool operator==(const TemporalEdge&, const TemporalEdge&) = default;
};

/// Undirected snapshot edge, stored with u < v.
struct WeightedEdge {
  VertexId u = 0;
  VertexId v = 0;
  double weight = 1.0;

  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

struct Neighbor {
  VertexId id = 0;
  double weight = 1.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Weighted undirected graph of one time bucket.
class Snapshot {
 public:
  Snapshot() = default;

  /// Builds from possibly unordered, possibly repeated pairs; repeats sum.
  Snapshot(int index, std::size_t vertex_count, std::vector<WeightedEdge> raw) : index_(index) {
    for (auto& e : raw) {
      if (e.u == e.v) throw ValidationError("self-loop in snapshot " + std::to_string(index));
      if (e.u >= vertex_count || e.v >= vertex_count)
        throw ValidationError("vertex id outside universe in snapshot " + std::to_string(index));
      if (!(e.weight > 0.0) || !std::isfinite(e.weight))
        throw ValidationError("edge weight must be positive in snapshot " + std::to_string(index));
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(raw.begin(), raw.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
      return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    for (const auto& e : raw) {
      if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) {
        edges_.back().weight += e.weight;
      } else {
        edges_.push_back(e);
      }
    }
    adjacency_.assign(vertex_count, {});
    for (const auto& e : edges_) {
      adjacency_[e.u].push_back({e.v, e.weight});
      adjacency_[e.v].push_back({e.u, e.weight});
    }
    for (auto& list : adjacency_) {
      std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
    }
  }

  int index() const { return index_; }
  std::span<const WeightedEdge> edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const Neighbor> neighbors(VertexId v) const { return adjacency_[v]; }
  std::size_t degree(VertexId v) const { return adjacency_[v].size(); }

  bool has_edge(VertexId a, VertexId b) const {
    const auto& list = adjacency_[a];
    auto it = std::lower_bound(list.begin(), list.end(), b,
                               [](const Neighbor& n, VertexId id) { return n.id < id; });
    return it != list.end() && it->id == b;
  }

  double total_weight() const {
    double total = 0.0;
    for (const auto& e : edges_) total += e.weight;
    return total;
  }

  friend bool operator==(const Snapshot& a, const Snapshot& b) {
    return a.index_ == b.index_ && a.edges_ == b.edges_;
  }

 private:
  int index_ = 0;
  std::vector<WeightedEdge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Ordered snapshots G_1..G_T over a shared vertex universe [0, N).
/// Immutable once built; safe for concurrent readers.
class DynamicNetwork {
 public:
  DynamicNetwork() = default;

  /// edge_sets[t-1] holds the raw pairs of snapshot t. external_ids may be
  /// empty, meaning dense ids are also the external ids.
  DynamicNetwork(std::size_t vertex_count, std::vector<std::vector<WeightedEdge>> edge_sets,
                 std::int64_t interval = 1, std::int64_t origin = 0,
                 std::vector<std::uint64_t> external_ids = {})
      : vertex_count_(vertex_count), interval_(interval), origin_(origin), external_ids_(std::move(external_ids)) {
    if (interval_ <= 0) throw ValidationError("interval must be positive");
    if (external_ids_.empty()) {
      external_ids_.resize(vertex_count_);
      for (std::size_t i = 0; i < vertex_count_; ++i) external_ids_[i] = i;
    }
    if (external_ids_.size() != vertex_count_) throw ValidationError("external id table size differs from N");
    snapshots_.reserve(edge_sets.size());
    for (std::size_t t = 0; t < edge_sets.size(); ++t) {
      snapshots_.emplace_back(static_cast<int>(t + 1), vertex_count_, std::move(edge_sets[t]));
    }
  }

  std::size_t vertex_count() const { return vertex_count_; }
  int snapshot_count() const { return static_cast<int>(snapshots_.size()); }
  std::int64_t interval() const { return interval_; }
  /// Timestamp at which snapshot 1 starts.
  std::int64_t origin() const { return origin_; }
  std::span<const std::uint64_t> external_ids() const { return external_ids_; }

  /// 1-based access.
  const Snapshot& snapshot(int t) const {
    if (t < 1 || t > snapshot_count()) throw ValidationError("snapshot index " + std::to_string(t) + " out of range");
    return snapshots_[static_cast<std::size_t>(t - 1)];
  }

  /// Dense id of an external id, or throws.
  VertexId dense_id(std::uint64_t external) const {
    auto it = std::lower_bound(external_ids_.begin(), external_ids_.end(), external);
    if (it == external_ids_.end() || *it != external)
      throw ValidationError("unknown vertex id " + std::to_string(external));
    return static_cast<VertexId>(it - external_ids_.begin());
  }

  void check_vertex(VertexId v) const {
    if (v >= vertex_count_) throw ValidationError("vertex id " + std::to_string(v) + " outside universe");
  }

  friend bool operator==(const DynamicNetwork& a, const DynamicNetwork& b) {
    return a.vertex_count_ == b.vertex_count_ && a.interval_ == b.interval_ && a.origin_ == b.origin_ &&
           a.external_ids_ == b.external_ids_ && a.snapshots_ == b.snapshots_;
  }

 private:
  std::size_t vertex_count_ = 0;
  std::int64_t interval_ = 1;
  std::int64_t origin_ = 0;
  std::vector<std::uint64_t> external_ids_;
  std::vector<Snapshot> snapshots_;
};

/// Parses `src TAB dst TAB timestamp [TAB weight]` lines. Blank lines and
/// lines starting with '#' are skipped.
inline std::vector<TemporalEdge> ingest_edges(std::istream& in) {
  std::vector<TemporalEdge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = text::split(body, '\t');
    if (fields.size() != 3 && fields.size() != 4)
      throw ParseError(line_no, "expected 3 or 4 tab-separated fields, got " + std::to_string(fields.size()));
    TemporalEdge e;
    if (!text::parse_number(fields[0], e.src)) throw ParseError(line_no, "bad source id");
    if (!text::parse_number(fields[1], e.dst)) throw ParseError(line_no, "bad destination id");
    if (!text::parse_number(fields[2], e.timestamp) || e.timestamp < 0) throw ParseError(line_no, "bad timestamp");
    if (fields.size() == 4) {
      if (!text::parse_number(fields[3], e.weight) || !std::isfinite(e.weight))
        throw ParseError(line_no, "bad weight");
      if (!(e.weight > 0.0)) throw ParseError(line_no, "weight must be positive");
    }
    if (e.src == e.dst) throw ParseError(line_no, "self-loop on vertex " + std::to_string(e.src));
    edges.push_back(e);
  }
  return edges;
}

inline std::vector<TemporalEdge> ingest_edges_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open edge list '" + path + "'");
  return ingest_edges(in);
}

/// Buckets edges into half-open intervals [origin + (t-1)*interval,
/// origin + t*interval) with origin = min timestamp. External ids are
/// compacted to [0, N) in ascending order.
inline DynamicNetwork bucket_snapshots(std::span<const TemporalEdge> edges, std::int64_t interval) {
  if (interval <= 0) throw ValidationError("interval must be positive");
  if (edges.empty()) throw ValidationError("cannot bucket an empty edge list");

  std::vector<std::uint64_t> ids;
  ids.reserve(edges.size() * 2);
  std::int64_t t_min = std::numeric_limits<std::int64_t>::max();
  std::int64_t t_max = std::numeric_limits<std::int64_t>::min();
  for (const auto& e : edges) {
    if (e.src == e.dst) throw ValidationError("self-loop on vertex " + std::to_string(e.src));
    if (!(e.weight > 0.0)) throw ValidationError("edge weight must be positive");
    ids.push_back(e.src);
    ids.push_back(e.dst);
    t_min = std::min(t_min, e.timestamp);
    t_max = std::max(t_max, e.timestamp);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto dense = [&ids](std::uint64_t x) {
    return static_cast<VertexId>(std::lower_bound(ids.begin(), ids.end(), x) - ids.begin());
  };

  const auto bucket_count = static_cast<std::size_t>((t_max - t_min) / interval + 1);
  std::vector<std::vector<WeightedEdge>> sets(bucket_count);
  for (const auto& e : edges) {
    const auto b = static_cast<std::size_t>((e.timestamp - t_min) / interval);
    sets[b].push_back({dense(e.src), dense(e.dst), e.weight});
  }
  // Weight sums depend on addition order; sort so input order cannot matter.
  for (auto& set : sets) {
    for (auto& e : set) {
      if (e.u > e.v) std::swap(e.u, e.v);
    }
    std::sort(set.begin(), set.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
      if (a.u != b.u) return a.u < b.u;
      if (a.v != b.v) return a.v < b.v;
      return a.weight < b.weight;
    });
  }
  const std::size_t n = ids.size();
  return DynamicNetwork(n, std::move(sets), interval, t_min, std::move(ids));
}

/// Historical neighbor of a vertex within the look-back window.
struct HistoryEntry {
  VertexId neighbor = 0;
  int time = 0;  // snapshot ordinal t_h
  double weight = 0.0;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// Neighbors of i in snapshots max(1, t-h) .. t-1, ordered by time then id.
inline std::vector<HistoryEntry> history_neighbors(const DynamicNetwork& net, VertexId i, int t, int h) {
  net.check_vertex(i);
  if (t < 1 || t > net.snapshot_count()) throw ValidationError("snapshot index out of range");
  if (h < 1) throw ValidationError("history window must be >= 1");
  std::vector<HistoryEntry> out;
  for (int th = std::max(1, t - h); th <= t - 1; ++th) {
    for (const auto& nb : net.snapshot(th).neighbors(i)) out.push_back({nb.id, th, nb.weight});
  }
  return out;
}

/// Degree-proportional sampling table for snapshot t: P(v) ~ deg_t(v)^exponent,
/// deg counting distinct neighbors. Zero-degree vertices get probability 0.
inline AliasTable negative_distribution(const DynamicNetwork& net, int t, double exponent = 1.0) {
  const auto& snap = net.snapshot(t);
  if (snap.edge_count() == 0) throw ValidationError("snapshot " + std::to_string(t) + " has no edges");
  std::vector<double> weights(net.vertex_count(), 0.0);
  for (VertexId v = 0; v < net.vertex_count(); ++v) {
    const auto d = snap.degree(v);
    if (d > 0) weights[v] = std::pow(static_cast<double>(d), exponent);
  }
  return AliasTable(weights);
}

/// Edge-list serialization with bucket-start timestamps and external ids.
inline void write_edge_list(const DynamicNetwork& net, std::ostream& out) {
  const auto ids = net.external_ids();
  for (int t = 1; t <= net.snapshot_count(); ++t) {
    const auto stamp = net.origin() + static_cast<std::int64_t>(t - 1) * net.interval();
    for (const auto& e : net.snapshot(t).edges()) {
      out << ids[e.u] << '\t' << ids[e.v] << '\t' << stamp << '\t' << text::format_double(e.weight) << '\n';
    }
  }
}

/// Tab-separated summary: N, T, interval, then one row per snapshot.
inline void write_summary(const DynamicNetwork& net, std::ostream& out) {
  out << "vertices\t" << net.vertex_count() << '\n';
  out << "snapshots\t" << net.snapshot_count() << '\n';
  out << "interval\t" << net.interval() << '\n';
  out << "snapshot\tedges\ttotal_weight\n";
  for (int t = 1; t <= net.snapshot_count(); ++t) {
    const auto& s = net.snapshot(t);
    out << t << '\t' << s.edge_count() << '\t' << text::format_double(s.total_weight()) << '\n';
  }
}

}  // namespace dhprep
