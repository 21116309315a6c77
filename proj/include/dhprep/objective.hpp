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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dhprep/alias_table.hpp"
#include "dhprep/errors.hpp"
#include "dhprep/intensity.hpp"
#include "dhprep/kernels.hpp"
#include "dhprep/model.hpp"
#include "dhprep/random.hpp"
#include "dhprep/temporal_graph.hpp"

namespace dhprep {

/// Hyperparameters of the joint objective and its SGD optimizer.
struct TrainingConfig {
  double beta0 = 1.0;         // weight of the Hawkes negative-sampling loss
  double beta1 = 0.01;        // weight of temporal smoothness
  int negatives = 5;          // K
  int history = 5;            // h, snapshots of look-back
  double lr = 0.01;
  int epochs = 100;
  int batch_size = 256;
  std::uint64_t seed = 1;
  KernelKind kernel = KernelKind::exponential;
  std::size_t dim = 128;
  double degree_exponent = 1.0;
  bool parallel = false;
  int threads = 1;

  void validate() const {
    if (negatives < 1) throw ValidationError("negatives must be >= 1");
    if (history < 1) throw ValidationError("history must be >= 1");
    if (!(lr > 0.0)) throw ValidationError("lr must be > 0");
    if (dim < 1) throw ValidationError("dim must be >= 1");
    if (epochs < 0) throw ValidationError("epochs must be >= 0");
    if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (!(beta0 >= 0.0) || !(beta1 >= 0.0)) throw ValidationError("beta0 and beta1 must be >= 0");
    if (threads < 1) throw ValidationError("threads must be >= 1");
  }
};

/// Numerically stable log(1 + exp(x)).
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

/// Standard logistic 1 / (1 + exp(-x)).
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Sum over undirected edges of w_ij ||u_i^t - u_j^t||^2, each edge once.
/// When grad is given, adds scale * d/du of the loss.
inline double loss_structural(const Snapshot& snap, const EmbeddingSequence& emb, int t, Model* grad = nullptr,
                              double scale = 1.0) {
  if (t < 1 || t > emb.snapshot_count()) throw ValidationError("no embeddings for snapshot " + std::to_string(t));
  double loss = 0.0;
  const std::size_t n = emb.dim();
  for (const auto& e : snap.edges()) {
    if (e.v >= emb.vertex_count()) throw ValidationError("edge endpoint has no embedding");
    const auto ui = emb.row(t, e.u);
    const auto uj = emb.row(t, e.v);
    loss += e.weight * squared_distance(ui, uj);
    if (grad) {
      auto gi = grad->emb.row(t, e.u);
      auto gj = grad->emb.row(t, e.v);
      const double c = 2.0 * scale * e.weight;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = c * (ui[k] - uj[k]);
        gi[k] += d;
        gj[k] -= d;
      }
    }
  }
  return loss;
}

/// Sum_i ||u_i^t - u_i^{t-1}||^2, and exactly 0 at t = 1.
inline double loss_smooth(const EmbeddingSequence& emb, int t, Model* grad = nullptr, double scale = 1.0) {
  if (t < 1 || t > emb.snapshot_count()) throw ValidationError("no embeddings for snapshot " + std::to_string(t));
  if (t == 1) return 0.0;
  const auto cur = emb.snapshot(t);
  const auto prev = emb.snapshot(t - 1);
  double loss = 0.0;
  for (std::size_t k = 0; k < cur.size(); ++k) {
    const double d = cur[k] - prev[k];
    loss += d * d;
  }
  if (grad) {
    auto gc = grad->emb.snapshot(t);
    auto gp = grad->emb.snapshot(t - 1);
    for (std::size_t k = 0; k < cur.size(); ++k) {
      const double d = 2.0 * scale * (cur[k] - prev[k]);
      gc[k] += d;
      gp[k] -= d;
    }
  }
  return loss;
}

/// Bound on rejection attempts for one negative draw.
inline constexpr int kMaxNegativeAttempts = 10000;

/// K degree-proportional draws (with replacement) rejecting i and every
/// current neighbor of i at snapshot t.
inline std::vector<VertexId> sample_negatives(const AliasTable& dist, VertexId i, int t, const DynamicNetwork& net,
                                              int count, Rng& rng) {
  const auto& snap = net.snapshot(t);
  std::vector<VertexId> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) {
    int attempts = 0;
    while (true) {
      if (++attempts > kMaxNegativeAttempts)
        throw SamplingExhausted("no valid negative for vertex " + std::to_string(i) + " at snapshot " +
                                std::to_string(t) + " after " + std::to_string(kMaxNegativeAttempts) + " attempts");
      const VertexId v = dist.sample(rng);
      if (v == i || snap.has_edge(i, v)) continue;
      out.push_back(v);
      break;
    }
  }
  return out;
}

/// True when the degree table puts positive mass on some valid negative of i.
inline bool has_valid_negative(const AliasTable& dist, VertexId i, const Snapshot& snap) {
  double excluded = dist.probability(i);
  for (const auto& nb : snap.neighbors(i)) excluded += dist.probability(nb.id);
  return 1.0 - excluded > 1e-12;
}

/// Per-snapshot negative-sampling tables; snapshots without edges have none.
class NegativeSampler {
 public:
  NegativeSampler() = default;
  NegativeSampler(const DynamicNetwork& net, double exponent) : tables_(static_cast<std::size_t>(net.snapshot_count())) {
    for (int t = 1; t <= net.snapshot_count(); ++t) {
      if (net.snapshot(t).edge_count() > 0) tables_[static_cast<std::size_t>(t - 1)] = negative_distribution(net, t, exponent);
    }
  }
  const AliasTable& table(int t) const { return tables_.at(static_cast<std::size_t>(t - 1)); }

 private:
  std::vector<AliasTable> tables_;
};

/// An observed edge (i, j, t) with its sampled negatives.
struct DhpEvent {
  VertexId i = 0;
  VertexId j = 0;
  int t = 0;
  std::vector<VertexId> negatives;
};

/// Every directed orientation (i, j, t), t >= 2, of every snapshot edge.
inline std::vector<DhpEvent> positive_events(const DynamicNetwork& net) {
  std::vector<DhpEvent> out;
  for (int t = 2; t <= net.snapshot_count(); ++t) {
    for (const auto& e : net.snapshot(t).edges()) {
      out.push_back({e.u, e.v, t, {}});
      out.push_back({e.v, e.u, t, {}});
    }
  }
  return out;
}

/// Fills each event's negatives. Anchors whose snapshot has no valid
/// negative keep an empty list instead of exhausting the sampler.
inline void attach_negatives(std::span<DhpEvent> events, const DynamicNetwork& net, const NegativeSampler& sampler,
                             int count, Rng& rng) {
  for (auto& ev : events) {
    ev.negatives.clear();
    if (count == 0) continue;
    const auto& table = sampler.table(ev.t);
    if (!has_valid_negative(table, ev.i, net.snapshot(ev.t))) continue;
    ev.negatives = sample_negatives(table, ev.i, ev.t, net, count, rng);
  }
}

/// Negative-sampling Hawkes loss over events with fixed negatives:
/// sum of -[log sigma(raw_ij) + sum_k log sigma(-raw_ik)].
/// Events sharing an (i, t) anchor share one attention evaluation.
inline double evaluate_dhp(std::span<const DhpEvent> events, const Model& model, const DynamicNetwork& net,
                           int window, Model* grad = nullptr, double scale = 1.0) {
  std::map<std::pair<int, VertexId>, std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (events[k].t < 2) throw ValidationError("Hawkes events need t >= 2");
    groups[{events[k].t, events[k].i}].push_back(k);
  }
  double loss = 0.0;
  std::vector<double> influence;
  for (const auto& [key, members] : groups) {
    AnchorState anchor(model, net, key.second, key.first, window);
    for (std::size_t k : members) {
      const auto& ev = events[k];
      const double pos = anchor.intensity(model, ev.j, influence).raw;
      loss += softplus(-pos);
      if (grad) anchor.backward_candidate(model, ev.j, -scale * sigmoid(-pos), influence, *grad);
      for (VertexId neg : ev.negatives) {
        const double r = anchor.intensity(model, neg, influence).raw;
        loss += softplus(r);
        if (grad) anchor.backward_candidate(model, neg, scale * sigmoid(r), influence, *grad);
      }
    }
    if (grad) anchor.finish_backward(model, *grad);
  }
  return loss;
}

/// Samples K negatives per positive, then evaluates the Hawkes loss.
inline double loss_dhp_ns(std::span<const DhpEvent> positives, const Model& model, const DynamicNetwork& net,
                          int window, int negatives, Rng& rng, double degree_exponent = 1.0) {
  std::vector<DhpEvent> events(positives.begin(), positives.end());
  for (const auto& ev : events) {
    if (ev.t < 2) throw ValidationError("Hawkes events need t >= 2");
    if (!net.snapshot(ev.t).has_edge(ev.i, ev.j)) throw ValidationError("positive pair is not an edge of its snapshot");
  }
  std::map<int, AliasTable> tables;
  for (auto& ev : events) {
    auto it = tables.find(ev.t);
    if (it == tables.end()) it = tables.emplace(ev.t, negative_distribution(net, ev.t, degree_exponent)).first;
    ev.negatives = sample_negatives(it->second, ev.i, ev.t, net, negatives, rng);
  }
  return evaluate_dhp(events, model, net, window);
}

/// The three sums of the joint objective and their weighted total.
struct LossBreakdown {
  double structural = 0.0;
  double dhp = 0.0;
  double smooth = 0.0;
  double total = 0.0;
};

/// Full objective sum_t [L_1st + beta0 L_DHP + beta1 L_smooth] with the
/// negatives already attached to `events`. Deterministic; adds the exact
/// gradient of the total into grad when given.
inline LossBreakdown objective_with_events(const DynamicNetwork& net, const Model& model, const TrainingConfig& cfg,
                                           std::span<const DhpEvent> events, Model* grad = nullptr) {
  LossBreakdown out;
  for (int t = 1; t <= net.snapshot_count(); ++t) {
    out.structural += loss_structural(net.snapshot(t), model.emb, t, grad, 1.0);
    out.smooth += loss_smooth(model.emb, t, grad, cfg.beta1);
  }
  out.dhp = evaluate_dhp(events, model, net, cfg.history, grad, cfg.beta0);
  out.total = out.structural + cfg.beta0 * out.dhp + cfg.beta1 * out.smooth;
  return out;
}

/// Samples negatives for every positive event and evaluates the objective.
inline LossBreakdown loss_mix(const DynamicNetwork& net, const Model& model, const TrainingConfig& cfg, Rng& rng) {
  auto events = positive_events(net);
  if (!events.empty()) {
    NegativeSampler sampler(net, cfg.degree_exponent);
    attach_negatives(events, net, sampler, cfg.negatives, rng);
  }
  return objective_with_events(net, model, cfg, events);
}

}  // namespace dhprep
