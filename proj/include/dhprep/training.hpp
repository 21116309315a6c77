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
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "dhprep/errors.hpp"
#include "dhprep/model.hpp"
#include "dhprep/objective.hpp"
#include "dhprep/random.hpp"
#include "dhprep/temporal_graph.hpp"
#include "dhprep/text.hpp"

namespace dhprep {

/// Per-epoch sums accumulated over the epoch's batches.
struct EpochLoss {
  int epoch = 0;
  double structural = 0.0;
  double dhp = 0.0;
  double smooth = 0.0;
  double total = 0.0;

  friend bool operator==(const EpochLoss&, const EpochLoss&) = default;
};

struct TrainingState {
  Model model;
  int epoch = 0;
  std::vector<EpochLoss> trace;
};

inline void write_loss_trace(const std::vector<EpochLoss>& trace, std::ostream& out) {
  out << "epoch\tL_1st\tL_DHP\tL_smooth\ttotal\n";
  for (const auto& e : trace) {
    out << e.epoch << '\t' << text::format_double(e.structural) << '\t' << text::format_double(e.dhp) << '\t'
        << text::format_double(e.smooth) << '\t' << text::format_double(e.total) << '\n';
  }
}

namespace detail {

/// Positive events of one (i, t) anchor. Batches are built from whole
/// anchors so that the attention over i's history is computed once.
struct AnchorGroup {
  int t = 0;
  VertexId i = 0;
  std::vector<std::size_t> events;
};

inline std::vector<AnchorGroup> group_by_anchor(const std::vector<DhpEvent>& events) {
  std::map<std::pair<int, VertexId>, std::vector<std::size_t>> by_key;
  for (std::size_t k = 0; k < events.size(); ++k) by_key[{events[k].t, events[k].i}].push_back(k);
  std::vector<AnchorGroup> out;
  out.reserve(by_key.size());
  for (auto& [key, members] : by_key) out.push_back({key.first, key.second, std::move(members)});
  return out;
}

inline void check_finite(double value, const char* term, int epoch, std::size_t batch) {
  if (!std::isfinite(value))
    throw DivergenceError("non-finite " + std::string(term) + " loss at epoch " + std::to_string(epoch) + ", batch " +
                          std::to_string(batch));
}

inline double dhp_parallel(std::span<const DhpEvent> events, const Model& model, const DynamicNetwork& net,
                           const TrainingConfig& cfg, Model& grad, std::vector<Model>& scratch) {
  const auto workers = static_cast<std::size_t>(cfg.threads);
  // Contiguous slices keep each anchor's events on one worker.
  std::vector<std::size_t> cuts{0};
  for (std::size_t w = 1; w < workers; ++w) {
    std::size_t c = events.size() * w / workers;
    while (c > cuts.back() && c < events.size() && events[c].i == events[c - 1].i && events[c].t == events[c - 1].t) ++c;
    cuts.push_back(std::max(c, cuts.back()));
  }
  cuts.push_back(events.size());
  std::vector<double> partial(workers, 0.0);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        auto& g = scratch[w];
        for (auto b : {ParamBlock::embedding, ParamBlock::W, ParamBlock::z, ParamBlock::theta}) {
          auto v = block_values(g, b);
          std::fill(v.begin(), v.end(), 0.0);
        }
        partial[w] = evaluate_dhp(events.subspan(cuts[w], cuts[w + 1] - cuts[w]), model, net, cfg.history, &g, cfg.beta0);
      });
    }
  }
  double loss = 0.0;
  for (std::size_t w = 0; w < workers; ++w) {
    loss += partial[w];
    for (auto b : {ParamBlock::embedding, ParamBlock::W, ParamBlock::z, ParamBlock::theta}) {
      auto dst = block_values(grad, b);
      auto src = block_values(scratch[w], b);
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
  }
  return loss;
}

}  // namespace detail

/// Mini-batch SGD on the joint objective. Each epoch visits every positive
/// (i, j, t), t >= 2, once. Structural and smoothness terms of a snapshot
/// enter a batch in proportion to the share of that snapshot's events in the
/// batch (or 1/batches for snapshots without events), so one epoch applies
/// every term exactly once.
inline TrainingState train(const DynamicNetwork& net, const TrainingConfig& cfg) {
  cfg.validate();
  const int T = net.snapshot_count();
  if (T < 1) throw ValidationError("training needs at least one snapshot");

  TrainingState state;
  {
    Rng init_rng = derive_rng(cfg.seed, 0);
    state.model = initialize_model(net.vertex_count(), T, cfg.dim, cfg.kernel, init_rng);
  }
  if (cfg.epochs == 0) return state;

  Model& model = state.model;
  Model grad = Model::zeros_like(model);
  std::vector<Model> scratch;
  if (cfg.parallel && cfg.threads > 1) scratch.assign(static_cast<std::size_t>(cfg.threads), grad);

  const auto all_events = positive_events(net);
  auto anchors = detail::group_by_anchor(all_events);
  std::vector<double> events_per_snapshot(static_cast<std::size_t>(T) + 1, 0.0);
  for (const auto& ev : all_events) events_per_snapshot[static_cast<std::size_t>(ev.t)] += 1.0;
  NegativeSampler sampler;
  if (!all_events.empty()) sampler = NegativeSampler(net, cfg.degree_exponent);

  Rng rng = derive_rng(cfg.seed, 1);
  std::vector<DhpEvent> batch;
  std::vector<double> snapshot_weight(static_cast<std::size_t>(T) + 1);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle(anchors, rng);
    std::vector<std::pair<std::size_t, std::size_t>> ranges;  // [first, last) anchors
    for (std::size_t a = 0; a < anchors.size();) {
      std::size_t count = 0, b = a;
      while (b < anchors.size() && count < static_cast<std::size_t>(cfg.batch_size)) count += anchors[b++].events.size();
      ranges.emplace_back(a, b);
      a = b;
    }
    if (ranges.empty()) ranges.emplace_back(0, 0);
    const auto batches = static_cast<double>(ranges.size());

    EpochLoss loss;
    loss.epoch = epoch;
    for (std::size_t bi = 0; bi < ranges.size(); ++bi) {
      batch.clear();
      std::fill(snapshot_weight.begin(), snapshot_weight.end(), 0.0);
      for (std::size_t a = ranges[bi].first; a < ranges[bi].second; ++a) {
        for (std::size_t k : anchors[a].events) {
          batch.push_back(all_events[k]);
          snapshot_weight[static_cast<std::size_t>(all_events[k].t)] += 1.0;
        }
      }
      attach_negatives(batch, net, sampler, cfg.negatives, rng);

      for (auto b : {ParamBlock::embedding, ParamBlock::W, ParamBlock::z, ParamBlock::theta}) {
        auto v = block_values(grad, b);
        std::fill(v.begin(), v.end(), 0.0);
      }
      const double dhp = scratch.empty() ? evaluate_dhp(batch, model, net, cfg.history, &grad, cfg.beta0)
                                         : detail::dhp_parallel(batch, model, net, cfg, grad, scratch);
      double structural = 0.0, smooth = 0.0;
      for (int t = 1; t <= T; ++t) {
        auto& w = snapshot_weight[static_cast<std::size_t>(t)];
        const double n_t = events_per_snapshot[static_cast<std::size_t>(t)];
        w = n_t > 0.0 ? w / n_t : 1.0 / batches;
        if (w == 0.0) continue;
        structural += w * loss_structural(net.snapshot(t), model.emb, t, &grad, w);
        smooth += w * loss_smooth(model.emb, t, &grad, cfg.beta1 * w);
      }
      detail::check_finite(structural, "structural", epoch, bi + 1);
      detail::check_finite(dhp, "DHP", epoch, bi + 1);
      detail::check_finite(smooth, "smoothness", epoch, bi + 1);
      loss.structural += structural;
      loss.dhp += dhp;
      loss.smooth += smooth;

      for (auto b : {ParamBlock::embedding, ParamBlock::W, ParamBlock::z, ParamBlock::theta}) {
        auto v = block_values(model, b);
        auto g = block_values(grad, b);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= cfg.lr * g[k];
      }
      for (double th : model.params.theta)
        if (!std::isfinite(th) || !(std::exp(th) > 0.0) || !std::isfinite(std::exp(th)))
          throw DivergenceError("decay rate left the representable range at epoch " + std::to_string(epoch) +
                                ", batch " + std::to_string(bi + 1));
    }
    loss.total = loss.structural + cfg.beta0 * loss.dhp + cfg.beta1 * loss.smooth;
    detail::check_finite(loss.total, "total", epoch, ranges.size());
    state.trace.push_back(loss);
    state.epoch = epoch;
  }
  return state;
}

}  // namespace dhprep
