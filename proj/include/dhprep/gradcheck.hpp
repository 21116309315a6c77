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
#include <functional>
#include <vector>

#include "dhprep/model.hpp"
#include "dhprep/objective.hpp"
#include "dhprep/random.hpp"
#include "dhprep/temporal_graph.hpp"

namespace dhprep {

struct GradientCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Below this magnitude the error is measured relative to the floor, not
  /// to the gradient itself.
  double magnitude_floor = 1e-3;
  std::size_t coordinates = 120;
  std::uint64_t seed = 7;
  /// Test hook applied to the analytic gradient before comparison.
  std::function<void(Model&)> corrupt_analytic;
};

struct CoordinateCheck {
  ParamBlock block = ParamBlock::embedding;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct GradientCheckReport {
  std::vector<CoordinateCheck> checks;
  double max_relative_error = 0.0;
  std::size_t failures = 0;
  bool passed() const { return failures == 0; }
};

inline double relative_error(double analytic, double numeric, double floor) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Compares the analytic gradient of the joint objective against central
/// differences on a random subset of coordinates from every parameter block.
/// Negatives are drawn once so both sides see the same objective.
inline GradientCheckReport gradient_check(const DynamicNetwork& net, const Model& model, const TrainingConfig& cfg,
                                          const GradientCheckOptions& opt = {}) {
  Rng rng = derive_rng(opt.seed, 11);
  auto events = positive_events(net);
  if (!events.empty()) attach_negatives(events, net, NegativeSampler(net, cfg.degree_exponent), cfg.negatives, rng);

  Model analytic = Model::zeros_like(model);
  objective_with_events(net, model, cfg, events, &analytic);
  if (opt.corrupt_analytic) opt.corrupt_analytic(analytic);

  // Quotas: a sixth of the budget each for W, z, theta; the rest embeddings.
  const ParamBlock blocks[] = {ParamBlock::W, ParamBlock::z, ParamBlock::theta, ParamBlock::embedding};
  std::vector<std::pair<ParamBlock, std::size_t>> picks;
  std::size_t remaining = opt.coordinates;
  for (auto b : blocks) {
    const std::size_t size = block_values(model, b).size();
    const std::size_t want = b == ParamBlock::embedding ? remaining : std::max<std::size_t>(1, opt.coordinates / 6);
    std::vector<std::size_t> idx(size);
    for (std::size_t k = 0; k < size; ++k) idx[k] = k;
    shuffle(idx, rng);
    const std::size_t take = std::min(want, size);
    for (std::size_t k = 0; k < take; ++k) picks.emplace_back(b, idx[k]);
    remaining -= std::min(remaining, take);
  }

  GradientCheckReport report;
  Model probe = model;
  for (const auto& [block, index] : picks) {
    double& x = block_values(probe, block)[index];
    const double saved = x;
    x = saved + opt.step;
    const double up = objective_with_events(net, probe, cfg, events).total;
    x = saved - opt.step;
    const double down = objective_with_events(net, probe, cfg, events).total;
    x = saved;
    CoordinateCheck c;
    c.block = block;
    c.index = index;
    c.analytic = block_values(analytic, block)[index];
    c.numeric = (up - down) / (2.0 * opt.step);
    c.relative_error = relative_error(c.analytic, c.numeric, opt.magnitude_floor);
    report.max_relative_error = std::max(report.max_relative_error, c.relative_error);
    if (!(c.relative_error <= opt.tolerance)) ++report.failures;
    report.checks.push_back(c);
  }
  return report;
}

/// Small random network plus a model with O(1) entries, so that every term
/// and the attention path carry non-trivial gradients.
struct GradientCheckInstance {
  DynamicNetwork net;
  Model model;
};

inline GradientCheckInstance make_gradient_check_instance(std::size_t vertices, int snapshots, std::size_t dim,
                                                          KernelKind kernel, std::uint64_t seed,
                                                          double edge_probability = 0.35) {
  Rng rng = derive_rng(seed, 5);
  std::vector<std::vector<WeightedEdge>> sets(static_cast<std::size_t>(snapshots));
  for (auto& set : sets) {
    for (VertexId u = 0; u < vertices; ++u) {
      for (VertexId v = u + 1; v < vertices; ++v) {
        if (uniform01(rng) < edge_probability) set.push_back({u, v, 1.0 + std::floor(3.0 * uniform01(rng))});
      }
    }
    if (set.empty() && vertices >= 2) set.push_back({0, 1, 1.0});
  }
  GradientCheckInstance inst{DynamicNetwork(vertices, std::move(sets)), {}};
  inst.model.emb = EmbeddingSequence(dim, vertices, snapshots);
  inst.model.params = HawkesParams(dim, vertices, kernel);
  for (double& x : inst.model.emb.data()) x = uniform_real(rng, -0.6, 0.6);
  for (double& x : inst.model.params.W) x = uniform_real(rng, -1.0, 1.0);
  for (double& x : inst.model.params.z) x = uniform_real(rng, -0.3, 1.0);
  for (double& x : inst.model.params.theta) x = uniform_real(rng, -0.5, 0.5);
  return inst;
}

}  // namespace dhprep
