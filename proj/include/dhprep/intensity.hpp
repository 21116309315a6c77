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
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "dhprep/errors.hpp"
#include "dhprep/kernels.hpp"
#include "dhprep/model.hpp"
#include "dhprep/temporal_graph.hpp"

namespace dhprep {

/// Components of the conditional intensity of one candidate edge.
struct IntensityBreakdown {
  double base = 0.0;
  double excitation = 0.0;
  double raw = 0.0;          // base + excitation
  double transferred = 0.0;  // exp(raw), strictly positive
};

/// -||u_i - u_j||^2 on the previous snapshot's embeddings. Always <= 0.
inline double base_intensity(std::span<const double> u_prev_i, std::span<const double> u_prev_j) {
  return -squared_distance(u_prev_i, u_prev_j);
}

namespace detail {

/// Attention pre-activation z^T relu(W x) for x = |a - b|, clamped at zero so
/// that sum-normalization always yields a probability vector. hidden and x
/// receive W x (before relu) and |a - b| for reuse in the backward pass.
inline double attention_score(std::span<const double> a, std::span<const double> b, const HawkesParams& p,
                              double* x, double* hidden) {
  const std::size_t n = p.dim;
  if (a.size() != n || b.size() != n) throw ValidationError("attention input length differs from parameter dim");
  for (std::size_t l = 0; l < n; ++l) x[l] = std::abs(a[l] - b[l]);
  double score = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double y = dot(p.W.data() + k * n, x, n);
    hidden[k] = y;
    if (y > 0.0) score += p.z[k] * y;
  }
  return score > 0.0 ? score : 0.0;
}

inline std::vector<double> normalize_scores(std::span<const double> scores, bool* uniform = nullptr) {
  const double sum = std::accumulate(scores.begin(), scores.end(), 0.0);
  std::vector<double> w(scores.size());
  const bool flat = !(sum > 0.0);
  for (std::size_t h = 0; h < scores.size(); ++h) {
    w[h] = flat ? 1.0 / static_cast<double>(scores.size()) : scores[h] / sum;
  }
  if (uniform) *uniform = flat;
  return w;
}

}  // namespace detail

/// Self-attention over a vertex's history. Each entry is the pair
/// (u_i^{t_h}, u_h^{t_h}); weights are pre-activations over their sum, or
/// uniform when every pre-activation is zero.
inline std::vector<double> attention_weights(
    std::span<const std::pair<std::span<const double>, std::span<const double>>> history, const HawkesParams& params) {
  if (history.empty()) throw ValidationError("attention over an empty history");
  std::vector<double> x(params.dim), hidden(params.dim), scores;
  scores.reserve(history.size());
  for (const auto& [a, b] : history) scores.push_back(detail::attention_score(a, b, params, x.data(), hidden.data()));
  return detail::normalize_scores(scores);
}

/// Forward state for one (i, t) anchor: its windowed history with attention
/// weights and kernel values. Candidates j reuse this state, so the O(d^2)
/// attention cost is paid once per anchor.
class AnchorState {
 public:
  AnchorState(const Model& model, const DynamicNetwork& net, VertexId i, int t, int window)
      : i_(i), t_(t), dim_(model.emb.dim()) {
    if (t < 2) throw ValidationError("intensity needs t >= 2 (base uses snapshot t-1)");
    if (t > model.emb.snapshot_count()) throw ValidationError("snapshot index beyond embeddings");
    history_ = history_neighbors(net, i, t, window);
    const std::size_t H = history_.size();
    x_.resize(H * dim_);
    hidden_.resize(H * dim_);
    scores_.resize(H);
    kappa_.resize(H);
    dkappa_.resize(H);
    const auto& p = model.params;
    const double delta = p.delta(i);
    for (std::size_t h = 0; h < H; ++h) {
      const auto& e = history_[h];
      scores_[h] = detail::attention_score(model.emb.row(e.time, i), model.emb.row(e.time, e.neighbor), p,
                                           x_.data() + h * dim_, hidden_.data() + h * dim_);
      const auto kv = decay_kernel_with_derivative(p.kernel, delta, static_cast<double>(t - e.time));
      kappa_[h] = kv.value;
      dkappa_[h] = kv.d_delta;
    }
    if (H > 0) alpha_ = detail::normalize_scores(scores_, &uniform_);
    d_alpha_.assign(H, 0.0);
  }

  VertexId anchor() const { return i_; }
  int time() const { return t_; }
  std::span<const HistoryEntry> history() const { return history_; }
  std::span<const double> attention() const { return alpha_; }
  std::span<const double> kernel_values() const { return kappa_; }

  IntensityBreakdown intensity(const Model& model, VertexId j) const {
    std::vector<double> influence;
    return intensity(model, j, influence);
  }

  /// As above; also leaves g_{h,j} = -||u_h^{t_h} - u_j^{t_h}||^2 per history
  /// entry in `influence` for a following backward_candidate call.
  IntensityBreakdown intensity(const Model& model, VertexId j, std::vector<double>& influence) const {
    IntensityBreakdown out;
    out.base = -squared_distance(model.emb.row(t_ - 1, i_).data(), model.emb.row(t_ - 1, j).data(), dim_);
    influence.resize(history_.size());
    for (std::size_t h = 0; h < history_.size(); ++h) {
      const auto& e = history_[h];
      const double g = -squared_distance(model.emb.row(e.time, e.neighbor).data(), model.emb.row(e.time, j).data(), dim_);
      influence[h] = g;
      out.excitation += alpha_[h] * g * kappa_[h];
    }
    out.raw = out.base + out.excitation;
    out.transferred = std::exp(out.raw);
    return out;
  }

  /// Accumulates d(loss)/d(params) for candidate j whose raw intensity has
  /// upstream derivative `upstream`; `influence` comes from intensity().
  /// Attention gradients are deferred to finish_backward() so candidates
  /// sharing the anchor are folded together.
  void backward_candidate(const Model& model, VertexId j, double upstream, std::span<const double> influence,
                          Model& grad) {
    if (upstream == 0.0) return;
    const std::size_t n = dim_;
    {
      const double* ui = model.emb.row(t_ - 1, i_).data();
      const double* uj = model.emb.row(t_ - 1, j).data();
      double* gi = grad.emb.row(t_ - 1, i_).data();
      double* gj = grad.emb.row(t_ - 1, j).data();
      const double c = 2.0 * upstream;
      for (std::size_t k = 0; k < n; ++k) {
        const double d = c * (ui[k] - uj[k]);
        gi[k] -= d;
        gj[k] += d;
      }
    }
    double d_delta = 0.0;
    for (std::size_t h = 0; h < history_.size(); ++h) {
      const auto& e = history_[h];
      const double g = influence[h];
      d_alpha_[h] += upstream * g * kappa_[h];
      d_delta += upstream * alpha_[h] * g * dkappa_[h];
      const double c = 2.0 * upstream * alpha_[h] * kappa_[h];
      if (c != 0.0) {
        const double* uh = model.emb.row(e.time, e.neighbor).data();
        const double* uj = model.emb.row(e.time, j).data();
        double* gh = grad.emb.row(e.time, e.neighbor).data();
        double* gj = grad.emb.row(e.time, j).data();
        for (std::size_t k = 0; k < n; ++k) {
          const double d = c * (uh[k] - uj[k]);
          gh[k] -= d;
          gj[k] += d;
        }
      }
    }
    grad.params.theta[i_] += d_delta * model.params.delta(i_);
  }

  void backward_candidate(const Model& model, VertexId j, double upstream, Model& grad) {
    std::vector<double> influence;
    intensity(model, j, influence);
    backward_candidate(model, j, upstream, influence, grad);
  }

  /// Pushes the accumulated attention-weight derivatives through the
  /// normalization, z, W and the |u_i - u_h| inputs. Resets the accumulators.
  void finish_backward(const Model& model, Model& grad) {
    const std::size_t H = history_.size();
    if (H == 0) return;
    if (!uniform_) {
      double sum = 0.0;
      for (double s : scores_) sum += s;
      double mean = 0.0;
      for (std::size_t h = 0; h < H; ++h) mean += alpha_[h] * d_alpha_[h];
      const std::size_t n = dim_;
      const auto& p = model.params;
      std::vector<double> dx(n);
      for (std::size_t h = 0; h < H; ++h) {
        if (!(scores_[h] > 0.0)) continue;  // clamped score has zero derivative
        const double ds = (d_alpha_[h] - mean) / sum;
        if (ds == 0.0) continue;
        const double* x = x_.data() + h * n;
        const double* y = hidden_.data() + h * n;
        std::fill(dx.begin(), dx.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
          if (!(y[k] > 0.0)) continue;
          grad.params.z[k] += ds * y[k];
          const double c = ds * p.z[k];
          double* gw = grad.params.W.data() + k * n;
          const double* w = p.W.data() + k * n;
          for (std::size_t l = 0; l < n; ++l) {
            gw[l] += c * x[l];
            dx[l] += c * w[l];
          }
        }
        const auto& e = history_[h];
        const auto ui = model.emb.row(e.time, i_);
        const auto uh = model.emb.row(e.time, e.neighbor);
        auto gi = grad.emb.row(e.time, i_);
        auto gh = grad.emb.row(e.time, e.neighbor);
        for (std::size_t l = 0; l < n; ++l) {
          const double diff = ui[l] - uh[l];
          const double s = diff > 0.0 ? dx[l] : (diff < 0.0 ? -dx[l] : 0.0);
          gi[l] += s;
          gh[l] -= s;
        }
      }
    }
    std::fill(d_alpha_.begin(), d_alpha_.end(), 0.0);
  }

 private:
  VertexId i_;
  int t_;
  std::size_t dim_;
  std::vector<HistoryEntry> history_;
  std::vector<double> x_, hidden_, scores_, alpha_, kappa_, dkappa_, d_alpha_;
  bool uniform_ = false;
};

/// lambda_{i,j}(t): base from snapshot t-1 plus the attention-weighted,
/// kernel-decayed influence of i's historical neighbors on j.
inline IntensityBreakdown conditional_intensity(VertexId i, VertexId j, int t, const Model& model,
                                                const DynamicNetwork& net, int window) {
  if (i == j) throw ValidationError("intensity of a self pair");
  net.check_vertex(j);
  return AnchorState(model, net, i, t, window).intensity(model, j);
}

/// Normalizes positive transferred intensities into edge probabilities.
inline std::vector<double> edge_probability(std::span<const double> intensities) {
  if (intensities.empty()) throw ValidationError("no candidates");
  double sum = 0.0;
  for (double l : intensities) {
    if (!(l > 0.0)) throw ValidationError("intensity must be positive");
    sum += l;
  }
  std::vector<double> p(intensities.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = intensities[k] / sum;
  return p;
}

/// Same normalization from raw intensities, computed in log space so large
/// negative raw values do not underflow.
inline std::vector<double> edge_probability_from_raw(std::span<const double> raw) {
  if (raw.empty()) throw ValidationError("no candidates");
  const double m = *std::max_element(raw.begin(), raw.end());
  double sum = 0.0;
  for (double r : raw) sum += std::exp(r - m);
  std::vector<double> p(raw.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::exp(raw[k] - m) / sum;
  return p;
}

}  // namespace dhprep
