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
#include <cstddef>
#include <span>
#include <vector>

#include "dhprep/errors.hpp"
#include "dhprep/kernels.hpp"
#include "dhprep/random.hpp"
#include "dhprep/temporal_graph.hpp"

namespace dhprep {

/// u_i^t for every snapshot t in [1, T] and vertex i, snapshot-major.
class EmbeddingSequence {
 public:
  EmbeddingSequence() = default;
  EmbeddingSequence(std::size_t dim, std::size_t vertex_count, int snapshots)
      : dim_(dim), vertex_count_(vertex_count), snapshots_(snapshots),
        data_(dim * vertex_count * static_cast<std::size_t>(snapshots), 0.0) {
    if (dim == 0) throw ValidationError("embedding dimension must be >= 1");
    if (snapshots < 0) throw ValidationError("snapshot count must be >= 0");
  }

  std::size_t dim() const { return dim_; }
  std::size_t vertex_count() const { return vertex_count_; }
  int snapshot_count() const { return snapshots_; }

  std::span<double> row(int t, VertexId i) { return {data_.data() + offset(t, i), dim_}; }
  std::span<const double> row(int t, VertexId i) const { return {data_.data() + offset(t, i), dim_}; }

  /// All rows of snapshot t, contiguous.
  std::span<double> snapshot(int t) { return {data_.data() + offset(t, 0), dim_ * vertex_count_}; }
  std::span<const double> snapshot(int t) const { return {data_.data() + offset(t, 0), dim_ * vertex_count_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool all_finite() const {
    for (double x : data_) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }

  friend bool operator==(const EmbeddingSequence&, const EmbeddingSequence&) = default;

 private:
  std::size_t offset(int t, VertexId i) const {
    return (static_cast<std::size_t>(t - 1) * vertex_count_ + i) * dim_;
  }

  std::size_t dim_ = 0;
  std::size_t vertex_count_ = 0;
  int snapshots_ = 0;
  std::vector<double> data_;
};

/// Attention projection W (n x n, row-major), attention vector z, and the
/// per-vertex log decay rates theta with delta_l = exp(theta_l).
struct HawkesParams {
  std::size_t dim = 0;
  std::vector<double> W;
  std::vector<double> z;
  std::vector<double> theta;
  KernelKind kernel = KernelKind::exponential;

  HawkesParams() = default;
  HawkesParams(std::size_t n, std::size_t vertex_count, KernelKind k)
      : dim(n), W(n * n, 0.0), z(n, 0.0), theta(vertex_count, 0.0), kernel(k) {}

  double delta(VertexId v) const { return std::exp(theta[v]); }

  friend bool operator==(const HawkesParams&, const HawkesParams&) = default;
};

/// Every trainable quantity of the objective. Gradients use the same shape.
struct Model {
  EmbeddingSequence emb;
  HawkesParams params;

  static Model zeros_like(const Model& m) {
    Model g;
    g.emb = EmbeddingSequence(m.emb.dim(), m.emb.vertex_count(), m.emb.snapshot_count());
    g.params = HawkesParams(m.params.dim, m.params.theta.size(), m.params.kernel);
    return g;
  }

  friend bool operator==(const Model&, const Model&) = default;
};

/// Embeddings uniform in [-0.5/d, 0.5/d]; W and z uniform in
/// [-1/sqrt(d), 1/sqrt(d)]; theta = 0 so every delta starts at 1.
inline Model initialize_model(std::size_t vertex_count, int snapshots, std::size_t dim, KernelKind kernel,
                              Rng& rng) {
  Model m;
  m.emb = EmbeddingSequence(dim, vertex_count, snapshots);
  m.params = HawkesParams(dim, vertex_count, kernel);
  const double e = 0.5 / static_cast<double>(dim);
  for (double& x : m.emb.data()) x = uniform_real(rng, -e, e);
  const double a = 1.0 / std::sqrt(static_cast<double>(dim));
  for (double& x : m.params.W) x = uniform_real(rng, -a, a);
  for (double& x : m.params.z) x = uniform_real(rng, -a, a);
  return m;
}

/// Addressable parameter groups, used by gradient checking.
enum class ParamBlock { embedding, W, z, theta };

inline std::span<double> block_values(Model& m, ParamBlock b) {
  switch (b) {
    case ParamBlock::embedding: return m.emb.data();
    case ParamBlock::W: return m.params.W;
    case ParamBlock::z: return m.params.z;
    case ParamBlock::theta: return m.params.theta;
  }
  return {};
}

inline std::span<const double> block_values(const Model& m, ParamBlock b) {
  return block_values(const_cast<Model&>(m), b);
}

// Reductions below use four independent partial sums so the compiler can
// pipeline them without reassociating floating-point math.
inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

inline double squared_distance(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const double d0 = a[k] - b[k], d1 = a[k + 1] - b[k + 1], d2 = a[k + 2] - b[k + 2], d3 = a[k + 3] - b[k + 3];
    s0 += d0 * d0;
    s1 += d1 * d1;
    s2 += d2 * d2;
    s3 += d3 * d3;
  }
  for (; k < n; ++k) s0 += (a[k] - b[k]) * (a[k] - b[k]);
  return (s0 + s1) + (s2 + s3);
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("vector length mismatch");
  return squared_distance(a.data(), b.data(), a.size());
}

}  // namespace dhprep
