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
#include <span>
#include <vector>

#include "dhprep/errors.hpp"
#include "dhprep/random.hpp"

namespace dhprep {

/// Walker/Vose alias table over a finite set of non-negative weights.
/// Construction is O(n); each draw costs one index and one coin.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw ValidationError("alias table needs at least one weight");
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("alias weights must be finite and >= 0");
      total += w;
    }
    if (!(total > 0.0)) throw ValidationError("alias weights sum to zero");

    probability_.resize(n);
    for (std::size_t i = 0; i < n; ++i) probability_[i] = weights[i] / total;

    accept_.assign(n, 1.0);
    alias_.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      alias_[i] = static_cast<std::uint32_t>(i);
      scaled[i] = probability_[i] * static_cast<double>(n);
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const auto s = small.back();
      small.pop_back();
      const auto l = large.back();
      large.pop_back();
      accept_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    // Leftovers are 1 up to rounding.
    for (auto i : small) accept_[i] = 1.0;
    for (auto i : large) accept_[i] = 1.0;
    // Zero-weight entries must never be returned, even through rounding.
    std::size_t fallback = 0;
    while (probability_[fallback] == 0.0) ++fallback;
    for (std::size_t i = 0; i < n; ++i) {
      if (probability_[i] != 0.0) continue;
      accept_[i] = 0.0;
      if (probability_[alias_[i]] == 0.0) alias_[i] = static_cast<std::uint32_t>(fallback);
    }
  }

  std::size_t size() const { return probability_.size(); }
  bool empty() const { return probability_.empty(); }

  /// Normalized probability of outcome i.
  double probability(std::size_t i) const { return probability_[i]; }
  std::span<const double> probabilities() const { return probability_; }

  std::uint32_t sample(Rng& rng) const {
    const auto column = static_cast<std::size_t>(uniform_index(rng, accept_.size()));
    return uniform01(rng) < accept_[column] ? static_cast<std::uint32_t>(column) : alias_[column];
  }

 private:
  std::vector<double> probability_;
  std::vector<double> accept_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace dhprep
