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

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "dhprep/synthgen.hpp"

namespace dhprep {
namespace {

PlantedSpec small_spec(std::uint64_t seed) {
  PlantedSpec s;
  s.vertex_count = 40;
  s.block_sizes = {20, 20};
  s.snapshots = 4;
  s.seed = seed;
  return s;
}

TEST(PlantedSpecTest, BlockSizesMustSumToVertexCount) {
  PlantedSpec s;
  s.vertex_count = 5;
  s.block_sizes = {3, 2};
  EXPECT_NO_THROW(s.validate());
  s.block_sizes = {3, 3};
  try {
    s.validate();
    FAIL() << "accepted blocks 3,3 for 5 vertices";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("blocks"), std::string::npos);
  }
}

TEST(PlantedSpecTest, RejectsOutOfRangeParameters) {
  auto s = small_spec(1);
  s.p_in = 1.5;
  EXPECT_THROW(s.validate(), ValidationError);
  s = small_spec(1);
  s.persistence = -0.1;
  EXPECT_THROW(s.validate(), ValidationError);
  s = small_spec(1);
  s.rho = 0.0;
  EXPECT_THROW(s.validate(), ValidationError);
  s = small_spec(1);
  s.snapshots = 0;
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(GenerateTest, SameSeedSameNetwork) {
  const auto a = generate(small_spec(3));
  const auto b = generate(small_spec(3));
  const auto c = generate(small_spec(4));
  std::ostringstream sa, sb, sc;
  write_generated_edges(a.net, 1, sa);
  write_generated_edges(b.net, 1, sb);
  write_generated_edges(c.net, 1, sc);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str(), sc.str());
  EXPECT_EQ(a.blocks, b.blocks);
}

TEST(GenerateTest, NoSelfLoopsAndUnitWeights) {
  const auto g = generate(small_spec(5));
  EXPECT_EQ(g.net.snapshot_count(), 4);
  EXPECT_EQ(g.net.vertex_count(), 40u);
  for (int t = 1; t <= 4; ++t) {
    for (const auto& e : g.net.snapshot(t).edges()) {
      EXPECT_NE(e.u, e.v);
      EXPECT_EQ(e.weight, 1.0);
    }
  }
  for (std::size_t v = 0; v < 40; ++v) EXPECT_EQ(g.blocks[v], v < 20 ? 0 : 1);
}

struct Density {
  double intra = 0.0;
  double inter = 0.0;
};

Density densities(const PlantedNetwork& g) {
  const std::size_t n = g.blocks.size();
  std::size_t intra_pairs = 0, inter_pairs = 0;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) (g.blocks[u] == g.blocks[v] ? intra_pairs : inter_pairs)++;
  }
  Density d;
  for (int t = 1; t <= g.net.snapshot_count(); ++t) {
    for (const auto& e : g.net.snapshot(t).edges()) {
      (g.blocks[e.u] == g.blocks[e.v] ? d.intra : d.inter) += 1.0;
    }
  }
  const double T = g.net.snapshot_count();
  d.intra /= T * static_cast<double>(intra_pairs);
  d.inter /= T * static_cast<double>(inter_pairs);
  return d;
}

TEST(GenerateTest, IntraToInterDensityNearTen) {
  Density sum;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    PlantedSpec s;
    s.seed = seed;
    const auto d = densities(generate(s));
    sum.intra += d.intra;
    sum.inter += d.inter;
  }
  const double ratio = sum.intra / sum.inter;
  EXPECT_GT(ratio, 8.0);
  EXPECT_LT(ratio, 12.0);
}

TEST(GenerateTest, EqualProbabilitiesGiveEqualDensity) {
  Density sum;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto s = small_spec(seed);
    s.p_in = s.p_out = 0.05;
    const auto d = densities(generate(s));
    sum.intra += d.intra;
    sum.inter += d.inter;
  }
  // About 62k pair draws per class; the standard error of each mean is below 4%.
  EXPECT_NEAR(sum.intra / sum.inter, 1.0, 0.1);
}

TEST(GenerateTest, FullPersistenceWithoutFreshEdgesFreezesTheNetwork) {
  auto s = small_spec(2);
  s.p_in_initial = 0.3;
  s.p_out_initial = 0.05;
  s.p_in = s.p_out = 0.0;
  s.persistence = 1.0;
  const auto g = generate(s);
  ASSERT_GT(g.net.snapshot(1).edge_count(), 0u);
  for (int t = 2; t <= 4; ++t) EXPECT_TRUE(std::ranges::equal(g.net.snapshot(t).edges(), g.net.snapshot(1).edges()));
}

TEST(GenerateTest, DecayMakesNearbySnapshotsMoreAlike) {
  double near = 0.0, far = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    PlantedSpec s;
    s.snapshots = 6;
    s.decay = DecayMode::exponential;
    s.rho = 4.0;
    s.seed = seed;
    const auto g = generate(s);
    near += edge_jaccard(g.net, 5, 6);
    far += edge_jaccard(g.net, 1, 6);
  }
  EXPECT_GT(near, far);
}

TEST(GenerateTest, EdgeListRoundTripsThroughIngestion) {
  const auto g = generate(small_spec(8));
  std::ostringstream out;
  write_generated_edges(g.net, 1, out);
  std::istringstream in(out.str());
  const auto net = bucket_snapshots(ingest_edges(in), 1);
  ASSERT_EQ(net.snapshot_count(), g.net.snapshot_count());
  EXPECT_EQ(net.origin(), g.net.origin());
  for (int t = 1; t <= net.snapshot_count(); ++t) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> a, b;
    for (const auto& e : g.net.snapshot(t).edges()) a.push_back({e.u, e.v});
    for (const auto& e : net.snapshot(t).edges()) {
      const auto u = net.external_ids()[e.u], v = net.external_ids()[e.v];
      b.push_back({std::min(u, v), std::max(u, v)});
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b) << "snapshot " << t;
  }
}

TEST(LabelsTest, OneLinePerVertex) {
  const std::vector<int> blocks{0, 0, 1};
  std::ostringstream out;
  write_labels(blocks, out);
  EXPECT_EQ(out.str(), "0\t0\n1\t0\n2\t1\n");
}

}  // namespace
}  // namespace dhprep
