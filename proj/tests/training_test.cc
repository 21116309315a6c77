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

#include <cmath>
#include <sstream>

#include "dhprep/synthgen.hpp"
#include "dhprep/training.hpp"
#include "test_util.hpp"

namespace dhprep {
namespace {

using testing::make_network;

DynamicNetwork toy_network() {
  return make_network(6, {{{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}},
                          {{0, 1}, {1, 2}, {3, 4}, {3, 5}, {2, 3}},
                          {{0, 2}, {1, 2}, {4, 5}, {3, 5}, {0, 1}}});
}

TrainingConfig small_config() {
  TrainingConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 50;
  cfg.batch_size = 4;
  cfg.negatives = 2;
  cfg.lr = 0.02;
  return cfg;
}

TEST(TrainTest, ZeroEpochsReturnsTheInitialState) {
  auto cfg = small_config();
  cfg.epochs = 0;
  const auto net = toy_network();
  const auto state = train(net, cfg);
  EXPECT_EQ(state.epoch, 0);
  EXPECT_TRUE(state.trace.empty());
  Rng rng = derive_rng(cfg.seed, 0);
  EXPECT_EQ(state.model, initialize_model(6, 3, 8, cfg.kernel, rng));
}

TEST(TrainTest, InitializationRanges) {
  Rng rng(1);
  const auto m = initialize_model(20, 3, 16, KernelKind::exponential, rng);
  for (double x : m.emb.data()) EXPECT_LE(std::abs(x), 0.5 / 16);
  for (double x : m.params.W) EXPECT_LE(std::abs(x), 0.25);
  for (double x : m.params.z) EXPECT_LE(std::abs(x), 0.25);
  for (VertexId v = 0; v < 20; ++v) EXPECT_EQ(m.params.delta(v), 1.0);
}

TEST(TrainTest, ToyNetworkLossDecreases) {
  const auto state = train(toy_network(), small_config());
  ASSERT_EQ(state.trace.size(), 50u);
  EXPECT_EQ(state.epoch, 50);
  EXPECT_LT(state.trace.back().total, state.trace.front().total);
  for (const auto& e : state.trace) {
    EXPECT_TRUE(std::isfinite(e.total));
    EXPECT_NEAR(e.total, e.structural + 1.0 * e.dhp + 0.01 * e.smooth, 1e-9 * std::abs(e.total));
  }
}

TEST(TrainTest, IdenticalSeedsGiveBitwiseIdenticalRuns) {
  const auto net = toy_network();
  const auto a = train(net, small_config());
  const auto b = train(net, small_config());
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(a.model, b.model);
  auto other = small_config();
  other.seed = 2;
  EXPECT_NE(train(net, other).trace, a.trace);
}

TEST(TrainTest, ParallelModeIsRepeatableAndClose) {
  PlantedSpec spec;
  spec.vertex_count = 40;
  spec.block_sizes = {20, 20};
  spec.snapshots = 4;
  spec.p_in = 0.3;
  const auto net = generate(spec).net;
  auto cfg = small_config();
  cfg.epochs = 5;
  cfg.batch_size = 64;
  const auto serial = train(net, cfg);
  cfg.parallel = true;
  cfg.threads = 3;
  const auto p1 = train(net, cfg);
  const auto p2 = train(net, cfg);
  EXPECT_EQ(p1.trace, p2.trace);
  for (std::size_t e = 0; e < serial.trace.size(); ++e)
    EXPECT_NEAR(p1.trace[e].total, serial.trace[e].total, 1e-9 * serial.trace[e].total);
}

TEST(TrainTest, SingleSnapshotTrainsStructureOnly) {
  const auto net = make_network(4, {{{0, 1}, {2, 3}}});
  auto cfg = small_config();
  cfg.epochs = 3;
  const auto state = train(net, cfg);
  ASSERT_EQ(state.trace.size(), 3u);
  for (const auto& e : state.trace) {
    EXPECT_EQ(e.dhp, 0.0);
    EXPECT_EQ(e.smooth, 0.0);
  }
}

TEST(TrainTest, DivergenceIsReported) {
  auto cfg = small_config();
  cfg.lr = 1e6;
  cfg.epochs = 20;
  try {
    train(toy_network(), cfg);
    FAIL() << "no divergence detected";
  } catch (const DivergenceError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("batch"), std::string::npos);
  }
}

TEST(TrainTest, InvalidConfigsAreRejected) {
  const auto net = toy_network();
  auto bad = [&](auto mutate) {
    auto cfg = small_config();
    mutate(cfg);
    EXPECT_THROW(train(net, cfg), ValidationError);
  };
  bad([](TrainingConfig& c) { c.negatives = 0; });
  bad([](TrainingConfig& c) { c.history = 0; });
  bad([](TrainingConfig& c) { c.lr = 0.0; });
  bad([](TrainingConfig& c) { c.dim = 0; });
  bad([](TrainingConfig& c) { c.batch_size = 0; });
  bad([](TrainingConfig& c) { c.beta0 = -1.0; });
  bad([](TrainingConfig& c) { c.epochs = -1; });
}

TEST(TrainTest, LossTraceIsTabSeparated) {
  std::ostringstream out;
  write_loss_trace({{1, 2.5, 0.5, 0.25, 3.0}}, out);
  EXPECT_EQ(out.str(), "epoch\tL_1st\tL_DHP\tL_smooth\ttotal\n1\t2.5\t0.5\t0.25\t3\n");
}

}  // namespace
}  // namespace dhprep
