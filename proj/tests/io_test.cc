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

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dhprep/checkpoint.hpp"
#include "dhprep/config.hpp"
#include "dhprep/gradcheck.hpp"

namespace dhprep {
namespace {

Checkpoint sample_checkpoint() {
  const auto inst = make_gradient_check_instance(6, 3, 4, KernelKind::rayleigh, 11, 0.4);
  Checkpoint ck;
  ck.model = inst.model;
  ck.interval = 864000;
  ck.origin = 1200;
  ck.external_ids = {3, 5, 8, 13, 21, 34};
  ck.config = {{"dim", "4"}, {"kernel", "rayleigh"}, {"input", "data/a b.tsv"}};
  return ck;
}

std::string serialize(const Checkpoint& ck) {
  std::ostringstream out;
  write_checkpoint(ck, out);
  return out.str();
}

Checkpoint parse(const std::string& text) {
  std::istringstream in(text);
  return read_checkpoint(in);
}

TEST(CheckpointTest, RoundTripIsExact) {
  const auto ck = sample_checkpoint();
  const auto text = serialize(ck);
  EXPECT_EQ(text.rfind(std::string(kCheckpointMagic), 0), 0u);
  const auto back = parse(text);
  EXPECT_EQ(back, ck);
  EXPECT_EQ(serialize(back), text);
  EXPECT_EQ(checkpoint_setting(back, "kernel"), "rayleigh");
  EXPECT_EQ(checkpoint_setting(back, "lr", "0.025"), "0.025");
}

TEST(CheckpointTest, SaveAndLoad) {
  const auto dir = std::filesystem::temp_directory_path() / "dhprep_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "ck.txt";
  const auto ck = sample_checkpoint();
  save_checkpoint(ck, path);
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".partial"));
  EXPECT_EQ(load_checkpoint(path), ck);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(load_checkpoint(dir / "missing.txt"), Error);
}

TEST(CheckpointTest, RejectsDamagedFiles) {
  const auto text = serialize(sample_checkpoint());
  EXPECT_THROW(parse("NOT-A-CHECKPOINT\n" + text.substr(text.find('\n') + 1)), FormatError);
  EXPECT_THROW(parse(text.substr(0, text.size() / 2)), FormatError);
  auto bad = text;
  const auto pos = bad.find("\ndim ");
  bad.replace(pos, 6, "\ndim x");
  EXPECT_THROW(parse(bad), FormatError);
  auto no_end = text.substr(0, text.rfind("end"));
  EXPECT_THROW(parse(no_end), FormatError);
}

TEST(ConfigTest, ParsesFlatKeyValueLines) {
  RunConfig cfg;
  std::istringstream in("# comment\n\ndim = 16\nkernel = power-law\nk_list = 5, 15\nnew_only = true\n");
  read_config(in, cfg);
  EXPECT_EQ(cfg.training.dim, 16u);
  EXPECT_EQ(cfg.training.kernel, KernelKind::power_law);
  EXPECT_EQ(cfg.k_list, (std::vector<std::size_t>{5, 15}));
  EXPECT_TRUE(cfg.new_only);
  EXPECT_TRUE(cfg.is_explicit("dim"));
  EXPECT_FALSE(cfg.is_explicit("epochs"));
}

TEST(ConfigTest, ReportsLineOfBadEntries) {
  RunConfig cfg;
  std::istringstream unknown("dim = 4\nwidth = 3\n");
  try {
    read_config(unknown, cfg);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("width"), std::string::npos);
  }
  std::istringstream no_equals("dim 4\n");
  EXPECT_THROW(read_config(no_equals, cfg), ParseError);
  std::istringstream bad_kernel("kernel = gaussian\n");
  EXPECT_THROW(read_config(bad_kernel, cfg), ParseError);
  std::istringstream bad_number("lr = fast\n");
  EXPECT_THROW(read_config(bad_number, cfg), ParseError);
}

TEST(ConfigTest, LaterSettingsOverrideEarlierOnes) {
  RunConfig cfg;
  std::istringstream in("epochs = 7\n");
  read_config(in, cfg);
  apply_setting(cfg, "epochs", "9");
  EXPECT_EQ(cfg.training.epochs, 9);
  EXPECT_THROW(apply_setting(cfg, "nope", "1"), ValidationError);
}

TEST(ConfigTest, SeedDrivesTrainingAndGenerator) {
  RunConfig cfg;
  apply_setting(cfg, "seed", "42");
  EXPECT_EQ(cfg.training.seed, 42u);
  EXPECT_EQ(cfg.synth.seed, 42u);
}

TEST(ConfigTest, EveryFieldRoundTripsThroughText) {
  const RunConfig defaults;
  std::ostringstream out;
  write_config(defaults, out);
  RunConfig back;
  std::istringstream in(out.str());
  read_config(in, back);
  EXPECT_EQ(config_entries(back), config_entries(defaults));
  std::set<std::string_view> keys;
  for (const auto& f : config_fields()) EXPECT_TRUE(keys.insert(f.key).second) << f.key;
  for (const auto* key : {"input", "out", "seed", "dim", "kernel", "history", "beta0", "beta1", "negatives", "lr",
                          "epochs", "batch_size", "mode", "threads", "task", "ratio", "k_list", "tolerance"}) {
    EXPECT_TRUE(keys.count(key)) << key;
  }
}

TEST(ConfigTest, MissingFileIsAValidationError) {
  RunConfig cfg;
  EXPECT_THROW(read_config_file("/nonexistent/dhprep.conf", cfg), ValidationError);
}

TEST(ConfigTest, EvaluationSettingsFollowTheConfig) {
  RunConfig cfg;
  apply_setting(cfg, "task", "recommend");
  apply_setting(cfg, "k_list", "3");
  apply_setting(cfg, "repeats", "2");
  const auto s = evaluation_settings(cfg);
  EXPECT_EQ(s.task, "recommend");
  EXPECT_EQ(s.recommendation.ks, (std::vector<std::size_t>{3}));
  EXPECT_EQ(s.cv.repeats, 2);
}

}  // namespace
}  // namespace dhprep
