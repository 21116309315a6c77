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
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(DHPREP_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dhprep_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Small planted network in <dir>/gen/edges.tsv.
  std::string generated() {
    const auto r = run("generate --vertices 30 --blocks 15,15 --snapshots 4 --p_in 0.3 --p_out 0.03 --seed 2 --out " +
                       path("gen"));
    EXPECT_EQ(r.code, 0) << r.output;
    return path("gen/edges.tsv");
  }

  std::string train_small(const std::string& input, const std::string& out, const std::string& extra = "") {
    const auto r = run("train --input " + input + " --dim 4 --epochs 2 --out " + out + " " + extra);
    EXPECT_EQ(r.code, 0) << r.output;
    return out + "/checkpoint.txt";
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpListsEveryKeyWithItsDefault) {
  const auto r = run("--help");
  EXPECT_EQ(r.code, 0);
  for (const char* s : {"train", "eval", "generate", "gradcheck", "sweep", "inspect", "--config", "--seed", "--out",
                        "--dim", "[default: 128]", "--lr", "[default: 0.01]", "--kernel", "[default: exponential]",
                        "--beta0", "--negatives", "--epochs", "[default: 100]", "--mode", "[default: deterministic]"}) {
    EXPECT_NE(r.output.find(s), std::string::npos) << s;
  }
}

TEST_F(CliTest, UsageErrorsExitWithTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("train --dim").code, 2);
  EXPECT_EQ(run("train --input x --dim four").code, 2);
  EXPECT_EQ(run("train --input x --kernel gaussian").code, 2);
}

TEST_F(CliTest, MissingInputNamesThePath) {
  const auto r = run("train --input " + path("absent.tsv") + " --out " + path("o"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("absent.tsv"), std::string::npos) << r.output;
}

TEST_F(CliTest, MalformedInputReportsTheLine) {
  std::ofstream(path("bad.tsv")) << "1\t2\t10\n1\t2\n";
  const auto r = run("train --input " + path("bad.tsv") + " --out " + path("o"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("line 2"), std::string::npos) << r.output;
}

TEST_F(CliTest, ConfigFileAndFlagOverride) {
  const auto input = generated();
  std::ofstream(path("run.conf")) << "# small run\ndim = 3\nepochs = 5\n";
  const auto r = run("train --config " + path("run.conf") + " --epochs 1 --input " + input + " --out " + path("o"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto ck = slurp(path("o/checkpoint.txt"));
  EXPECT_NE(ck.find("dim = 3\n"), std::string::npos);
  EXPECT_NE(ck.find("epochs = 1\n"), std::string::npos);
  std::ofstream(path("bad.conf")) << "dim = 3\ncolour = red\n";
  EXPECT_EQ(run("train --config " + path("bad.conf") + " --input " + input).code, 2);
}

TEST_F(CliTest, TrainIsReproducibleAndDoesNotTouchItsInput) {
  const auto input = generated();
  const auto before = slurp(input);
  const auto a = train_small(input, path("a"));
  const auto b = train_small(input, path("b"));
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(path("a/loss_trace.tsv")), slurp(path("b/loss_trace.tsv")));
  EXPECT_EQ(slurp(input), before);
  const auto c = train_small(input, path("c"), "--seed 9");
  EXPECT_NE(slurp(a), slurp(c));
}

TEST_F(CliTest, ZeroEpochsWritesTheInitialState) {
  const auto input = generated();
  const auto r = run("train --input " + input + " --dim 4 --epochs 0 --out " + path("z"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("no epochs run"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("z/checkpoint.txt")));
  EXPECT_EQ(slurp(path("z/loss_trace.tsv")), "epoch\tL_1st\tL_DHP\tL_smooth\ttotal\n");
}

TEST_F(CliTest, EvalReportsAreReproducible) {
  const auto input = generated();
  const auto ck = train_small(input, path("t"));
  const auto r1 = run("eval --checkpoint " + ck + " --repeats 2 --out " + path("e1"));
  const auto r2 = run("eval --checkpoint " + ck + " --repeats 2 --out " + path("e2"));
  ASSERT_EQ(r1.code, 0) << r1.output;
  ASSERT_EQ(r2.code, 0) << r2.output;
  const auto report = slurp(path("e1/report.tsv"));
  EXPECT_EQ(report, slurp(path("e2/report.tsv")));
  EXPECT_NE(report.find("link\tF1"), std::string::npos);
  EXPECT_NE(report.find("link\tAUC"), std::string::npos);
}

TEST_F(CliTest, RecommendationReportHasBothCutoffs) {
  const auto input = generated();
  const auto ck = train_small(input, path("t"));
  const auto r = run("eval --checkpoint " + ck + " --task recommend --out " + path("e"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto report = slurp(path("e/report.tsv"));
  for (const char* m : {"P@10", "R@10", "P@20", "R@20"}) EXPECT_NE(report.find(m), std::string::npos) << m;
}

TEST_F(CliTest, EvalNeedsASecondSnapshot) {
  std::ofstream(path("one.tsv")) << "1\t2\t5\n2\t3\t5\n";
  const auto ck = train_small(path("one.tsv"), path("t"));
  const auto r = run("eval --checkpoint " + ck + " --out " + path("e"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("t+1"), std::string::npos) << r.output;
}

TEST_F(CliTest, EvalRejectsAMismatchedDimension) {
  const auto input = generated();
  const auto ck = train_small(input, path("t"));
  const auto r = run("eval --checkpoint " + ck + " --dim 8 --out " + path("e"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("dim"), std::string::npos) << r.output;
}

TEST_F(CliTest, GenerateDependsOnTheSeed) {
  ASSERT_EQ(run("generate --vertices 20 --blocks 10,10 --snapshots 3 --seed 1 --out " + path("a")).code, 0);
  ASSERT_EQ(run("generate --vertices 20 --blocks 10,10 --snapshots 3 --seed 1 --out " + path("b")).code, 0);
  ASSERT_EQ(run("generate --vertices 20 --blocks 10,10 --snapshots 3 --seed 2 --out " + path("c")).code, 0);
  EXPECT_EQ(slurp(path("a/edges.tsv")), slurp(path("b/edges.tsv")));
  EXPECT_NE(slurp(path("a/edges.tsv")), slurp(path("c/edges.tsv")));
  EXPECT_EQ(slurp(path("a/labels.tsv")).substr(0, 11), "0\t0\n1\t0\n2\t0");
}

TEST_F(CliTest, GenerateValidatesBlocks) {
  const auto r = run("generate --vertices 5 --blocks 3,3 --out " + path("g"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("blocks"), std::string::npos) << r.output;
  EXPECT_EQ(run("generate --vertices 5 --blocks 3,2 --snapshots 2 --out " + path("g")).code, 0);
}

TEST_F(CliTest, GradcheckPassesAndFailsOnTolerance) {
  const auto ok = run("gradcheck --dim 4");
  EXPECT_EQ(ok.code, 0) << ok.output;
  EXPECT_NE(ok.output.find("PASS"), std::string::npos);
  const auto strict = run("gradcheck --dim 4 --tolerance 1e-12");
  EXPECT_EQ(strict.code, 1) << strict.output;
  EXPECT_NE(strict.output.find("FAIL"), std::string::npos);
  EXPECT_EQ(run("gradcheck --dim 1").code, 0);
}

TEST_F(CliTest, InspectPrintsTheIntensityParts) {
  const auto input = generated();
  const auto ck = train_small(input, path("t"));
  const auto r = run("inspect --checkpoint " + ck + " --query_i 0 --query_j 1 --query_t 3");
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* s : {"base", "excitation", "raw", "transferred"}) EXPECT_NE(r.output.find(s), std::string::npos);
  EXPECT_EQ(run("inspect --checkpoint " + ck + " --query_i 0 --query_j 999 --query_t 3").code, 2);
}

TEST_F(CliTest, SweepWritesOneModelPerSetting) {
  const auto input = generated();
  const auto r = run("sweep --input " + input + " --dim 3 --epochs 1 --repeats 1 --sweep_kernels exponential,flat "
                     "--sweep_history 1,2 --out " + path("s"));
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* d : {"exponential_h1", "exponential_h2", "flat_h1", "flat_h2"}) {
    EXPECT_TRUE(fs::exists(dir_ / "s" / d / "checkpoint.txt")) << d;
  }
  const auto sweep = slurp(path("s/sweep.tsv"));
  EXPECT_EQ(sweep.rfind("kernel\thistory\ttask\tmetric\tk\tmean\tstd\n", 0), 0u);
  EXPECT_NE(sweep.find("flat\t2\tlink\tAUC"), std::string::npos);
}

}  // namespace
