// Copyright 2026 The ELG Authors.
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

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "elg/graph.hpp"
#include "elg/util.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string output;  // stdout and stderr
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(ELG_CLI_PATH) + " " + args + " 2>&1";
  Outcome out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) out.output += buf.data();
  const int status = pclose(pipe);
  out.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(elg::testing::scratch_dir("cli_run"));
    const auto r = run("run --config " + q(elg::testing::source_dir() / "configs" / "fixture.ini") +
                       " --output " + q(*dir_));
    ASSERT_EQ(r.code, 0) << r.output;
  }
  static void TearDownTestSuite() { delete dir_; }
  static fs::path art(const std::string& name) { return *dir_ / name; }
  static fs::path data(const std::string& name) { return elg::testing::data_dir() / name; }

  static fs::path* dir_;
};

fs::path* Cli::dir_ = nullptr;

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("count --events").code, 1);
  EXPECT_EQ(run("train-seqrel --corpus a --events b --vectors c --annotations d --task sideways").code, 1);
  EXPECT_EQ(run("run").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, DataErrorsExitTwo) {
  auto missing = run("extract --corpus /nonexistent/c.conllu --out " + q(art("x.tsv")));
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.output.find("error"), std::string::npos);
  const fs::path bad = elg::testing::scratch_dir("cli_bad") / "bad.elg";
  elg::write_file(bad, "ELG v1\nnodes\tbroken\n");
  EXPECT_EQ(run("serve --graph " + q(bad) + " --port 0 --max-seconds 1").code, 2);
}

TEST_F(Cli, ExtractCountFeatures) {
  const fs::path d = elg::testing::scratch_dir("cli_steps");
  auto ex = run("extract --corpus " + q(data("restaurant.conllu")) + " --out " + q(d / "ev.tsv") +
                " --clean-out " + q(d / "clean.conllu") + " --blacklist " +
                q(elg::testing::source_dir() / "data" / "generality_blacklist.txt"));
  ASSERT_EQ(ex.code, 0) << ex.output;
  EXPECT_EQ(elg::read_file(d / "ev.tsv"), elg::read_file(art("events.tsv")));
  auto co = run("count --corpus " + q(d / "clean.conllu") + " --events " + q(d / "ev.tsv") +
                " --out " + q(d / "counts.tsv") + " --window 5");
  ASSERT_EQ(co.code, 0) << co.output;
  EXPECT_EQ(elg::read_file(d / "counts.tsv"), elg::read_file(art("counts.tsv")));
  auto fe = run("features --corpus " + q(d / "clean.conllu") + " --events " + q(d / "ev.tsv") +
                " --vectors " + q(art("vectors.txt")) + " --out " + q(d / "features.tsv"));
  ASSERT_EQ(fe.code, 0) << fe.output;
  const auto lines = elg::split(elg::read_file(d / "features.tsv"), '\n');
  EXPECT_GT(lines.size(), 50u);
}

TEST_F(Cli, EmbedIsDeterministic) {
  const fs::path d = elg::testing::scratch_dir("cli_embed");
  auto e = run("--config " + q(elg::testing::source_dir() / "configs" / "fixture.ini") +
               " embed --corpus " + q(art("corpus.conllu")) + " --out " + q(d / "v.txt"));
  ASSERT_EQ(e.code, 0) << e.output;
  EXPECT_EQ(elg::read_file(d / "v.txt"), elg::read_file(art("vectors.txt")));
}

TEST_F(Cli, TrainSeqrelDirectionSvm) {
  auto r = run("train-seqrel --corpus " + q(art("corpus.conllu")) + " --events " +
               q(art("events.tsv")) + " --vectors " + q(art("vectors.txt")) + " --annotations " +
               q(data("restaurant_pairs.tsv")) + " --task direction --classifier svm --folds 3 --repeats 1");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("svm"), std::string::npos);
  EXPECT_NE(r.output.find("Accuracy"), std::string::npos);
}

TEST_F(Cli, CausalityAgainstGold) {
  const fs::path d = elg::testing::scratch_dir("cli_causal");
  auto r = run("causality --rules " + q(elg::testing::source_dir() / "data" / "causal_rules.tsv") +
               " --gold " + q(data("causal_gold.conllu")) + " --bio-out " + q(d / "bio.txt"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("100.00"), std::string::npos) << r.output;
  EXPECT_TRUE(fs::exists(d / "bio.txt"));
}

TEST_F(Cli, BuildMergeMatchPipeline) {
  const fs::path d = elg::testing::scratch_dir("cli_graph");
  const std::string cfg = "--config " + q(elg::testing::source_dir() / "configs" / "fixture.ini") + " ";
  auto b = run(cfg + "build-graph --counts " + q(art("counts.tsv")) + " --pairs " +
               q(art("sequential_pairs.tsv")) + " --causal " + q(art("causal_mentions.tsv")) +
               " --corpus " + q(art("corpus.conllu")) + " --events " + q(art("events.tsv")) +
               " --out " + q(d / "raw.elg"));
  ASSERT_EQ(b.code, 0) << b.output;
  EXPECT_EQ(elg::load_graph(d / "raw.elg"), elg::load_graph(art("graph_raw.elg")));
  auto m = run(cfg + "merge --graph " + q(d / "raw.elg") + " --vectors " + q(art("vectors.txt")) +
               " --events " + q(art("events.tsv")) + " --out " + q(d / "merged.elg"));
  ASSERT_EQ(m.code, 0) << m.output;
  EXPECT_EQ(elg::load_graph(d / "merged.elg"), elg::load_graph(art("graph.elg")));
}

TEST_F(Cli, McncAndReport) {
  const fs::path d = elg::testing::scratch_dir("cli_mcnc");
  const std::string cfg = "--config " + q(elg::testing::source_dir() / "configs" / "fixture.ini") + " ";
  auto g = run(cfg + "mcnc --events " + q(art("events.tsv")) + " --counts " + q(art("counts.tsv")) +
               " --out " + q(d / "inst.tsv"));
  ASSERT_EQ(g.code, 0) << g.output;
  EXPECT_EQ(elg::read_file(d / "inst.tsv"), elg::read_file(art("mcnc_instances.tsv")));
  auto r = run("report --compare random,pmi,bigram,graph --instances " + q(d / "inst.tsv") +
               " --counts " + q(art("counts.tsv")) + " --vectors " + q(art("vectors.txt")) +
               " --graph " + q(art("graph.elg")) + " --out " + q(d / "report.tsv"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("Methods"), std::string::npos);
  EXPECT_NE(r.output.find("bigram"), std::string::npos);
  auto needs_graph = run("report --compare graph --instances " + q(d / "inst.tsv"));
  EXPECT_EQ(needs_graph.code, 1) << needs_graph.output;
}

TEST_F(Cli, ServeAnnouncesPort) {
  auto r = run("serve --graph " + q(art("graph.elg")) + " --port 0 --max-seconds 1");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("listening on http://127.0.0.1:"), std::string::npos) << r.output;
}

TEST_F(Cli, RunResumesAndNamesMissingStage) {
  auto again = run("run --config " + q(elg::testing::source_dir() / "configs" / "fixture.ini") +
                   " --output " + q(*dir_));
  ASSERT_EQ(again.code, 0);
  EXPECT_NE(again.output.find("[merge] skipped"), std::string::npos) << again.output;
  const fs::path empty = elg::testing::scratch_dir("cli_empty");
  auto serve = run("run --config " + q(elg::testing::source_dir() / "configs" / "fixture.ini") +
                   " --output " + q(empty) + " --stages serve");
  EXPECT_EQ(serve.code, 2);
  EXPECT_NE(serve.output.find("'build'"), std::string::npos) << serve.output;
}

}  // namespace
