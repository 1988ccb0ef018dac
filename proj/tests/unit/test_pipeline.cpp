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

#include <sstream>

#include "elg/error.hpp"
#include "elg/pipeline.hpp"
#include "elg/util.hpp"
#include "oracles.hpp"

namespace elg {
namespace {

namespace fs = std::filesystem;

Config fixture_config(const fs::path& out) {
  Config c = Config::load(testing::source_dir() / "configs" / "fixture.ini");
  c.set("paths", "output", out.string());
  return c;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file()) out[entry.path().filename().string()] = read_file(entry.path());
  return out;
}

TEST(ConfigFile, ParsesTypesAndPaths) {
  Config c = Config::parse("[a]\nn = 3\nx = 0.5\nflag = yes\nlist = p, q ,r\nfile = sub/f.txt\n"
                           "abs = /tmp/z\n; comment\n",
                           "/base");
  EXPECT_EQ(c.get_int("a", "n", 0), 3);
  EXPECT_EQ(c.get_double("a", "x", 0), 0.5);
  EXPECT_TRUE(c.get_bool("a", "flag", false));
  EXPECT_EQ(c.get_list("a", "list"), (std::vector<std::string>{"p", "q", "r"}));
  EXPECT_EQ(c.get_path("a", "file"), fs::path("/base/sub/f.txt"));
  EXPECT_EQ(c.get_path("a", "abs"), fs::path("/tmp/z"));
  EXPECT_EQ(c.get_path("a", "missing"), fs::path());
  EXPECT_EQ(c.get_int("a", "missing", 9), 9);
  EXPECT_THROW(c.get_int("a", "x", 0), ConfigError);
  EXPECT_THROW(Config::load("/nonexistent/x.ini"), IoError);
}

TEST(ConfigFile, EnvironmentOverrides) {
  Config c = Config::parse("[count]\nwindow = 5\n");
  c.apply_env({{"ELG_COUNT_WINDOW", "2"}, {"ELG_EMBED_DIM", "8"}, {"OTHER", "1"}});
  EXPECT_EQ(c.get_int("count", "window", 0), 2);
  EXPECT_EQ(c.get_int("embed", "dim", 0), 8);
  EXPECT_EQ(count_options(c).window_sentences, 2);
}

TEST(ConfigFile, TypedOptionViews) {
  Config c = Config::load(testing::source_dir() / "configs" / "fixture.ini");
  EXPECT_EQ(skipgram_options(c).dim, 16);
  EXPECT_EQ(merge_options(c).tau_merge, 0.97);
  EXPECT_EQ(mcnc_options(c).n_candidates, 5u);
  EXPECT_EQ(parse_group_mask("all"), kAllGroups);
  EXPECT_EQ(parse_group_mask("2"), 2u);
  EXPECT_THROW(parse_group_mask("16"), ConfigError);
  EXPECT_THROW(parse_group_mask("0"), ConfigError);
  Config bad = Config::parse("[merge]\ntau_merge = 0.5\ntau_link = 0.8\n");
  EXPECT_THROW(merge_options(bad), ConfigError);
}

TEST(Pipeline, DeterministicAndResumable) {
  const fs::path a = testing::scratch_dir("pipeline_a"), b = testing::scratch_dir("pipeline_b");
  std::ostringstream log;
  auto first = run_pipeline(fixture_config(a), {}, &log);
  ASSERT_EQ(first.size(), kPipelineStages.size());
  for (const auto& r : first) EXPECT_FALSE(r.skipped) << r.stage;
  run_pipeline(fixture_config(b));
  auto ta = read_tree(a), tb = read_tree(b);
  EXPECT_GE(ta.size(), 15u);
  ASSERT_EQ(ta.size(), tb.size());
  for (const auto& [name, bytes] : ta) EXPECT_EQ(bytes, tb[name]) << name;

  auto again = run_pipeline(fixture_config(a));
  for (const auto& r : again) EXPECT_TRUE(r.skipped) << r.stage;
  EXPECT_EQ(read_tree(a), ta);

  // Changing one section reruns that stage and everything downstream that
  // sees a different input.
  Config changed = fixture_config(a);
  changed.set("mcnc", "seed", "4");
  auto partial = run_pipeline(changed);
  for (const auto& r : partial) EXPECT_EQ(r.skipped, r.stage != "evaluate") << r.stage;

  ElgGraph g = load_graph(a / "graph.elg");
  EXPECT_GT(g.nodes.size(), 10u);
  EXPECT_GT(g.edges.size(), 20u);
}

TEST(Pipeline, MissingArtifactNamesProducer) {
  const fs::path out = testing::scratch_dir("pipeline_missing");
  for (const auto& [stage, producer] : std::vector<std::pair<std::string, std::string>>{
           {"extract", "ingest"}, {"count", "extract"}, {"merge", "build"}}) {
    if (stage == "count") run_pipeline(fixture_config(out), {"ingest"});
    try {
      run_pipeline(fixture_config(out), {stage});
      FAIL() << stage;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find("'" + producer + "'"), std::string::npos) << e.what();
    }
  }
  try {
    run_pipeline(fixture_config(out), {"serve"});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("build"), std::string::npos) << e.what();
  }
  EXPECT_THROW(run_pipeline(fixture_config(out), {"bake"}), ConfigError);
}

TEST(Pipeline, MissingCorpusIsIoError) {
  Config c = fixture_config(testing::scratch_dir("pipeline_nocorpus"));
  c.set("paths", "corpus", "/nonexistent/corpus.conllu");
  EXPECT_THROW(run_pipeline(c, {"ingest"}), IoError);
}

TEST(Pipeline, WithoutAnnotationsUsesTextOrder) {
  const fs::path out = testing::scratch_dir("pipeline_unsup");
  Config c = fixture_config(out);
  c.set("paths", "annotations", "");
  run_pipeline(c, {"ingest", "extract", "count", "embed", "classify"});
  auto pairs = parse_directed_pairs(read_file(out / "sequential_pairs.tsv"));
  PairCounts counts = PairCounts::parse(read_file(out / "counts.tsv"));
  EXPECT_FALSE(pairs.empty());
  for (const auto& p : pairs) EXPECT_GE(counts.before(p.from, p.to), counts.before(p.to, p.from));
}

TEST(Scorers, FactoryChecksResources) {
  EXPECT_NO_THROW(make_scorer("random", 1, nullptr, nullptr, nullptr));
  EXPECT_THROW(make_scorer("pmi", 1, nullptr, nullptr, nullptr), ConfigError);
  EXPECT_THROW(make_scorer("graph", 1, nullptr, nullptr, nullptr), ConfigError);
  EXPECT_THROW(make_scorer("oracle", 1, nullptr, nullptr, nullptr), ConfigError);
}

}  // namespace
}  // namespace elg
