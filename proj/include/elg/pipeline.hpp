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


// Configuration and stage orchestration. Every stage reads the persisted
// artifacts of its predecessors and writes its own; a manifest of input
// hashes lets unchanged stages be skipped on rerun.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "elg/causality.hpp"
#include "elg/classifiers.hpp"
#include "elg/corpus.hpp"
#include "elg/embeddings.hpp"
#include "elg/events.hpp"
#include "elg/graph.hpp"
#include "elg/pairstats.hpp"
#include "elg/predict.hpp"
#include "elg/seqrel.hpp"
#include "elg/service.hpp"

namespace elg {

// INI file of [section] key = value lines. Relative paths resolve against
// the directory of the file. ELG_<SECTION>_<KEY> variables override entries.
class Config {
 public:
  Config() = default;
  static Config parse(const std::string& text, std::filesystem::path base_dir = ".");
  static Config load(const std::filesystem::path& path);

  using Env = std::vector<std::pair<std::string, std::string>>;
  static Env process_env();
  void apply_env(const Env& env);

  void set(const std::string& section, const std::string& key, const std::string& value);
  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback = "") const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& section, const std::string& key,
                                    const std::vector<std::string>& fallback = {}) const;
  // Empty path when unset; relative values are resolved against the base dir.
  std::filesystem::path get_path(const std::string& section, const std::string& key) const;

  // Canonical "key=value" lines of one section, for change detection.
  std::string section_text(const std::string& section) const;

 private:
  boost::property_tree::ptree tree_;
  std::filesystem::path base_ = ".";
};

CleanOptions clean_options(const Config& c);
SkipGramOptions skipgram_options(const Config& c);
CountOptions count_options(const Config& c);
Hyperparams hyperparams(const Config& c);
MergeOptions merge_options(const Config& c);
McncOptions mcnc_options(const Config& c);
ServiceConfig service_config(const Config& c);
// "all" or a number 1..15.
GroupMask parse_group_mask(const std::string& text);

struct SeqrelSettings {
  ClassifierKind kind = ClassifierKind::kLogistic;
  GroupMask mask = kAllGroups;
  Hyperparams hyper;
  CvOptions cv;
  long long min_pair_count = 1;
  bool evaluate = true;  // run cross-validation when annotations exist
};
SeqrelSettings seqrel_settings(const Config& c);

struct SeqrelOutcome {
  std::vector<DirectedPair> pairs;  // positive pairs in classified direction
  bool supervised = false;
  std::vector<ReportRow> relation_rows;
  std::vector<ReportRow> direction_rows;
  std::size_t candidates = 0;
};

// With annotations, trains relation and direction models on them and labels
// every candidate pair (co-occurring at least min_pair_count times). Without
// annotations every candidate is positive and oriented by the preceding
// assumption.
SeqrelOutcome classify_sequential(const PairCounts& counts, const ContextIndex& contexts,
                                  const EmbeddingTable& table,
                                  const std::vector<AnnotatedPair>* annotations,
                                  const SeqrelSettings& settings);

// Cross-validated rows for one task: the configured classifier plus the
// task's baseline.
std::vector<ReportRow> seqrel_cv_rows(std::span<const LabeledPair> labeled, Task task,
                                      const SeqrelSettings& settings);

// Records the counting window and, when given, the corpus file hash.
void stamp_graph_meta(ElgGraph& graph, const Config& config,
                      const std::filesystem::path& corpus = {});

std::string serialize_directed_pairs(std::span<const DirectedPair> pairs);
std::vector<DirectedPair> parse_directed_pairs(const std::string& text);

std::vector<CausalMention> extract_causal_mentions(const ParsedCorpus& corpus,
                                                   std::span<const CausalRule> rules);

// Scorers by name: random, pmi, bigram, embedding, graph. Resources a scorer
// needs must be non-null, otherwise ConfigError.
std::unique_ptr<Scorer> make_scorer(const std::string& name, std::uint64_t seed,
                                    const PairCounts* counts, const EmbeddingTable* table,
                                    const ElgGraph* graph);

inline const std::vector<std::string> kPipelineStages = {
    "ingest", "extract", "count", "embed", "classify",
    "causality", "build", "merge", "evaluate"};

struct Artifacts {
  explicit Artifacts(std::filesystem::path dir);
  std::filesystem::path dir;
  std::filesystem::path corpus, events, counts, vectors, pairs, seqrel_report,
      seqrel_table, causal, causal_eval, graph_raw, graph, merge_report, mcnc, mcnc_report,
      mcnc_table, manifest;
};

struct StageReport {
  std::string stage;
  bool skipped = false;
  std::string summary;
};

// Runs the requested stages (empty = [pipeline] stages, default all) in
// dependency order. A missing upstream artifact raises DataError naming the
// stage that produces it. "serve" only checks that a graph exists; the
// caller starts the server.
std::vector<StageReport> run_pipeline(const Config& config,
                                      std::vector<std::string> stages = {},
                                      std::ostream* log = nullptr);

// Fails with a message naming `stage` when `path` is absent.
void require_artifact(const std::filesystem::path& path, const std::string& stage);

}  // namespace elg
