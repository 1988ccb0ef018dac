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


// Test-only helpers: fixture locations, sentence builders and brute-force
// reference implementations that the library results are checked against.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "elg/corpus.hpp"
#include "elg/embeddings.hpp"
#include "elg/events.hpp"
#include "elg/graph.hpp"
#include "elg/predict.hpp"

namespace elg::testing {

std::filesystem::path source_dir();
std::filesystem::path data_dir();  // tests/data

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

// (form, lemma, upos, head, deprel); indices are assigned 1..n.
using TokenSpec = std::tuple<std::string, std::string, std::string, int, std::string>;
ParsedSentence make_sentence(const std::string& doc_id, int sent_index,
                             const std::vector<TokenSpec>& tokens);

// Occurrence of `key` alone in sentence `sent` at predicate position `pred`.
EventOccurrence occ(const std::string& key, const std::string& doc, int sent, int pred = 1);

// ---- counting oracle ------------------------------------------------------------

struct OracleMatch {
  EventOccurrence earlier;
  EventOccurrence later;
};

struct OracleCounts {
  std::map<std::string, long long> freq;
  std::map<std::pair<std::string, std::string>, long long> before;  // ordered (earlier, later)
  std::vector<OracleMatch> matches;
  long long n_events = 0;

  long long t2(const std::string& a, const std::string& b) const;
  long long f(const std::string& a) const;
};

// Recounts every unordered key pair on its own two-key subsequence: each
// occurrence takes the nearest earlier unmatched occurrence of the other key
// within the window.
OracleCounts brute_force_recount(const std::vector<DocumentEvents>& docs, int window);

// Table-2 vector for (a, b) computed directly from matches, the corpus and
// the raw vector table. Column order follows the library layout.
Eigen::VectorXd brute_force_features(const std::string& a, const std::string& b,
                                     const OracleCounts& counts, const ParsedCorpus& corpus,
                                     const EmbeddingTable& table,
                                     const std::vector<std::string>& pos_inventory);

// ---- graph oracles ---------------------------------------------------------------

// Mutual-reachability classes via per-node DFS; sorted like the library output.
std::vector<std::vector<int>> scc_oracle(int n, const std::vector<std::pair<int, int>>& arcs);

// Connected components of an undirected graph by repeated flooding.
std::vector<std::vector<int>> components_oracle(int n,
                                                const std::vector<std::pair<int, int>>& pairs);

// Random valid graph: `nodes` nodes with distinct keys, mixed relations,
// optional probabilities, links and meta.
ElgGraph random_graph(std::mt19937_64& rng, int nodes, int edges, int links);

// Graph over keys "s<i>|v<j>|o<k>" whose lemma vectors cluster around a few
// directions, so cosine merges happen at realistic thresholds.
struct MergeFixture {
  ElgGraph graph;
  EmbeddingTable table;
};
MergeFixture random_merge_fixture(std::mt19937_64& rng, int nodes, int edges);

// Clusters of node ids expected from merging at `tau`: components over pairs
// that share a slot lemma, both have a vector and reach cosine >= tau.
std::vector<std::vector<int>> merge_partition_oracle(const ElgGraph& graph,
                                                     const EmbeddingTable& table, double tau);

// ---- chains ---------------------------------------------------------------------

// Event stream of one chain, one event per sentence.
DocumentEvents chain_document(const std::string& doc_id, const std::vector<std::string>& events);

// Markov chains over events "e0".."e{v-1}": with probability `peak` the
// successor of e_i is e_{perm[i]}, otherwise uniform.
struct MarkovSource {
  std::vector<int> successor;
  int vocabulary = 0;
  double peak = 0.9;
  static MarkovSource make(int vocabulary, double peak, std::uint64_t seed);
  std::vector<std::string> sample(std::mt19937_64& rng, std::size_t length) const;
};

// Cycle b -> c -> d -> b entered from a; the context is (a, b, c) and the
// answer d competes with a decoy whose transition from c is within 0.05 of
// p(c -> d) (sometimes higher), so only the cycle bonus separates them
// reliably. Weak random edges from a and b pad the remaining candidates.
struct CycleBonusCase {
  ElgGraph graph;
  McncInstance instance;
};
CycleBonusCase cycle_bonus_case(std::mt19937_64& rng);

}  // namespace elg::testing
