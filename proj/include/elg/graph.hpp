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


// The event logic graph: merged event nodes, typed directed edges and
// undirected similarity links.

#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "elg/causality.hpp"
#include "elg/embeddings.hpp"
#include "elg/pairstats.hpp"

namespace elg {

enum class Relation { kSequential, kCausal, kConditional, kHypernym };
enum class HypernymSubtype { kNounal, kVerbal };

std::string to_string(Relation r);
Relation parse_relation(const std::string& name);
std::string to_string(HypernymSubtype s);
HypernymSubtype parse_subtype(const std::string& name);

struct EvidenceRef {
  std::string doc_id;
  int sent_index = 0;
  auto operator<=>(const EvidenceRef&) const = default;
};

struct EventNode {
  int id = 0;
  std::string canonical;
  std::set<std::string> surface_forms;  // always contains canonical
  long long frequency = 0;
  bool operator==(const EventNode&) const = default;
};

struct TypedEdge {
  int src = 0;
  int dst = 0;
  Relation relation = Relation::kSequential;
  std::optional<HypernymSubtype> subtype;
  long long support = 1;
  // Sequential edges only: directed co-occurrence count and its ratio to
  // the source frequency.
  std::optional<double> probability;
  long long directed_count = 0;
  std::vector<EvidenceRef> evidence;
  bool operator==(const TypedEdge&) const = default;
};

struct SimilarityLink {
  int a = 0;  // a < b
  int b = 0;
  double score = 0.0;
  bool operator==(const SimilarityLink&) const = default;
};

struct ElgGraph {
  std::vector<EventNode> nodes;  // nodes[i].id == i
  std::vector<TypedEdge> edges;  // sorted by (src, dst, relation, subtype)
  std::vector<SimilarityLink> links;
  std::map<std::string, std::string> meta;

  bool operator==(const ElgGraph&) const = default;
  // Throws DataError describing the first violated invariant.
  void validate() const;
};

// A curated edge of any relation, keyed by event keys.
struct CuratedEdge {
  std::string src;
  std::string dst;
  Relation relation = Relation::kConditional;
  std::optional<HypernymSubtype> subtype;
  long long support = 1;
};

// "src_key <TAB> dst_key <TAB> relation <TAB> subtype|- <TAB> support"
std::vector<CuratedEdge> parse_curated_edges(const std::string& text);

// A sequential pair after direction classification: edge from -> to.
struct DirectedPair {
  std::string from;
  std::string to;
};

struct GraphInputs {
  std::vector<DirectedPair> sequential;
  std::vector<CausalMention> causal;  // mentions lacking resolved events are skipped
  std::vector<CuratedEdge> curated;
  const PairCounts* counts = nullptr;
  const ContextIndex* contexts = nullptr;  // evidence for sequential edges
  std::size_t evidence_cap = 10;
};

// One node per distinct key (ids in key order). Sequential edges carry
// support = co-occurrence count and probability = count(from before to) /
// count(from). Throws DataError for a sequential pair absent from counts.
ElgGraph build_graph(const GraphInputs& inputs);

struct MergeOptions {
  double tau_merge = 0.85;
  double tau_link = 0.6;
  double max_missing_fraction = 0.5;
  std::size_t evidence_cap = 10;
};

struct MergeReport {
  std::size_t clusters_merged = 0;  // clusters with more than one member
  std::size_t dropped_self_loops = 0;
  long long dropped_self_loop_support = 0;
  std::size_t missing_vectors = 0;
  std::vector<std::string> warnings;
};

// Event streams for recounting sequential statistics under merged keys.
struct MergeRecount {
  std::span<const DocumentEvents> docs;
  CountOptions options;
};

// Union-find merge over cosine >= tau_merge among nodes sharing a slot
// lemma; pairs in [tau_link, tau_merge) become similarity links. With
// `recount`, sequential probabilities come from an exact recount under
// merged keys; without it they are the summed directed count over the
// merged frequency, capped at 1.
ElgGraph merge_similar_events(const ElgGraph& graph, const EmbeddingTable& table,
                              const MergeOptions& options = {},
                              MergeReport* report = nullptr,
                              const MergeRecount* recount = nullptr);

// Read-only lookup structure over a graph that must outlive it.
class GraphIndex {
 public:
  explicit GraphIndex(const ElgGraph& graph);

  const ElgGraph& graph() const { return *graph_; }
  // Canonical or surface-form key to node id.
  std::optional<int> find_key(const std::string& key) const;
  std::span<const std::size_t> out_edges(int node) const { return out_[node]; }
  std::span<const std::size_t> node_links(int node) const { return links_[node]; }
  const TypedEdge* find_edge(int src, int dst, Relation relation) const;

 private:
  const ElgGraph* graph_;
  std::unordered_map<std::string, int> keys_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> links_;
};

enum class NodeRole { kSeed, kEvolution, kSimilar };
std::string to_string(NodeRole role);

struct NeighborQuery {
  std::set<Relation> relations;  // empty = all
  int depth = 1;
  bool include_links = false;
  std::size_t top_k = 0;  // per expanded node; 0 = unlimited
};

struct Subgraph {
  struct Visit {
    int node;
    int hop;
    NodeRole role;
  };
  std::vector<Visit> nodes;          // visitation order, seed first
  std::vector<std::size_t> edges;    // indices into graph.edges
  std::vector<std::size_t> links;    // indices into graph.links
};

// BFS over outgoing edges (and links when requested). Successors are taken
// in (probability desc, support desc, node id) order. Throws NotFoundError
// for an unknown node and ConfigError for depth < 1.
Subgraph neighbors(const GraphIndex& index, int node_id, const NeighborQuery& query);

// Tarjan SCC over edges whose relation passes the filter (empty = all).
// Components are sorted internally and by their smallest member.
std::vector<std::vector<int>> strongly_connected_components(
    const ElgGraph& graph, const std::set<Relation>& relations = {});

// "ELG v1" text container terminated by a checksum line.
std::string serialize_graph(const ElgGraph& graph);
ElgGraph parse_graph(const std::string& text);
void save_graph(const ElgGraph& graph, const std::filesystem::path& path);
ElgGraph load_graph(const std::filesystem::path& path);

}  // namespace elg
