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


#include "elg/graph.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <tuple>

#include "elg/error.hpp"
#include "elg/util.hpp"

namespace elg {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::kSequential: return "sequential";
    case Relation::kCausal: return "causal";
    case Relation::kConditional: return "conditional";
    case Relation::kHypernym: return "hypernym-hyponym";
  }
  return "?";
}

Relation parse_relation(const std::string& name) {
  if (name == "sequential") return Relation::kSequential;
  if (name == "causal") return Relation::kCausal;
  if (name == "conditional") return Relation::kConditional;
  if (name == "hypernym-hyponym" || name == "hypernym") return Relation::kHypernym;
  throw DataError("unknown relation '" + name + "'");
}

std::string to_string(HypernymSubtype s) {
  return s == HypernymSubtype::kNounal ? "nounal" : "verbal";
}

HypernymSubtype parse_subtype(const std::string& name) {
  if (name == "nounal") return HypernymSubtype::kNounal;
  if (name == "verbal") return HypernymSubtype::kVerbal;
  throw DataError("unknown hypernym subtype '" + name + "'");
}

std::string to_string(NodeRole role) {
  switch (role) {
    case NodeRole::kSeed: return "seed";
    case NodeRole::kEvolution: return "evolution";
    case NodeRole::kSimilar: return "similar";
  }
  return "?";
}

namespace {

using EdgeId = std::tuple<int, int, Relation, int>;  // subtype as -1/0/1

int subtype_code(const std::optional<HypernymSubtype>& s) {
  return s ? static_cast<int>(*s) : -1;
}

EdgeId edge_id(const TypedEdge& e) {
  return {e.src, e.dst, e.relation, subtype_code(e.subtype)};
}

void append_evidence(std::vector<EvidenceRef>& into, const std::vector<EvidenceRef>& from,
                     std::size_t cap) {
  for (const auto& ref : from) {
    if (into.size() >= cap) return;
    into.push_back(ref);
  }
}

// Accumulates edges keyed by (src, dst, relation, subtype).
class EdgeAccumulator {
 public:
  explicit EdgeAccumulator(std::size_t cap) : cap_(cap) {}

  TypedEdge& add(const TypedEdge& e) {
    auto [it, fresh] = edges_.try_emplace(edge_id(e), e);
    if (!fresh) {
      it->second.support += e.support;
      it->second.directed_count += e.directed_count;
      append_evidence(it->second.evidence, e.evidence, cap_);
    } else if (it->second.evidence.size() > cap_) {
      it->second.evidence.resize(cap_);
    }
    return it->second;
  }

  std::map<EdgeId, TypedEdge>& edges() { return edges_; }

 private:
  std::size_t cap_;
  std::map<EdgeId, TypedEdge> edges_;
};

void check_edge_shape(const TypedEdge& e) {
  const bool seq = e.relation == Relation::kSequential;
  if (seq != e.probability.has_value())
    throw DataError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                    ": probability must be present exactly for sequential edges");
  if (e.probability && !(*e.probability >= 0.0 && *e.probability <= 1.0))
    throw DataError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                    ": probability outside [0,1]");
  if (e.subtype && e.relation != Relation::kHypernym)
    throw DataError("subtype on a non hypernym-hyponym edge");
  if (e.support < 1) throw DataError("edge support must be >= 1");
}

}  // namespace

void ElgGraph::validate() const {
  std::set<std::string> seen_keys;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.id != static_cast<int>(i)) throw DataError("node ids are not dense");
    if (!n.surface_forms.count(n.canonical))
      throw DataError("node " + std::to_string(i) + ": canonical key not among surface forms");
    if (n.frequency < 0) throw DataError("negative node frequency");
    for (const auto& s : n.surface_forms)
      if (!seen_keys.insert(s).second)
        throw DataError("surface form '" + s + "' belongs to two nodes");
  }
  const int n = static_cast<int>(nodes.size());
  std::set<std::tuple<int, int, Relation>> triples;
  for (const auto& e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
      throw DataError("edge endpoint out of range");
    if (e.src == e.dst) throw DataError("self-loop on node " + std::to_string(e.src));
    check_edge_shape(e);
    if (!triples.insert({e.src, e.dst, e.relation}).second)
      throw DataError("duplicate edge " + std::to_string(e.src) + "->" +
                      std::to_string(e.dst) + " " + to_string(e.relation));
  }
  for (const auto& l : links) {
    if (l.a < 0 || l.b >= n || l.a >= l.b) throw DataError("malformed similarity link");
  }
}

std::vector<CuratedEdge> parse_curated_edges(const std::string& text) {
  std::vector<CuratedEdge> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto f = split(t, '\t');
    if (f.size() != 5)
      throw DataError("curated edges line " + std::to_string(lineno) + ": expected 5 fields");
    CuratedEdge e;
    e.src = f[0];
    e.dst = f[1];
    e.relation = parse_relation(f[2]);
    if (f[3] != "-") e.subtype = parse_subtype(f[3]);
    if (e.relation == Relation::kSequential)
      throw DataError("curated edges line " + std::to_string(lineno) +
                      ": sequential edges come from counts");
    if (e.subtype && e.relation != Relation::kHypernym)
      throw DataError("curated edges line " + std::to_string(lineno) +
                      ": subtype only applies to hypernym-hyponym");
    if (!parse_int(f[4], e.support) || e.support < 1)
      throw DataError("curated edges line " + std::to_string(lineno) + ": bad support");
    if (e.src == e.dst)
      throw DataError("curated edges line " + std::to_string(lineno) + ": self-loop");
    out.push_back(std::move(e));
  }
  return out;
}

ElgGraph build_graph(const GraphInputs& in) {
  if (!in.sequential.empty() && !in.counts)
    throw DataError("build_graph: sequential pairs need pair counts");

  std::set<std::string> keys;
  for (const auto& p : in.sequential) {
    if (!in.counts->has_pair(p.from, p.to))
      throw DataError("direction references unknown pair (" + p.from + ", " + p.to + ")");
    if (in.counts->event_count(p.from) == 0)
      throw DataError("no occurrences of event '" + p.from + "'");
    keys.insert(p.from);
    keys.insert(p.to);
  }
  std::vector<const CausalMention*> causal;
  for (const auto& m : in.causal) {
    if (!m.cause_event || !m.effect_event || *m.cause_event == *m.effect_event) continue;
    causal.push_back(&m);
    keys.insert(*m.cause_event);
    keys.insert(*m.effect_event);
  }
  for (const auto& c : in.curated) {
    keys.insert(c.src);
    keys.insert(c.dst);
  }

  ElgGraph g;
  std::map<std::string, int> id_of;
  for (const auto& k : keys) {
    EventNode node;
    node.id = static_cast<int>(g.nodes.size());
    node.canonical = k;
    node.surface_forms = {k};
    node.frequency = in.counts ? in.counts->event_count(k) : 0;
    id_of[k] = node.id;
    g.nodes.push_back(std::move(node));
  }

  EdgeAccumulator acc(in.evidence_cap);
  std::set<std::pair<std::string, std::string>> seq_seen;
  for (const auto& p : in.sequential) {
    // A pair listed twice is still one observation set.
    if (!seq_seen.insert({p.from, p.to}).second) continue;
    TypedEdge e;
    e.src = id_of.at(p.from);
    e.dst = id_of.at(p.to);
    e.relation = Relation::kSequential;
    e.support = in.counts->together(p.from, p.to);
    e.directed_count = in.counts->before(p.from, p.to);
    if (in.contexts) {
      auto it = in.contexts->find(make_pair_key(p.from, p.to));
      if (it != in.contexts->end())
        for (const auto& ctx : it->second) {
          if (e.evidence.size() >= in.evidence_cap) break;
          e.evidence.push_back({ctx.doc_id, ctx.first_sentence});
        }
    }
    acc.add(e);
  }
  for (const auto* m : causal) {
    TypedEdge e;
    e.src = id_of.at(*m->cause_event);
    e.dst = id_of.at(*m->effect_event);
    e.relation = Relation::kCausal;
    e.support = 1;
    e.evidence.push_back({m->doc_id, m->sent_index});
    acc.add(e);
  }
  for (const auto& c : in.curated) {
    TypedEdge e;
    e.src = id_of.at(c.src);
    e.dst = id_of.at(c.dst);
    e.relation = c.relation;
    e.subtype = c.subtype;
    e.support = c.support;
    acc.add(e);
  }
  for (auto& [id, e] : acc.edges()) {
    if (e.relation == Relation::kSequential)
      e.probability = static_cast<double>(e.directed_count) /
                      static_cast<double>(g.nodes[e.src].frequency);
    g.edges.push_back(std::move(e));
  }
  g.validate();
  return g;
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;  // smaller index is the root
  }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<std::string> slot_lemmas(const std::string& key) {
  EventTuple t = EventTuple::from_key(key);
  std::vector<std::string> out;
  for (const auto* slot : {&t.subject, &t.predicate, &t.object})
    out.insert(out.end(), slot->begin(), slot->end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

ElgGraph merge_similar_events(const ElgGraph& graph, const EmbeddingTable& table,
                              const MergeOptions& options, MergeReport* report,
                              const MergeRecount* recount) {
  if (!(options.tau_link > 0.0 && options.tau_link <= options.tau_merge &&
        options.tau_merge <= 1.0))
    throw ConfigError("merge thresholds must satisfy 0 < tau_link <= tau_merge <= 1");
  MergeReport local;
  MergeReport& rep = report ? *report : local;
  rep = MergeReport{};

  const std::size_t n = graph.nodes.size();
  std::vector<EventVector> vecs;
  vecs.reserve(n);
  for (const auto& node : graph.nodes) {
    vecs.push_back(embed_event(node.canonical, table));
    if (vecs.back().oov) ++rep.missing_vectors;
  }
  if (n > 0 && static_cast<double>(rep.missing_vectors) / static_cast<double>(n) >
                   options.max_missing_fraction)
    rep.warnings.push_back(std::to_string(rep.missing_vectors) + " of " + std::to_string(n) +
                           " nodes have no vector and are left unmerged");

  // Candidate blocking: nodes sharing any slot lemma.
  std::map<std::string, std::vector<std::size_t>> block;
  for (std::size_t i = 0; i < n; ++i) {
    if (vecs[i].oov) continue;
    for (const auto& lemma : slot_lemmas(graph.nodes[i].canonical)) block[lemma].push_back(i);
  }
  std::set<std::pair<std::size_t, std::size_t>> candidates;
  for (const auto& [lemma, members] : block)
    for (std::size_t x = 0; x < members.size(); ++x)
      for (std::size_t y = x + 1; y < members.size(); ++y)
        candidates.insert({members[x], members[y]});

  UnionFind uf(n);
  std::vector<std::tuple<std::size_t, std::size_t, double>> near;
  for (const auto& [i, j] : candidates) {
    const double c = cosine(vecs[i].vec, vecs[j].vec);
    if (c >= options.tau_merge)
      uf.unite(i, j);
    else if (c >= options.tau_link)
      near.emplace_back(i, j, c);
  }

  // Clusters keyed by root, which is the minimum member id.
  std::map<std::size_t, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters[uf.find(i)].push_back(i);

  ElgGraph out;
  out.meta = graph.meta;
  out.meta["tau_merge"] = format_double(options.tau_merge);
  out.meta["tau_link"] = format_double(options.tau_link);
  std::vector<int> new_id(n);
  for (const auto& [root, members] : clusters) {
    EventNode node;
    node.id = static_cast<int>(out.nodes.size());
    const EventNode* best = nullptr;
    for (std::size_t m : members) {
      const auto& old = graph.nodes[m];
      new_id[m] = node.id;
      node.frequency += old.frequency;
      node.surface_forms.insert(old.surface_forms.begin(), old.surface_forms.end());
      if (!best || old.frequency > best->frequency ||
          (old.frequency == best->frequency && old.canonical < best->canonical))
        best = &old;
    }
    node.canonical = best->canonical;
    if (members.size() > 1) ++rep.clusters_merged;
    out.nodes.push_back(std::move(node));
  }

  std::optional<PairCounts> merged_counts;
  if (recount) {
    std::map<std::string, std::string> to_canonical;
    for (const auto& node : out.nodes)
      for (const auto& s : node.surface_forms) to_canonical[s] = node.canonical;
    std::vector<DocumentEvents> relabeled(recount->docs.begin(), recount->docs.end());
    for (auto& doc : relabeled)
      for (auto& occ : doc.events) {
        auto it = to_canonical.find(occ.event);
        if (it != to_canonical.end()) occ.event = it->second;
      }
    merged_counts = count_pairs(relabeled, recount->options);
  }

  EdgeAccumulator acc(options.evidence_cap);
  for (const auto& e : graph.edges) {
    TypedEdge moved = e;
    moved.src = new_id[e.src];
    moved.dst = new_id[e.dst];
    if (moved.src == moved.dst) {
      ++rep.dropped_self_loops;
      rep.dropped_self_loop_support += e.support;
      continue;
    }
    acc.add(moved);
  }
  for (auto& [id, e] : acc.edges()) {
    if (e.relation == Relation::kSequential) {
      const auto& src = out.nodes[e.src];
      const auto& dst = out.nodes[e.dst];
      double p = 0.0;
      if (merged_counts && merged_counts->event_count(src.canonical) > 0) {
        p = static_cast<double>(merged_counts->before(src.canonical, dst.canonical)) /
            static_cast<double>(merged_counts->event_count(src.canonical));
      } else if (src.frequency > 0) {
        p = static_cast<double>(e.directed_count) / static_cast<double>(src.frequency);
      }
      e.probability = std::clamp(p, 0.0, 1.0);
    }
    out.edges.push_back(std::move(e));
  }

  std::map<std::pair<int, int>, double> link_score;
  auto offer = [&](int a, int b, double s) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    auto [it, fresh] = link_score.try_emplace({a, b}, s);
    if (!fresh) it->second = std::max(it->second, s);
  };
  for (const auto& l : graph.links) offer(new_id[l.a], new_id[l.b], l.score);
  for (const auto& [i, j, c] : near) offer(new_id[i], new_id[j], c);
  for (const auto& [ab, s] : link_score) out.links.push_back({ab.first, ab.second, s});

  out.validate();
  return out;
}

GraphIndex::GraphIndex(const ElgGraph& graph)
    : graph_(&graph), out_(graph.nodes.size()), links_(graph.nodes.size()) {
  for (const auto& node : graph.nodes)
    for (const auto& s : node.surface_forms) keys_.emplace(s, node.id);
  for (std::size_t i = 0; i < graph.edges.size(); ++i) out_[graph.edges[i].src].push_back(i);
  for (std::size_t i = 0; i < graph.links.size(); ++i) {
    links_[graph.links[i].a].push_back(i);
    links_[graph.links[i].b].push_back(i);
  }
}

std::optional<int> GraphIndex::find_key(const std::string& key) const {
  auto it = keys_.find(key);
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

const TypedEdge* GraphIndex::find_edge(int src, int dst, Relation relation) const {
  if (src < 0 || src >= static_cast<int>(out_.size())) return nullptr;
  for (std::size_t i : out_[src]) {
    const auto& e = graph_->edges[i];
    if (e.dst == dst && e.relation == relation) return &e;
  }
  return nullptr;
}

Subgraph neighbors(const GraphIndex& index, int node_id, const NeighborQuery& query) {
  const ElgGraph& g = index.graph();
  if (node_id < 0 || node_id >= static_cast<int>(g.nodes.size()))
    throw NotFoundError("unknown node " + std::to_string(node_id));
  if (query.depth < 1) throw ConfigError("depth must be >= 1");

  Subgraph sub;
  std::vector<char> seen(g.nodes.size(), 0);
  seen[node_id] = 1;
  sub.nodes.push_back({node_id, 0, NodeRole::kSeed});
  std::vector<int> frontier{node_id};
  std::set<std::size_t> edge_set, link_set;

  for (int hop = 1; hop <= query.depth && !frontier.empty(); ++hop) {
    std::vector<int> next;
    for (int u : frontier) {
      std::vector<std::size_t> cand;
      for (std::size_t ei : index.out_edges(u))
        if (query.relations.empty() || query.relations.count(g.edges[ei].relation))
          cand.push_back(ei);
      std::stable_sort(cand.begin(), cand.end(), [&](std::size_t x, std::size_t y) {
        const auto& a = g.edges[x];
        const auto& b = g.edges[y];
        const double pa = a.probability.value_or(-1.0), pb = b.probability.value_or(-1.0);
        if (pa != pb) return pa > pb;
        if (a.support != b.support) return a.support > b.support;
        if (a.dst != b.dst) return a.dst < b.dst;
        return a.relation < b.relation;
      });
      if (query.top_k > 0 && cand.size() > query.top_k) cand.resize(query.top_k);
      for (std::size_t ei : cand) {
        const int v = g.edges[ei].dst;
        edge_set.insert(ei);
        if (!seen[v]) {
          seen[v] = 1;
          sub.nodes.push_back({v, hop, NodeRole::kEvolution});
          next.push_back(v);
        }
      }
      if (query.include_links) {
        std::vector<std::size_t> lc(index.node_links(u).begin(), index.node_links(u).end());
        std::stable_sort(lc.begin(), lc.end(), [&](std::size_t x, std::size_t y) {
          const auto& a = g.links[x];
          const auto& b = g.links[y];
          if (a.score != b.score) return a.score > b.score;
          const int oa = a.a == u ? a.b : a.a, ob = b.a == u ? b.b : b.a;
          return oa < ob;
        });
        if (query.top_k > 0 && lc.size() > query.top_k) lc.resize(query.top_k);
        for (std::size_t li : lc) {
          const int v = g.links[li].a == u ? g.links[li].b : g.links[li].a;
          link_set.insert(li);
          if (!seen[v]) {
            seen[v] = 1;
            sub.nodes.push_back({v, hop, NodeRole::kSimilar});
            next.push_back(v);
          }
        }
      }
    }
    frontier = std::move(next);
  }
  sub.edges.assign(edge_set.begin(), edge_set.end());
  sub.links.assign(link_set.begin(), link_set.end());
  return sub;
}

std::vector<std::vector<int>> strongly_connected_components(
    const ElgGraph& graph, const std::set<Relation>& relations) {
  const int n = static_cast<int>(graph.nodes.size());
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : graph.edges)
    if (relations.empty() || relations.count(e.relation)) adj[e.src].push_back(e.dst);

  // Iterative Tarjan.
  std::vector<int> idx(n, -1), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::vector<int>> comps;
  int counter = 0;
  std::vector<std::pair<int, std::size_t>> call;
  for (int s = 0; s < n; ++s) {
    if (idx[s] != -1) continue;
    call.push_back({s, 0});
    idx[s] = low[s] = counter++;
    stack.push_back(s);
    on_stack[s] = 1;
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next < adj[v].size()) {
        const int w = adj[v][next++];
        if (idx[w] == -1) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
        continue;
      }
      const int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == idx[done]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

namespace {

constexpr std::string_view kHeader = "ELG v1";

bool has_tab_or_newline(const std::string& s) {
  return s.find_first_of("\t\n\r") != std::string::npos;
}

void check_field(const std::string& s, const char* what) {
  if (s.empty() || has_tab_or_newline(s))
    throw DataError(std::string("cannot serialize ") + what + " '" + s + "'");
}

}  // namespace

std::string serialize_graph(const ElgGraph& g) {
  g.validate();
  std::string body;
  body.append(kHeader).append("\n");
  body += "meta\t" + std::to_string(g.meta.size()) + "\n";
  for (const auto& [k, v] : g.meta) {
    check_field(k, "meta key");
    if (has_tab_or_newline(v)) throw DataError("cannot serialize meta value for " + k);
    body += k + "\t" + v + "\n";
  }
  body += "nodes\t" + std::to_string(g.nodes.size()) + "\n";
  for (const auto& n : g.nodes) {
    body += std::to_string(n.id) + "\t" + n.canonical + "\t" + std::to_string(n.frequency) +
            "\t" + std::to_string(n.surface_forms.size());
    for (const auto& s : n.surface_forms) {
      check_field(s, "event key");
      body += "\t" + s;
    }
    body += "\n";
  }
  body += "edges\t" + std::to_string(g.edges.size()) + "\n";
  for (const auto& e : g.edges) {
    body += std::to_string(e.src) + "\t" + std::to_string(e.dst) + "\t" +
            to_string(e.relation) + "\t" + (e.subtype ? to_string(*e.subtype) : "-") + "\t" +
            std::to_string(e.support) + "\t" +
            (e.probability ? format_double(*e.probability) : "-") + "\t" +
            std::to_string(e.directed_count) + "\t" + std::to_string(e.evidence.size());
    for (const auto& r : e.evidence) {
      check_field(r.doc_id, "doc id");
      body += "\t" + r.doc_id + "\t" + std::to_string(r.sent_index);
    }
    body += "\n";
  }
  body += "links\t" + std::to_string(g.links.size()) + "\n";
  for (const auto& l : g.links)
    body += std::to_string(l.a) + "\t" + std::to_string(l.b) + "\t" + format_double(l.score) +
            "\n";
  body += "end\t" + hex64(fnv1a(body)) + "\n";
  return body;
}

namespace {

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  std::size_t offset() const { return pos_; }

  std::string line() {
    if (eof()) throw CorruptionError("graph file truncated at line " + std::to_string(lineno_ + 1));
    const auto nl = text_.find('\n', pos_);
    if (nl == std::string::npos)
      throw CorruptionError("graph file truncated at line " + std::to_string(lineno_ + 1));
    std::string out = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++lineno_;
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw CorruptionError("graph file line " + std::to_string(lineno_) + ": " + what);
  }

  long long integer(const std::string& f) const {
    long long v;
    if (!parse_int(f, v)) fail("bad integer '" + f + "'");
    return v;
  }

  std::size_t section(const std::string& name) {
    auto f = split(line(), '\t');
    if (f.size() != 2 || f[0] != name) fail("expected section '" + name + "'");
    const long long v = integer(f[1]);
    if (v < 0) fail("negative count");
    return static_cast<std::size_t>(v);
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
  int lineno_ = 0;
};

}  // namespace

ElgGraph parse_graph(const std::string& text) {
  Reader r(text);
  const std::string header = r.line();
  if (header != kHeader) {
    if (starts_with(header, "ELG v"))
      throw CorruptionError("unsupported graph format version '" + header + "'");
    throw CorruptionError("not a graph file");
  }
  ElgGraph g;
  const std::size_t n_meta = r.section("meta");
  for (std::size_t i = 0; i < n_meta; ++i) {
    const std::string l = r.line();
    const auto tab = l.find('\t');
    if (tab == std::string::npos) r.fail("bad meta line");
    g.meta[l.substr(0, tab)] = l.substr(tab + 1);
  }
  const std::size_t n_nodes = r.section("nodes");
  for (std::size_t i = 0; i < n_nodes; ++i) {
    auto f = split(r.line(), '\t');
    if (f.size() < 4) r.fail("bad node line");
    EventNode n;
    n.id = static_cast<int>(r.integer(f[0]));
    n.canonical = f[1];
    n.frequency = r.integer(f[2]);
    const long long k = r.integer(f[3]);
    if (k < 1 || f.size() != static_cast<std::size_t>(4 + k)) r.fail("bad surface form count");
    n.surface_forms.insert(f.begin() + 4, f.end());
    g.nodes.push_back(std::move(n));
  }
  const std::size_t n_edges = r.section("edges");
  for (std::size_t i = 0; i < n_edges; ++i) {
    auto f = split(r.line(), '\t');
    if (f.size() < 8) r.fail("bad edge line");
    TypedEdge e;
    e.src = static_cast<int>(r.integer(f[0]));
    e.dst = static_cast<int>(r.integer(f[1]));
    try {
      e.relation = parse_relation(f[2]);
      if (f[3] != "-") e.subtype = parse_subtype(f[3]);
    } catch (const DataError& err) {
      r.fail(err.what());
    }
    e.support = r.integer(f[4]);
    if (f[5] != "-") {
      double p;
      if (!parse_double(f[5], p)) r.fail("bad probability");
      e.probability = p;
    }
    e.directed_count = r.integer(f[6]);
    const long long k = r.integer(f[7]);
    if (k < 0 || f.size() != static_cast<std::size_t>(8 + 2 * k)) r.fail("bad evidence count");
    for (long long j = 0; j < k; ++j)
      e.evidence.push_back({f[8 + 2 * j], static_cast<int>(r.integer(f[9 + 2 * j]))});
    g.edges.push_back(std::move(e));
  }
  const std::size_t n_links = r.section("links");
  for (std::size_t i = 0; i < n_links; ++i) {
    auto f = split(r.line(), '\t');
    if (f.size() != 3) r.fail("bad link line");
    SimilarityLink l;
    l.a = static_cast<int>(r.integer(f[0]));
    l.b = static_cast<int>(r.integer(f[1]));
    if (!parse_double(f[2], l.score)) r.fail("bad link score");
    g.links.push_back(l);
  }
  const std::size_t body_end = r.offset();
  auto f = split(r.line(), '\t');
  if (f.size() != 2 || f[0] != "end") r.fail("missing end marker");
  if (f[1] != hex64(fnv1a(std::string_view(text).substr(0, body_end))))
    throw CorruptionError("graph file checksum mismatch");
  if (!r.eof()) r.fail("trailing data after end marker");
  try {
    g.validate();
  } catch (const CorruptionError&) {
    throw;
  } catch (const DataError& err) {
    throw CorruptionError(std::string("graph file inconsistent: ") + err.what());
  }
  return g;
}

void save_graph(const ElgGraph& graph, const std::filesystem::path& path) {
  write_file(path, serialize_graph(graph));
}

ElgGraph load_graph(const std::filesystem::path& path) {
  return parse_graph(read_file(path));
}

}  // namespace elg
