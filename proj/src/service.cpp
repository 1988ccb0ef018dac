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


#include "elg/service.hpp"

#include <algorithm>

#include "elg/error.hpp"
#include "elg/util.hpp"

namespace elg {

using nlohmann::json;

void ServiceConfig::validate() const {
  if (node_cap < 1) throw ConfigError("service node_cap must be >= 1");
  if (max_depth < 1) throw ConfigError("service max_depth must be >= 1");
  if (default_limit < 1) throw ConfigError("service default_limit must be >= 1");
  if (port < 0 || port > 65535) throw ConfigError("service port out of range");
}

struct QueryService::Snapshot {
  std::shared_ptr<const ElgGraph> graph;
  std::shared_ptr<const ParsedCorpus> corpus;
  GraphIndex index;

  Snapshot(std::shared_ptr<const ElgGraph> g, std::shared_ptr<const ParsedCorpus> c)
      : graph(std::move(g)), corpus(std::move(c)), index(*graph) {}
};

namespace {

HttpResult error(int status, const std::string& message) {
  return {status, json{{"error", message}}};
}

// Strict non-negative integer parameter; nullopt when absent.
std::optional<long long> int_param(const QueryParams& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end() || it->second.empty()) return std::nullopt;
  long long v;
  if (!parse_int(it->second, v) || v < 0)
    throw DataError("parameter '" + name + "' must be a non-negative integer");
  return v;
}

std::string str_param(const QueryParams& params, const std::string& name) {
  auto it = params.find(name);
  return it == params.end() ? std::string() : it->second;
}

json node_json(const EventNode& n) {
  return json{{"node_id", n.id},
              {"canonical", n.canonical},
              {"frequency", n.frequency},
              {"surface_forms", std::vector<std::string>(n.surface_forms.begin(),
                                                         n.surface_forms.end())}};
}

json edge_json(const TypedEdge& e) {
  json j{{"src", e.src},
         {"dst", e.dst},
         {"relation", to_string(e.relation)},
         {"support", e.support},
         {"probability", e.probability ? json(*e.probability) : json(nullptr)}};
  if (e.subtype) j["subtype"] = to_string(*e.subtype);
  return j;
}

std::set<Relation> relation_filter(const std::string& text) {
  std::set<Relation> out;
  if (text.empty() || text == "all") return out;
  for (const auto& part : split(text, ',')) out.insert(parse_relation(std::string(trim(part))));
  return out;
}

}  // namespace

QueryService::QueryService(ServiceConfig config) : config_(std::move(config)) {
  config_.validate();
}

void QueryService::set_graph(std::shared_ptr<const ElgGraph> graph,
                             std::shared_ptr<const ParsedCorpus> corpus) {
  std::shared_ptr<const Snapshot> next;
  if (graph) next = std::make_shared<const Snapshot>(std::move(graph), std::move(corpus));
  std::lock_guard<std::mutex> lock(mu_);
  snap_ = std::move(next);
}

void QueryService::load_from_config() {
  if (config_.graph_path.empty()) throw ConfigError("no graph path configured");
  auto graph = std::make_shared<const ElgGraph>(load_graph(config_.graph_path));
  std::shared_ptr<const ParsedCorpus> corpus;
  if (!config_.corpus_path.empty()) {
    const auto fmt = config_.corpus_path.extension() == ".jsonl" ? CorpusFormat::kJsonl
                                                                 : CorpusFormat::kConllu;
    corpus = std::make_shared<const ParsedCorpus>(load_corpus(config_.corpus_path, fmt));
  }
  set_graph(std::move(graph), std::move(corpus));
}

bool QueryService::has_graph() const { return snapshot() != nullptr; }

std::shared_ptr<const QueryService::Snapshot> QueryService::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return snap_;
}

HttpResult QueryService::health() const {
  auto snap = snapshot();
  if (!snap) return {503, json{{"status", "unavailable"}, {"reason", "no graph loaded"}}};
  return {200, json{{"status", "ok"},
                    {"nodes", snap->graph->nodes.size()},
                    {"edges", snap->graph->edges.size()},
                    {"links", snap->graph->links.size()},
                    {"meta", snap->graph->meta}}};
}

HttpResult QueryService::search(const QueryParams& params) const {
  auto snap = snapshot();
  if (!snap) return error(503, "no graph loaded");
  const std::string q = to_lower(trim(str_param(params, "q")));
  if (q.empty()) return error(400, "parameter 'q' must be non-empty");
  std::size_t limit = config_.default_limit;
  try {
    if (auto v = int_param(params, "limit")) limit = static_cast<std::size_t>(*v);
  } catch (const DataError& e) {
    return error(400, e.what());
  }
  if (limit < 1) return error(400, "parameter 'limit' must be >= 1");
  limit = std::min(limit, config_.node_cap);

  // Query words may be separated by spaces or key punctuation.
  std::vector<std::string> words;
  std::string cur;
  for (char c : q) {
    if (c == ' ' || c == '|' || c == '_') {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) words.push_back(cur);

  struct Hit {
    int exact;
    long long freq;
    int id;
  };
  std::vector<Hit> hits;
  for (const auto& n : snap->graph->nodes) {
    bool exact = false, match = false;
    for (const auto& s : n.surface_forms) {
      if (s == q) exact = true;
      if (s.find(q) != std::string::npos) match = true;
      if (!match && !words.empty()) {
        const EventTuple t = EventTuple::from_key(s);
        std::set<std::string> lemmas;
        for (const auto* slot : {&t.subject, &t.predicate, &t.object})
          lemmas.insert(slot->begin(), slot->end());
        match = std::all_of(words.begin(), words.end(),
                            [&](const std::string& w) { return lemmas.count(w) > 0; });
      }
    }
    if (exact || match) hits.push_back({exact ? 0 : 1, n.frequency, n.id});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.exact != b.exact) return a.exact < b.exact;
    if (a.freq != b.freq) return a.freq > b.freq;
    return a.id < b.id;
  });
  if (hits.size() > limit) hits.resize(limit);
  json nodes = json::array();
  for (const auto& h : hits) nodes.push_back(node_json(snap->graph->nodes[h.id]));
  return {200, json{{"query", q}, {"nodes", nodes}}};
}

HttpResult QueryService::neighbors(const std::string& node_id, const QueryParams& params) const {
  auto snap = snapshot();
  if (!snap) return error(503, "no graph loaded");
  long long id;
  if (!parse_int(node_id, id)) return error(400, "node id must be an integer");
  if (id < 0 || id >= static_cast<long long>(snap->graph->nodes.size()))
    return error(404, "unknown node " + node_id);
  NeighborQuery query;
  try {
    query.relations = relation_filter(str_param(params, "relation"));
    if (auto v = int_param(params, "depth")) query.depth = static_cast<int>(std::min<long long>(*v, 1 << 20));
    if (auto v = int_param(params, "top_k")) query.top_k = static_cast<std::size_t>(*v);
    const std::string links = str_param(params, "links");
    if (links.empty() || links == "1" || links == "true") query.include_links = true;
    else if (links == "0" || links == "false") query.include_links = false;
    else return error(400, "parameter 'links' must be 0 or 1");
  } catch (const DataError& e) {
    return error(400, e.what());
  }
  if (query.depth < 1) return error(400, "parameter 'depth' must be >= 1");
  if (query.depth > config_.max_depth)
    return error(400, "depth " + std::to_string(query.depth) + " exceeds maximum " +
                          std::to_string(config_.max_depth));

  const Subgraph sub = elg::neighbors(snap->index, static_cast<int>(id), query);
  const auto& g = *snap->graph;
  const bool truncated = sub.nodes.size() > config_.node_cap;
  std::vector<char> present(g.nodes.size(), 0);
  json nodes = json::array();
  for (std::size_t i = 0; i < sub.nodes.size() && i < config_.node_cap; ++i) {
    const auto& v = sub.nodes[i];
    present[v.node] = 1;
    json j = node_json(g.nodes[v.node]);
    j["role"] = to_string(v.role);
    j["hop"] = v.hop;
    nodes.push_back(std::move(j));
  }
  json edges = json::array();
  for (std::size_t ei : sub.edges) {
    const auto& e = g.edges[ei];
    if (present[e.src] && present[e.dst]) edges.push_back(edge_json(e));
  }
  json links = json::array();
  for (std::size_t li : sub.links) {
    const auto& l = g.links[li];
    if (present[l.a] && present[l.b])
      links.push_back(json{{"a", l.a}, {"b", l.b}, {"score", l.score}});
  }
  return {200, json{{"seed", id},
                    {"nodes", nodes},
                    {"edges", edges},
                    {"links", links},
                    {"truncated", truncated}}};
}

HttpResult QueryService::edge_contexts(const QueryParams& params) const {
  auto snap = snapshot();
  if (!snap) return error(503, "no graph loaded");
  long long src = 0, dst = 0;
  Relation rel;
  try {
    auto s = int_param(params, "src");
    auto d = int_param(params, "dst");
    if (!s || !d) return error(400, "parameters 'src' and 'dst' are required");
    src = *s;
    dst = *d;
    const std::string r = str_param(params, "relation");
    if (r.empty()) return error(400, "parameter 'relation' is required");
    rel = parse_relation(r);
  } catch (const DataError& e) {
    return error(400, e.what());
  }
  const auto& g = *snap->graph;
  const int n = static_cast<int>(g.nodes.size());
  const TypedEdge* edge = src < n && dst < n
                              ? snap->index.find_edge(static_cast<int>(src), static_cast<int>(dst), rel)
                              : nullptr;
  if (!edge) return error(404, "no " + to_string(rel) + " edge " + std::to_string(src) + " -> " +
                                   std::to_string(dst));
  json contexts = json::array();
  for (const auto& ref : edge->evidence) {
    json c{{"doc_id", ref.doc_id}, {"sent_index", ref.sent_index}, {"text", nullptr}};
    if (snap->corpus)
      if (const ParsedSentence* s = snap->corpus->find(ref.doc_id, ref.sent_index))
        c["text"] = s->text();
    contexts.push_back(std::move(c));
  }
  json body = edge_json(*edge);
  body["src_event"] = g.nodes[edge->src].canonical;
  body["dst_event"] = g.nodes[edge->dst].canonical;
  body["contexts"] = contexts;
  return {200, body};
}

HttpResult QueryService::route(const std::string& path, const QueryParams& params) const {
  try {
    if (path == "/health") return health();
    if (path == "/events") return search(params);
    if (path == "/edges/contexts") return edge_contexts(params);
    const std::string prefix = "/events/", suffix = "/neighbors";
    if (starts_with(path, prefix) && path.size() > prefix.size() + suffix.size() &&
        path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
      const std::string id =
          path.substr(prefix.size(), path.size() - prefix.size() - suffix.size());
      return neighbors(id, params);
    }
    return error(404, "no route for " + path);
  } catch (const NotFoundError& e) {
    return error(404, e.what());
  } catch (const ConfigError& e) {
    return error(400, e.what());
  } catch (const DataError& e) {
    return error(400, e.what());
  }
}

}  // namespace elg
