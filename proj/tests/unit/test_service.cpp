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

#include <random>
#include <thread>

#include "elg/error.hpp"
#include "elg/service.hpp"
#include "elg/util.hpp"
#include "oracles.hpp"

// After Eigen: glibc resolver headers pulled in here define a _res macro.
#include <httplib.h>

namespace elg {
namespace {

using nlohmann::json;

// 0 seed with successors 1..3, a similarity link 0-4, causal edge 1 -> 5
// with two evidence refs, and a merged node 2 carrying an alias.
std::shared_ptr<const ElgGraph> demo_graph() {
  auto g = std::make_shared<ElgGraph>();
  const std::vector<std::string> keys{"price|rise|", "demand|fall|", "bank|cut|rate",
                                      "export|grow|", "cost|rise|", "bank|lend|"};
  for (int i = 0; i < 6; ++i) g->nodes.push_back({i, keys[i], {keys[i]}, 10 + i});
  g->nodes[2].surface_forms.insert("central_bank|cut|rate");
  auto seq = [](int s, int d, double p) {
    TypedEdge e;
    e.src = s;
    e.dst = d;
    e.probability = p;
    e.support = 3;
    e.directed_count = 2;
    e.evidence = {{"doc1", 1}};
    return e;
  };
  g->edges.push_back(seq(0, 1, 0.5));
  g->edges.push_back(seq(0, 2, 0.3));
  g->edges.push_back(seq(0, 3, 0.2));
  TypedEdge c;
  c.src = 1;
  c.dst = 5;
  c.relation = Relation::kCausal;
  c.support = 2;
  c.evidence = {{"doc1", 1}, {"doc1", 2}};
  g->edges.push_back(c);
  g->links.push_back({0, 4, 0.8});
  g->meta["stage"] = "merge";
  g->validate();
  return g;
}

std::shared_ptr<const ParsedCorpus> demo_corpus() {
  auto c = std::make_shared<ParsedCorpus>();
  Document d{"doc1", {}};
  d.sentences.push_back(testing::make_sentence("doc1", 1, {{"Prices", "price", "NOUN", 2, "nsubj"},
                                                           {"rise", "rise", "VERB", 0, "root"}}));
  d.sentences.push_back(testing::make_sentence("doc1", 2, {{"Demand", "demand", "NOUN", 2, "nsubj"},
                                                           {"falls", "fall", "VERB", 0, "root"}}));
  c->documents.push_back(d);
  return c;
}

ElgGraph manual_small() {
  ElgGraph g;
  g.nodes.push_back({0, "a|go|", {"a|go|"}, 1});
  return g;
}

std::unique_ptr<QueryService> loaded_ptr(ServiceConfig cfg = {}) {
  auto s = std::make_unique<QueryService>(cfg);
  s->set_graph(demo_graph(), demo_corpus());
  return s;
}

void expect_closure(const json& body) {
  std::set<int> ids;
  for (const auto& n : body["nodes"]) ids.insert(n["node_id"].get<int>());
  for (const auto& e : body["edges"]) {
    EXPECT_TRUE(ids.count(e["src"].get<int>()));
    EXPECT_TRUE(ids.count(e["dst"].get<int>()));
  }
  for (const auto& l : body["links"]) {
    EXPECT_TRUE(ids.count(l["a"].get<int>()));
    EXPECT_TRUE(ids.count(l["b"].get<int>()));
  }
}

TEST(Config, CapsMustBePositive) {
  ServiceConfig c;
  c.node_cap = 0;
  EXPECT_THROW(QueryService{c}, ConfigError);
  c = {};
  c.max_depth = 0;
  EXPECT_THROW(QueryService{c}, ConfigError);
  c = {};
  c.port = 70000;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Health, UnloadedThenLoaded) {
  QueryService s({});
  EXPECT_FALSE(s.has_graph());
  EXPECT_EQ(s.health().status, 503);
  EXPECT_EQ(s.search({{"q", "price"}}).status, 503);
  s.set_graph(demo_graph());
  auto h = s.health();
  EXPECT_EQ(h.status, 200);
  EXPECT_EQ(h.body["nodes"], 6);
  EXPECT_EQ(h.body["edges"], 4);
  EXPECT_EQ(h.body["meta"]["stage"], "merge");
  EXPECT_EQ(s.health().body.dump(), h.body.dump());
}

TEST(Health, CountsMatchSavedFile) {
  auto dir = testing::scratch_dir("service_load");
  save_graph(*demo_graph(), dir / "g.elg");
  ServiceConfig cfg;
  cfg.graph_path = dir / "g.elg";
  QueryService s(cfg);
  s.load_from_config();
  EXPECT_EQ(s.health().body["nodes"], 6);
  ServiceConfig missing;
  missing.graph_path = dir / "absent.elg";
  QueryService m(missing);
  EXPECT_THROW(m.load_from_config(), IoError);
  EXPECT_FALSE(m.has_graph());
}

TEST(Search, RankingAndErrors) {
  auto holder = loaded_ptr();
  auto& s = *holder;
  EXPECT_EQ(s.search({}).status, 400);
  EXPECT_EQ(s.search({{"q", "  "}}).status, 400);
  EXPECT_EQ(s.search({{"q", "x"}, {"limit", "-1"}}).status, 400);
  EXPECT_EQ(s.search({{"q", "x"}, {"limit", "0"}}).status, 400);
  auto exact = s.search({{"q", "cost|rise|"}});
  ASSERT_EQ(exact.status, 200);
  EXPECT_EQ(exact.body["nodes"][0]["canonical"], "cost|rise|");
  auto rise = s.search({{"q", "rise"}});
  ASSERT_EQ(rise.body["nodes"].size(), 2u);
  EXPECT_EQ(rise.body["nodes"][0]["canonical"], "cost|rise|");  // higher frequency
  EXPECT_EQ(s.search({{"q", "rise"}, {"limit", "1"}}).body["nodes"].size(), 1u);
  auto none = s.search({{"q", "volcano"}});
  EXPECT_EQ(none.status, 200);
  EXPECT_TRUE(none.body["nodes"].empty());
  auto alias = s.search({{"q", "central_bank|cut|rate"}});
  ASSERT_EQ(alias.body["nodes"].size(), 1u);
  EXPECT_EQ(alias.body["nodes"][0]["canonical"], "bank|cut|rate");
  EXPECT_EQ(s.search({{"q", "Bank Rate"}}).body["nodes"].size(), 1u);
}

TEST(Neighbors, RolesAndLimits) {
  ServiceConfig cfg;
  cfg.max_depth = 2;
  auto holder = loaded_ptr(cfg);
  auto& s = *holder;
  auto r = s.neighbors("0", {{"links", "0"}});
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body["nodes"].size(), 4u);
  int seeds = 0, evo = 0;
  for (const auto& n : r.body["nodes"]) {
    seeds += n["role"] == "seed";
    evo += n["role"] == "evolution";
  }
  EXPECT_EQ(seeds, 1);
  EXPECT_EQ(evo, 3);
  EXPECT_EQ(r.body["nodes"][0]["node_id"], 0);

  auto with_links = s.neighbors("0", {});
  bool similar = false;
  for (const auto& n : with_links.body["nodes"])
    if (n["node_id"] == 4) similar = n["role"] == "similar";
  EXPECT_TRUE(similar);
  EXPECT_EQ(with_links.body["links"].size(), 1u);

  EXPECT_EQ(s.neighbors("0", {{"depth", "3"}}).status, 400);
  EXPECT_EQ(s.neighbors("0", {{"depth", "0"}}).status, 400);
  EXPECT_EQ(s.neighbors("0", {{"relation", "bogus"}}).status, 400);
  EXPECT_EQ(s.neighbors("0", {{"links", "maybe"}}).status, 400);
  EXPECT_EQ(s.neighbors("99", {}).status, 404);
  EXPECT_EQ(s.neighbors("abc", {}).status, 400);

  auto causal = s.neighbors("0", {{"depth", "2"}, {"relation", "causal"}});
  EXPECT_EQ(causal.body["edges"].size(), 0u);
  auto deep = s.neighbors("0", {{"depth", "2"}, {"links", "0"}});
  EXPECT_EQ(deep.body["nodes"].size(), 5u);
}

TEST(Neighbors, NodeCapKeepsClosure) {
  ServiceConfig cfg;
  cfg.node_cap = 2;
  auto holder = loaded_ptr(cfg);
  auto& s = *holder;
  auto r = s.neighbors("0", {{"links", "1"}});
  EXPECT_EQ(r.body["nodes"].size(), 2u);
  EXPECT_TRUE(r.body["truncated"].get<bool>());
  expect_closure(r.body);
}

TEST(Contexts, ResolvesEvidence) {
  auto holder = loaded_ptr();
  auto& s = *holder;
  auto r = s.edge_contexts({{"src", "1"}, {"dst", "5"}, {"relation", "causal"}});
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body["contexts"].size(), 2u);
  EXPECT_EQ(r.body["contexts"][1]["text"], "Demand falls");
  EXPECT_EQ(r.body["src_event"], "demand|fall|");
  EXPECT_EQ(s.edge_contexts({{"src", "5"}, {"dst", "1"}, {"relation", "causal"}}).status, 404);
  EXPECT_EQ(s.edge_contexts({{"src", "1"}, {"dst", "5"}, {"relation", "sequential"}}).status, 404);
  EXPECT_EQ(s.edge_contexts({{"src", "1"}, {"relation", "causal"}}).status, 400);
  EXPECT_EQ(s.edge_contexts({{"src", "1"}, {"dst", "5"}}).status, 400);
  EXPECT_EQ(s.edge_contexts({{"src", "100"}, {"dst", "5"}, {"relation", "causal"}}).status, 404);
  QueryService bare({});
  bare.set_graph(demo_graph());
  auto no_text = bare.edge_contexts({{"src", "1"}, {"dst", "5"}, {"relation", "causal"}});
  EXPECT_TRUE(no_text.body["contexts"][0]["text"].is_null());
}

TEST(Route, DispatchesPaths) {
  auto holder = loaded_ptr();
  auto& s = *holder;
  EXPECT_EQ(s.route("/health", {}).status, 200);
  EXPECT_EQ(s.route("/events", {{"q", "rise"}}).status, 200);
  EXPECT_EQ(s.route("/events/0/neighbors", {}).status, 200);
  EXPECT_EQ(s.route("/events//neighbors", {}).status, 404);
  EXPECT_EQ(s.route("/nope", {}).status, 404);
}

TEST(Properties, ReadOnlyDeterministicAndClosed) {
  std::mt19937_64 rng(9);
  auto g = std::make_shared<const ElgGraph>(testing::random_graph(rng, 40, 120, 20));
  const std::string before = serialize_graph(*g);
  ServiceConfig cfg;
  cfg.node_cap = 15;
  QueryService s(cfg);
  s.set_graph(g);
  std::vector<std::pair<std::string, QueryParams>> requests;
  for (int i = 0; i < 300; ++i) {
    const int node = static_cast<int>(rng() % 45);
    switch (rng() % 4) {
      case 0:
        requests.push_back({"/events/" + std::to_string(node) + "/neighbors",
                            {{"depth", std::to_string(1 + rng() % 3)}, {"top_k", std::to_string(rng() % 4)}}});
        break;
      case 1:
        requests.push_back({"/events", {{"q", g->nodes[rng() % 40].canonical.substr(0, 3)}}});
        break;
      case 2:
        requests.push_back({"/edges/contexts",
                            {{"src", std::to_string(node)}, {"dst", std::to_string(rng() % 40)},
                             {"relation", "sequential"}}});
        break;
      default:
        requests.push_back({"/health", {}});
    }
  }
  std::vector<std::string> first;
  for (const auto& [path, params] : requests) {
    auto r = s.route(path, params);
    EXPECT_TRUE(r.status == 200 || r.status == 400 || r.status == 404) << path;
    if (r.status == 200 && r.body.contains("edges") && r.body["edges"].is_array()) {
      expect_closure(r.body);
      EXPECT_LE(r.body["nodes"].size(), 15u);
    }
    first.push_back(r.body.dump());
  }
  // Concurrent replay must give the same answers.
  std::vector<std::thread> pool;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = 0; i < requests.size(); ++i)
        if (s.route(requests[i].first, requests[i].second).body.dump() != first[i]) ++mismatches;
    });
  for (auto& th : pool) th.join();
  EXPECT_EQ(mismatches.load(), 0);
  EXPECT_EQ(serialize_graph(*g), before);
}

TEST(Properties, SwapIsAtomic) {
  QueryService s({});
  auto small = std::make_shared<const ElgGraph>(manual_small());
  auto big = demo_graph();
  s.set_graph(small);
  std::atomic<bool> stop{false};
  std::atomic<int> bad{0};
  std::thread reader([&] {
    while (!stop) {
      auto h = s.health().body;
      const auto n = h["nodes"].get<std::size_t>(), e = h["edges"].get<std::size_t>();
      if (!((n == 1 && e == 0) || (n == 6 && e == 4))) ++bad;
    }
  });
  for (int i = 0; i < 2000; ++i) s.set_graph(i % 2 ? small : big);
  stop = true;
  reader.join();
  EXPECT_EQ(bad.load(), 0);
}

TEST(Http, LoopbackServer) {
  ServiceConfig cfg;
  cfg.port = 0;
  cfg.cors_allowlist = {"http://ui.local"};
  QueryService s(cfg);
  s.set_graph(demo_graph(), demo_corpus());
  HttpServer server(s);
  const int port = server.bind();
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen(); });
  httplib::Client cli("127.0.0.1", port);
  cli.set_connection_timeout(5);
  auto health = cli.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(json::parse(health->body)["nodes"], 6);
  EXPECT_NE(health->get_header_value("Content-Type").find("application/json"), std::string::npos);
  auto search = cli.Get("/events?q=rise&limit=1");
  ASSERT_TRUE(search);
  EXPECT_EQ(json::parse(search->body)["nodes"].size(), 1u);
  auto missing = cli.Get("/events/42/neighbors");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto post = cli.Post("/events", "{}", "application/json");
  ASSERT_TRUE(post);
  EXPECT_EQ(post->status, 405);
  auto allowed = cli.Get("/health", {{"Origin", "http://ui.local"}});
  ASSERT_TRUE(allowed);
  EXPECT_EQ(allowed->get_header_value("Access-Control-Allow-Origin"), "http://ui.local");
  auto denied = cli.Get("/health", {{"Origin", "http://evil.example"}});
  ASSERT_TRUE(denied);
  EXPECT_FALSE(denied->has_header("Access-Control-Allow-Origin"));
  server.stop();
  th.join();
}

}  // namespace
}  // namespace elg
