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


// Read-only query API over a loaded graph. QueryService holds the handlers
// and is usable without a network; HttpServer binds it to HTTP.

#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "elg/corpus.hpp"
#include "elg/graph.hpp"

namespace httplib {
class Server;
}

namespace elg {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 = ephemeral
  std::filesystem::path graph_path;
  std::filesystem::path corpus_path;  // optional; resolves evidence to text
  std::size_t node_cap = 200;
  int max_depth = 3;
  std::size_t default_limit = 10;
  std::vector<std::string> cors_allowlist;  // "*" allows any origin

  // Throws ConfigError when a cap is below 1.
  void validate() const;
};

struct HttpResult {
  int status = 200;
  nlohmann::json body;
};

using QueryParams = std::map<std::string, std::string>;

class QueryService {
 public:
  explicit QueryService(ServiceConfig config);

  // Atomic replacement; in-flight requests keep the snapshot they started with.
  void set_graph(std::shared_ptr<const ElgGraph> graph,
                 std::shared_ptr<const ParsedCorpus> corpus = nullptr);
  // Loads graph (and corpus, if configured) fully before swapping.
  void load_from_config();
  bool has_graph() const;

  HttpResult health() const;
  HttpResult search(const QueryParams& params) const;
  HttpResult neighbors(const std::string& node_id, const QueryParams& params) const;
  HttpResult edge_contexts(const QueryParams& params) const;

  // Dispatches a GET path to the handlers above; 404 for unknown routes.
  HttpResult route(const std::string& path, const QueryParams& params) const;

  const ServiceConfig& config() const { return config_; }

 private:
  struct Snapshot;
  std::shared_ptr<const Snapshot> snapshot() const;

  ServiceConfig config_;
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> snap_;
};

class HttpServer {
 public:
  explicit HttpServer(QueryService& service);
  ~HttpServer();

  // Binds host:port from the service config; returns the bound port.
  int bind();
  // Serves until stop(); call bind() first.
  void listen();
  void stop();

 private:
  QueryService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace elg
