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

#include <httplib.h>

#include "elg/error.hpp"

namespace elg {

using nlohmann::json;

HttpServer::HttpServer(QueryService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto cors = [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_header("Origin")) return;
    const std::string origin = req.get_header_value("Origin");
    const auto& allow = service_.config().cors_allowlist;
    if (std::find(allow.begin(), allow.end(), "*") != allow.end() ||
        std::find(allow.begin(), allow.end(), origin) != allow.end()) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
  };
  server_->Get(".*", [this, cors](const httplib::Request& req, httplib::Response& res) {
    QueryParams params;
    for (const auto& [k, v] : req.params) params.emplace(k, v);
    HttpResult r;
    try {
      r = service_.route(req.path, params);
    } catch (const std::exception& e) {
      r = {500, json{{"error", e.what()}}};
    }
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
    cors(req, res);
  });
  auto refuse = [](const httplib::Request&, httplib::Response& res) {
    res.status = 405;
    res.set_content(R"({"error":"read-only service"})", "application/json; charset=utf-8");
  };
  server_->Post(".*", refuse);
  server_->Put(".*", refuse);
  server_->Delete(".*", refuse);
  server_->Patch(".*", refuse);
  server_->Options(".*", [cors](const httplib::Request& req, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET");
    cors(req, res);
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind() {
  const auto& cfg = service_.config();
  int port = cfg.port;
  if (port == 0) {
    port = server_->bind_to_any_port(cfg.host);
  } else if (!server_->bind_to_port(cfg.host, port)) {
    port = -1;
  }
  if (port < 0) throw IoError("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
  return port;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

}  // namespace elg
