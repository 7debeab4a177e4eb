// Copyright 2026 The decompkit Authors
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

// Wire protocol: HTTP client backend with retry, and route installation for
// serving any Backend (used by serve-mock).
//
//   POST /embed    {"model", "texts"}                                -> {"dim", "vectors"}
//   POST /generate {"model", "input", "num_candidates", "diversity"} -> {"candidates": [{"text", "score"}]}
//   POST /entail   {"input"}                                         -> {"label", "confidence"}
//   POST /correct  {"prompt", "sentence"}                            -> {"corrected"}
//
// 503 and connection failures are retried with exponential backoff.

#pragma once

#include <chrono>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "decompkit/backend.hpp"
#include "decompkit/error.hpp"

namespace decompkit {

struct HttpBackendOptions {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{200};
  double backoff_multiplier = 2.0;
  std::chrono::seconds timeout{120};
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(const std::string& base_url, HttpBackendOptions options = {})
      : options_(options) {
    const auto scheme = base_url.find("://");
    const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const auto path_start = base_url.find('/', host_start);
    if (path_start == std::string::npos) {
      origin_ = base_url;
    } else {
      origin_ = base_url.substr(0, path_start);
      prefix_ = base_url.substr(path_start);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
    if (origin_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty backend url");
  }

  EmbedResponse embed(const std::string& model, const std::vector<std::string>& texts) override {
    const auto resp = post("/embed", {{"model", model}, {"texts", texts}});
    try {
      EmbedResponse out;
      out.dim = resp.at("dim").get<std::size_t>();
      out.vectors = resp.at("vectors").get<std::vector<std::vector<double>>>();
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProtocolError, std::string("/embed response: ") + e.what());
    }
  }

  std::vector<GenerationCandidate> generate(const GenerateRequest& r) override {
    const auto resp = post("/generate", {{"model", r.model},
                                         {"input", r.input},
                                         {"num_candidates", r.num_candidates},
                                         {"diversity", r.diversity}});
    try {
      std::vector<GenerationCandidate> out;
      for (const auto& c : resp.at("candidates")) {
        out.push_back({c.at("text").get<std::string>(), c.at("score").get<double>()});
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProtocolError, std::string("/generate response: ") + e.what());
    }
  }

  EntailResult entail(const std::string& input) override {
    const auto resp = post("/entail", {{"input", input}});
    try {
      return {resp.at("label").get<std::string>(), resp.at("confidence").get<double>()};
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProtocolError, std::string("/entail response: ") + e.what());
    }
  }

  std::string correct(const std::string& prompt, const std::string& sentence) override {
    const auto resp = post("/correct", {{"prompt", prompt}, {"sentence", sentence}});
    try {
      return resp.at("corrected").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kProtocolError, std::string("/correct response: ") + e.what());
    }
  }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body) {
    const std::string payload = body.dump();
    auto delay = options_.initial_backoff;
    std::string last_failure;
    for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
      httplib::Client client(origin_);
      client.set_connection_timeout(options_.timeout);
      client.set_read_timeout(options_.timeout);
      client.set_write_timeout(options_.timeout);
      auto res = client.Post(prefix_ + path, payload, "application/json");
      if (res && res->status >= 200 && res->status < 300) {
        try {
          return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error& e) {
          throw Error(ErrorCode::kProtocolError, path + " returned invalid JSON: " + e.what());
        }
      }
      if (res && res->status != 503) {
        throw Error(ErrorCode::kProtocolError,
                    path + " returned HTTP " + std::to_string(res->status) + ": " + res->body);
      }
      last_failure = res ? "HTTP 503" : httplib::to_string(res.error());
      if (attempt < options_.max_attempts) {
        std::this_thread::sleep_for(delay);
        delay = std::chrono::milliseconds(
            static_cast<long long>(static_cast<double>(delay.count()) * options_.backoff_multiplier));
      }
    }
    throw Error(ErrorCode::kBackendUnavailable,
                origin_ + prefix_ + path + " after " + std::to_string(options_.max_attempts) +
                    " attempts (" + last_failure + ")");
  }

  HttpBackendOptions options_;
  std::string origin_;
  std::string prefix_;
};

namespace detail {

inline void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename Handler>
void guarded(const httplib::Request& req, httplib::Response& res, Handler&& handler) {
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    reply_json(res, 400, {{"error", "MalformedJson"}, {"message", e.what()}});
    return;
  }
  try {
    reply_json(res, 200, handler(body));
  } catch (const nlohmann::json::exception& e) {
    reply_json(res, 400, {{"error", "Schema"}, {"message", e.what()}});
  } catch (const Error& e) {
    const int status = e.code() == ErrorCode::kBackendUnavailable ? 503
                       : e.code() == ErrorCode::kProtocolError    ? 404
                                                                  : 500;
    reply_json(res, status, {{"error", std::string(e.code_name())}, {"message", e.detail()}});
  }
}

}  // namespace detail

// Registers the four protocol endpoints on `server`, delegating to `backend`.
inline void install_routes(httplib::Server& server, Backend& backend) {
  using nlohmann::json;
  server.Post("/embed", [&backend](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(req, res, [&](const json& body) {
      const auto resp = backend.embed(body.at("model").get<std::string>(),
                                      body.at("texts").get<std::vector<std::string>>());
      return json{{"dim", resp.dim}, {"vectors", resp.vectors}};
    });
  });
  server.Post("/generate", [&backend](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(req, res, [&](const json& body) {
      GenerateRequest r{body.at("model").get<std::string>(), body.at("input").get<std::string>(),
                        body.at("num_candidates").get<int>(), body.value("diversity", 0.0)};
      if (r.num_candidates < 1) throw json::other_error::create(501, "num_candidates < 1", &body);
      json cands = json::array();
      for (const auto& c : backend.generate(r)) {
        cands.push_back({{"text", c.text}, {"score", c.score}});
      }
      return json{{"candidates", cands}};
    });
  });
  server.Post("/entail", [&backend](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(req, res, [&](const json& body) {
      const auto r = backend.entail(body.at("input").get<std::string>());
      return json{{"label", r.label}, {"confidence", r.confidence}};
    });
  });
  server.Post("/correct", [&backend](const httplib::Request& req, httplib::Response& res) {
    detail::guarded(req, res, [&](const json& body) {
      return json{{"corrected", backend.correct(body.at("prompt").get<std::string>(),
                                                body.at("sentence").get<std::string>())}};
    });
  });
}

}  // namespace decompkit
