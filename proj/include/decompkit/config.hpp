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

// Resolved run configuration. Defaults reproduce the published pipeline
// settings; the CLI layers a key=value config file and flags on top.

#pragma once

#include <memory>
#include <string>

#include "decompkit/backend.hpp"
#include "decompkit/corpus.hpp"
#include "decompkit/error.hpp"
#include "decompkit/http_backend.hpp"
#include "decompkit/mock_backend.hpp"

namespace decompkit {

inline constexpr std::string_view kVersion = "0.3.0";

struct RunConfig {
  // mining
  long long window_days = 2;
  double title_threshold = 0.8;
  double band_lo = 0.6;
  double band_hi = 0.9;
  std::size_t min_sentence_tokens = 5;
  std::size_t min_shared_title_tokens = 0;
  // dedup / emit
  std::size_t cap = 10;
  double corruption_rate = 0.15;
  double mean_span_length = 3.0;
  std::size_t denoise_sample = 0;  // 0 keeps every sentence
  // metrics
  std::size_t metrics_sample = 10000;
  // question answering
  int chains = 5;
  int max_steps = 3;
  int num_candidates = 5;
  double stop_threshold = 0.95;
  double temperature = 1.0;
  double diversity = 0.0;
  std::string correction_policy = "fail_chain";
  // backends
  std::string backends = "mock";
  std::string embed_model = "sentence";
  std::string title_model;  // empty: same as embed_model
  std::string paraphrase_model = "paraphrase";
  std::string generate_model = "decomp";
  std::size_t embed_batch = 64;
  std::size_t embed_in_flight = 4;
  // seeds / execution
  std::uint64_t seed = 1;
  std::size_t jobs = 1;

  const std::string& resolved_title_model() const {
    return title_model.empty() ? embed_model : title_model;
  }

  void validate() const {
    const auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
    if (window_days < 0) bad("window_days must be >= 0");
    if (!(title_threshold > 0.0 && title_threshold < 1.0)) bad("title_threshold must be in (0, 1)");
    if (!(band_lo < band_hi)) bad("band_lo must be < band_hi");
    if (cap < 1) bad("cap must be >= 1");
    if (!(corruption_rate >= 0.0 && corruption_rate < 1.0)) bad("corruption_rate must be in [0, 1)");
    if (!(mean_span_length > 0.0)) bad("mean_span_length must be > 0");
    if (metrics_sample < 1) bad("metrics_sample must be >= 1");
    if (chains < 1 || max_steps < 1 || num_candidates < 1) bad("chains, max_steps, num_candidates must be >= 1");
    if (!(stop_threshold > 0.0 && stop_threshold <= 1.0)) bad("stop_threshold must be in (0, 1]");
    if (!(temperature > 0.0)) bad("temperature must be > 0");
    if (correction_policy != "fail_chain" && correction_policy != "pass_through") {
      bad("correction_policy must be fail_chain or pass_through");
    }
    if (embed_batch < 1 || embed_in_flight < 1) bad("embed_batch and embed_in_flight must be >= 1");
  }

  // Provenance record. `jobs` is left out: it never changes results.
  json to_json() const {
    return json{{"window_days", window_days},
                {"title_threshold", title_threshold},
                {"band_lo", band_lo},
                {"band_hi", band_hi},
                {"min_sentence_tokens", min_sentence_tokens},
                {"min_shared_title_tokens", min_shared_title_tokens},
                {"cap", cap},
                {"corruption_rate", corruption_rate},
                {"mean_span_length", mean_span_length},
                {"denoise_sample", denoise_sample},
                {"sample", metrics_sample},
                {"chains", chains},
                {"max_steps", max_steps},
                {"num_candidates", num_candidates},
                {"stop_threshold", stop_threshold},
                {"temperature", temperature},
                {"diversity", diversity},
                {"correction_policy", correction_policy},
                {"backends", backends},
                {"embed_model", embed_model},
                {"title_model", resolved_title_model()},
                {"paraphrase_model", paraphrase_model},
                {"generate_model", generate_model},
                {"embed_batch", embed_batch},
                {"embed_in_flight", embed_in_flight},
                {"seed", seed}};
  }
};

inline json header_json(std::string_view stage, const RunConfig& config) {
  return json{{"tool", "decompkit"}, {"version", kVersion}, {"stage", stage}, {"config", config.to_json()}};
}

// "mock", "mock:<script.json>", or an http(s) base URL.
inline std::unique_ptr<Backend> open_backend(const std::string& spec,
                                             HttpBackendOptions http_options = {}) {
  if (spec == "mock") return std::make_unique<MockBackend>();
  if (spec.rfind("mock:", 0) == 0) {
    return std::make_unique<MockBackend>(MockBackend::from_file(spec.substr(5)));
  }
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    return std::make_unique<HttpBackend>(spec, http_options);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "backend must be 'mock', 'mock:<script>' or an http URL, got '" + spec + "'");
}

}  // namespace decompkit
