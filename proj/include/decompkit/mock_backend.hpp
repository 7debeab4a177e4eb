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

// Deterministic in-process backend driven by a JSON script. serve-mock
// exposes exactly this object over HTTP.
//
// Script format (every section optional):
//
//   {
//     "embed":    {"mode": "bow" | "hash", "dim": 256,
//                  "vectors": {"<text>": [..]},
//                  "models": {"<model>": {"vectors": {"<text>": [..]}}}},
//     "generate": {"fixtures": [{"input": "...", "candidates": [{"text": "...", "score": -0.1}]}],
//                  "fallback": "synthetic" | "error"},
//     "entail":   {"fixtures": [{"input": "...", "label": "yes", "confidence": 0.9}],
//                  "fallback": "hash" | "error"},
//     "correct":  {"mode": "echo" | "error", "fixtures": {"<sentence>": "<corrected>"}}
//   }
//
// Unscripted embeddings: "bow" sums a signed one-hot per token (bucket and
// sign from FNV-1a of the token) so texts sharing words score high; "hash"
// draws each coordinate from a splitmix64 stream seeded by the text hash.
// Both are unit-normalized. Scripted vectors are returned normalized too.

#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "decompkit/backend.hpp"
#include "decompkit/error.hpp"
#include "decompkit/random.hpp"
#include "decompkit/text.hpp"

namespace decompkit {

class MockBackend : public Backend {
 public:
  MockBackend() : MockBackend(nlohmann::json::object()) {}

  explicit MockBackend(const nlohmann::json& script) {
    try {
      load(script);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kBadScript, e.what());
    } catch (const std::logic_error& e) {
      throw Error(ErrorCode::kBadScript, e.what());
    }
  }

  static MockBackend from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kBadScript, "cannot open script " + path);
    try {
      return MockBackend(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kBadScript, e.what());
    }
  }

  std::size_t dim() const noexcept { return dim_; }

  EmbedResponse embed(const std::string& model, const std::vector<std::string>& texts) override {
    EmbedResponse out;
    out.dim = dim_;
    out.vectors.reserve(texts.size());
    for (const auto& t : texts) out.vectors.push_back(embed_text(model, t));
    return out;
  }

  std::vector<GenerationCandidate> generate(const GenerateRequest& request) override {
    if (auto it = generate_fixtures_.find(request.input); it != generate_fixtures_.end()) {
      return it->second;
    }
    if (!generate_synthetic_) {
      throw Error(ErrorCode::kProtocolError, "no generate fixture for input");
    }
    std::vector<GenerationCandidate> out;
    const std::uint64_t h = fnv1a64(request.input);
    for (int i = 0; i < request.num_candidates; ++i) {
      const std::uint64_t r = derive_seed(h, static_cast<std::uint64_t>(i));
      std::ostringstream text;
      text << "Mock source " << hex_word(r) << " reports figure " << (r % 100000) << " for topic "
           << hex_word(splitmix64(r)) << ".";
      const double score = -0.25 * i - static_cast<double>(r % 1000) / 10000.0;
      out.push_back({text.str(), score});
    }
    return out;
  }

  EntailResult entail(const std::string& input) override {
    if (auto it = entail_fixtures_.find(input); it != entail_fixtures_.end()) return it->second;
    if (!entail_hash_) throw Error(ErrorCode::kProtocolError, "no entail fixture for input");
    const std::uint64_t h = fnv1a64(input);
    return EntailResult{(h & 1) ? "yes" : "no",
                        0.5 + static_cast<double>((h >> 1) % 500) / 1000.0};
  }

  std::string correct(const std::string& /*prompt*/, const std::string& sentence) override {
    if (auto it = correct_fixtures_.find(sentence); it != correct_fixtures_.end()) return it->second;
    if (!correct_echo_) throw Error(ErrorCode::kProtocolError, "no correct fixture for sentence");
    return sentence;
  }

 private:
  static std::string hex_word(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s = "x";
    for (int i = 0; i < 6; ++i) s.push_back(digits[(v >> (4 * i)) & 0xF]);
    return s;
  }

  static std::vector<double> normalized(std::vector<double> v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return v;
    for (auto& x : v) x /= norm;
    return v;
  }

  std::vector<double> hash_vector(const std::string& t) const {
    std::vector<double> v(dim_);
    const std::uint64_t h = fnv1a64(t);
    for (std::size_t i = 0; i < dim_; ++i) {
      const std::uint64_t r = splitmix64(h + i);
      v[i] = static_cast<double>(r >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    }
    return normalized(std::move(v));
  }

  std::vector<double> embed_text(const std::string& model, const std::string& t) const {
    if (auto m = model_vectors_.find(model); m != model_vectors_.end()) {
      if (auto it = m->second.find(t); it != m->second.end()) return it->second;
    }
    if (auto it = vectors_.find(t); it != vectors_.end()) return it->second;
    if (!bow_) return hash_vector(t);
    std::vector<double> v(dim_, 0.0);
    bool any = false;
    for (const auto& token : text::tokenize(t)) {
      const std::uint64_t h = fnv1a64(token);
      v[h % dim_] += ((h >> 32) & 1) ? -1.0 : 1.0;
      any = true;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (!any || norm == 0.0) return hash_vector(t);
    return normalized(std::move(v));
  }

  // Dense [v0, v1, ...] or sparse {"index": value}.
  std::vector<double> scripted(const nlohmann::json& values) const {
    std::vector<double> v;
    if (values.is_object()) {
      v.assign(dim_, 0.0);
      for (const auto& [index, value] : values.items()) {
        const auto i = std::stoul(index);
        if (i >= dim_) throw Error(ErrorCode::kBadScript, "sparse index " + index + " >= dim");
        v[i] = value.get<double>();
      }
    } else {
      v = values.get<std::vector<double>>();
    }
    if (v.size() != dim_) {
      throw Error(ErrorCode::kBadScript, "scripted vector has dim " + std::to_string(v.size()) +
                                             ", expected " + std::to_string(dim_));
    }
    return normalized(std::move(v));
  }

  void load(const nlohmann::json& script) {
    if (!script.is_object()) throw Error(ErrorCode::kBadScript, "script must be a JSON object");
    const auto embed = script.value("embed", nlohmann::json::object());
    const std::string mode = embed.value("mode", "bow");
    if (mode != "bow" && mode != "hash") throw Error(ErrorCode::kBadScript, "embed.mode " + mode);
    bow_ = mode == "bow";
    dim_ = embed.value("dim", std::size_t{256});
    if (dim_ == 0) throw Error(ErrorCode::kBadScript, "embed.dim must be positive");
    const auto vectors = embed.value("vectors", nlohmann::json::object());
    for (const auto& [t, values] : vectors.items()) {
      vectors_[t] = scripted(values);
    }
    const auto models = embed.value("models", nlohmann::json::object());
    for (const auto& [model, spec] : models.items()) {
      const auto model_vectors = spec.value("vectors", nlohmann::json::object());
      for (const auto& [t, values] : model_vectors.items()) {
        model_vectors_[model][t] = scripted(values);
      }
    }

    const auto gen = script.value("generate", nlohmann::json::object());
    generate_synthetic_ = gen.value("fallback", "synthetic") == "synthetic";
    const auto gen_fixtures = gen.value("fixtures", nlohmann::json::array());
    for (const auto& f : gen_fixtures) {
      std::vector<GenerationCandidate> cands;
      for (const auto& c : f.at("candidates")) {
        cands.push_back({c.at("text").get<std::string>(), c.at("score").get<double>()});
      }
      generate_fixtures_[f.at("input").get<std::string>()] = std::move(cands);
    }

    const auto ent = script.value("entail", nlohmann::json::object());
    entail_hash_ = ent.value("fallback", "hash") == "hash";
    const auto ent_fixtures = ent.value("fixtures", nlohmann::json::array());
    for (const auto& f : ent_fixtures) {
      entail_fixtures_[f.at("input").get<std::string>()] =
          EntailResult{f.at("label").get<std::string>(), f.at("confidence").get<double>()};
    }

    const auto cor = script.value("correct", nlohmann::json::object());
    correct_echo_ = cor.value("mode", "echo") == "echo";
    const auto cor_fixtures = cor.value("fixtures", nlohmann::json::object());
    for (const auto& [s, fixed] : cor_fixtures.items()) {
      correct_fixtures_[s] = fixed.get<std::string>();
    }
  }

  bool bow_ = true;
  std::size_t dim_ = 256;
  std::map<std::string, std::vector<double>> vectors_;
  std::map<std::string, std::map<std::string, std::vector<double>>> model_vectors_;
  bool generate_synthetic_ = true;
  std::map<std::string, std::vector<GenerationCandidate>> generate_fixtures_;
  bool entail_hash_ = true;
  std::map<std::string, EntailResult> entail_fixtures_;
  bool correct_echo_ = true;
  std::map<std::string, std::string> correct_fixtures_;
};

}  // namespace decompkit
