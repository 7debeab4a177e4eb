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

// Shared domain types and their JSON forms.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "decompkit/date.hpp"
#include "decompkit/error.hpp"
#include "decompkit/text.hpp"

namespace decompkit {

using json = nlohmann::json;

struct Article {
  std::string id;
  std::string title;
  std::string body;
  Date published;
  std::string source_domain;

  friend bool operator==(const Article&, const Article&) = default;
};

// Field names follow the input corpus schema.
inline json to_json(const Article& a) {
  return json{{"id", a.id},
              {"title", a.title},
              {"text", a.body},
              {"date", a.published.iso()},
              {"domain", a.source_domain}};
}

// Builds an Article from a parsed JSONL record or throws; unknown fields are
// ignored.
inline Article validate_article(const json& raw) {
  if (!raw.is_object()) throw Error(ErrorCode::kMalformedJson, "record is not a JSON object");
  const auto field = [&](const char* name) -> std::string {
    const auto it = raw.find(name);
    if (it == raw.end() || !it->is_string()) {
      throw Error(ErrorCode::kMissingField, "missing or not a string", name);
    }
    return it->get<std::string>();
  };
  Article a;
  a.id = field("id");
  a.title = field("title");
  a.body = field("text");
  // An absent date is an unparseable one; the other fields are just missing.
  const auto date_it = raw.find("date");
  if (date_it == raw.end() || !date_it->is_string()) {
    throw Error(ErrorCode::kUnparseableDate, "missing or not a string", "date");
  }
  const std::string date = date_it->get<std::string>();
  a.source_domain = field("domain");
  if (text::trim(a.id).empty()) throw Error(ErrorCode::kEmptyText, "empty after trim", "id");
  if (text::trim(a.title).empty()) throw Error(ErrorCode::kEmptyText, "empty after trim", "title");
  if (text::trim(a.body).empty()) throw Error(ErrorCode::kEmptyText, "empty after trim", "text");
  const auto parsed = parse_date(date);
  if (!parsed) throw Error(ErrorCode::kUnparseableDate, "'" + date + "'", "date");
  a.published = *parsed;
  return a;
}

struct Sentence {
  std::string article_id;
  std::size_t index = 0;
  std::string text;
  std::size_t token_count = 0;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

inline Sentence make_sentence(std::string article_id, std::size_t index, std::string text) {
  const std::size_t n = text::token_count(text);
  return Sentence{std::move(article_id), index, std::move(text), n};
}

// Unordered article pair stored canonically (a_id < b_id).
class ArticlePair {
 public:
  static ArticlePair make(std::string x_id, std::string y_id, long long date_gap_days,
                          double title_similarity) {
    if (y_id < x_id) std::swap(x_id, y_id);
    return ArticlePair(std::move(x_id), std::move(y_id), date_gap_days < 0 ? -date_gap_days
                                                                           : date_gap_days,
                       title_similarity);
  }

  const std::string& a_id() const noexcept { return a_id_; }
  const std::string& b_id() const noexcept { return b_id_; }
  long long date_gap_days() const noexcept { return date_gap_days_; }
  double title_similarity() const noexcept { return title_similarity_; }

  friend bool operator==(const ArticlePair&, const ArticlePair&) = default;

 private:
  ArticlePair(std::string a, std::string b, long long gap, double sim)
      : a_id_(std::move(a)), b_id_(std::move(b)), date_gap_days_(gap), title_similarity_(sim) {}

  std::string a_id_;
  std::string b_id_;
  long long date_gap_days_ = 0;
  double title_similarity_ = 0.0;
};

// Top-3 tf-idf tokens of a sentence pair, stored sorted.
class Signature {
 public:
  static constexpr std::size_t kSize = 3;

  explicit Signature(std::array<std::string, kSize> tokens) : tokens_(std::move(tokens)) {
    std::sort(tokens_.begin(), tokens_.end());
  }

  static Signature from_tokens(const std::vector<std::string>& tokens) {
    if (tokens.size() != kSize) {
      throw Error(ErrorCode::kInvalidArgument,
                  "signature needs exactly 3 tokens, got " + std::to_string(tokens.size()));
    }
    return Signature({tokens[0], tokens[1], tokens[2]});
  }

  const std::array<std::string, kSize>& tokens() const noexcept { return tokens_; }

  // Grouping key; tokens never contain spaces.
  std::string key() const { return tokens_[0] + " " + tokens_[1] + " " + tokens_[2]; }

  friend auto operator<=>(const Signature&, const Signature&) = default;
  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::array<std::string, kSize> tokens_;
};

inline json to_json(const Signature& s) {
  return json::array({s.tokens()[0], s.tokens()[1], s.tokens()[2]});
}

struct SentencePair {
  std::string pair_id;
  Sentence left;
  Sentence right;
  double similarity = 0.0;
  double title_similarity = 0.0;
  std::optional<Signature> signature;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

inline std::string make_pair_id(const Sentence& left, const Sentence& right) {
  return left.article_id + "#" + std::to_string(left.index) + "|" + right.article_id + "#" +
         std::to_string(right.index);
}

inline json to_json(const SentencePair& p) {
  const auto side = [](const Sentence& s) {
    return json{{"article_id", s.article_id}, {"index", s.index}, {"text", s.text}};
  };
  json j{{"pair_id", p.pair_id},
         {"left", side(p.left)},
         {"right", side(p.right)},
         {"similarity", p.similarity},
         {"title_similarity", p.title_similarity}};
  if (p.signature) j["signature"] = to_json(*p.signature);
  return j;
}

inline SentencePair sentence_pair_from_json(const json& j) {
  try {
    const auto side = [](const json& s) {
      return make_sentence(s.at("article_id").get<std::string>(), s.at("index").get<std::size_t>(),
                           s.at("text").get<std::string>());
    };
    SentencePair p;
    p.pair_id = j.at("pair_id").get<std::string>();
    p.left = side(j.at("left"));
    p.right = side(j.at("right"));
    p.similarity = j.at("similarity").get<double>();
    p.title_similarity = j.value("title_similarity", 0.0);
    if (j.contains("signature")) {
      p.signature = Signature::from_tokens(j.at("signature").get<std::vector<std::string>>());
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedJson, std::string("sentence pair: ") + e.what());
  }
}

// token -> idf, with max-idf fallback for unseen tokens.
class IdfTable {
 public:
  IdfTable() = default;
  IdfTable(std::map<std::string, double> idf, std::uint64_t doc_count)
      : idf_(std::move(idf)), doc_count_(doc_count) {
    for (const auto& [token, value] : idf_) {
      if (!(value >= 0.0) || !std::isfinite(value)) {
        throw Error(ErrorCode::kInvalidArgument, "negative or non-finite idf for '" + token + "'");
      }
      default_idf_ = std::max(default_idf_, value);
    }
  }

  double idf(std::string_view token) const {
    const auto it = idf_.find(std::string(token));
    return it == idf_.end() ? default_idf_ : it->second;
  }

  bool contains(std::string_view token) const { return idf_.count(std::string(token)) != 0; }
  std::uint64_t doc_count() const noexcept { return doc_count_; }
  double default_idf() const noexcept { return default_idf_; }
  const std::map<std::string, double>& entries() const noexcept { return idf_; }

 private:
  std::map<std::string, double> idf_;
  std::uint64_t doc_count_ = 0;
  double default_idf_ = 0.0;
};

enum class Objective { kPair2Pair, kDenoise };

inline std::string_view objective_name(Objective o) {
  return o == Objective::kPair2Pair ? "pair2pair" : "denoise";
}

struct InstanceMeta {
  std::optional<double> similarity;
  std::optional<Signature> signature;
  std::optional<std::string> left_id;
  std::optional<std::string> right_id;
  std::optional<bool> forward;
  std::uint64_t seed = 0;

  friend bool operator==(const InstanceMeta&, const InstanceMeta&) = default;
};

struct TrainingInstance {
  Objective objective = Objective::kPair2Pair;
  std::string input_text;
  std::string target_text;
  InstanceMeta meta;

  friend bool operator==(const TrainingInstance&, const TrainingInstance&) = default;
};

inline json to_json(const TrainingInstance& t) {
  json meta = json::object();
  if (t.meta.similarity) meta["similarity"] = *t.meta.similarity;
  if (t.meta.signature) meta["signature"] = to_json(*t.meta.signature);
  if (t.meta.left_id) meta["left_id"] = *t.meta.left_id;
  if (t.meta.right_id) meta["right_id"] = *t.meta.right_id;
  if (t.meta.forward) meta["direction"] = *t.meta.forward ? "fwd" : "rev";
  meta["seed"] = t.meta.seed;
  return json{{"objective", objective_name(t.objective)},
              {"input", t.input_text},
              {"target", t.target_text},
              {"meta", meta}};
}

inline TrainingInstance training_instance_from_json(const json& j) {
  try {
    TrainingInstance t;
    const auto objective = j.at("objective").get<std::string>();
    if (objective == "pair2pair") {
      t.objective = Objective::kPair2Pair;
    } else if (objective == "denoise") {
      t.objective = Objective::kDenoise;
    } else {
      throw Error(ErrorCode::kMalformedJson, "unknown objective '" + objective + "'");
    }
    t.input_text = j.at("input").get<std::string>();
    t.target_text = j.at("target").get<std::string>();
    const json& meta = j.at("meta");
    if (meta.contains("similarity")) t.meta.similarity = meta["similarity"].get<double>();
    if (meta.contains("signature")) {
      t.meta.signature = Signature::from_tokens(meta["signature"].get<std::vector<std::string>>());
    }
    if (meta.contains("left_id")) t.meta.left_id = meta["left_id"].get<std::string>();
    if (meta.contains("right_id")) t.meta.right_id = meta["right_id"].get<std::string>();
    if (meta.contains("direction")) t.meta.forward = meta["direction"].get<std::string>() == "fwd";
    t.meta.seed = meta.at("seed").get<std::uint64_t>();
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedJson, std::string("training instance: ") + e.what());
  }
}

// Output files may start with {"header": {...}} provenance records.
inline bool is_header_record(const json& j) {
  return j.is_object() && j.size() == 1 && j.contains("header");
}

}  // namespace decompkit
