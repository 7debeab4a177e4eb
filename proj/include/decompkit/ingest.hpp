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

// Streaming corpus ingestion and rule-based sentence segmentation.
//
// One reader handles one file at a time, so memory stays bounded by the
// longest line. read_corpus_parallel() runs one reader per file; articles from
// different files reach the callback in no particular order.

#pragma once

#include <zlib.h>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include "decompkit/corpus.hpp"
#include "decompkit/error.hpp"
#include "decompkit/text.hpp"

namespace decompkit::ingest {

// Reads '\n'-terminated lines from a plain or gzip (".gz") file.
class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path) {
    if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
      gz_ = gzopen(path.c_str(), "rb");
      if (gz_ == nullptr) throw Error(ErrorCode::kIoError, "cannot open " + path);
    } else {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error(ErrorCode::kIoError, "cannot open " + path);
    }
  }
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;
  ~LineReader() {
    if (gz_ != nullptr) gzclose(gz_);
  }

  bool next(std::string& line) {
    line.clear();
    if (gz_ == nullptr) {
      if (!std::getline(file_, line)) {
        if (file_.bad()) throw Error(ErrorCode::kIoError, "read failed on " + path_);
        return false;
      }
      strip_cr(line);
      return true;
    }
    char buf[8192];
    bool any = false;
    while (gzgets(gz_, buf, sizeof buf) != nullptr) {
      any = true;
      line += buf;
      if (!line.empty() && line.back() == '\n') {
        line.pop_back();
        strip_cr(line);
        return true;
      }
    }
    int err = 0;
    gzerror(gz_, &err);
    if (err != Z_OK && err != Z_STREAM_END) {
      throw Error(ErrorCode::kIoError, "gzip read failed on " + path_);
    }
    strip_cr(line);
    return any;
  }

 private:
  static void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }

  std::string path_;
  std::ifstream file_;
  gzFile gz_ = nullptr;
};

enum class ValidationPolicy { kSkipInvalid, kFailFast };

struct IngestCounters {
  std::uint64_t read = 0;
  std::uint64_t accepted = 0;
  std::map<std::string, std::uint64_t> rejected;

  std::uint64_t rejected_total() const {
    std::uint64_t n = 0;
    for (const auto& [reason, count] : rejected) n += count;
    return n;
  }

  void merge(const IngestCounters& other) {
    read += other.read;
    accepted += other.accepted;
    for (const auto& [reason, count] : other.rejected) rejected[reason] += count;
  }

  json to_json() const {
    json r = json::object();
    for (const auto& [reason, count] : rejected) r[reason] = count;
    return json{{"read", read}, {"accepted", accepted}, {"rejected", r}};
  }
};

// Pulls validated Articles from JSONL files in order. Blank lines are not
// counted. Ids must be unique across everything this reader has seen.
class CorpusReader {
 public:
  CorpusReader(std::vector<std::string> paths, ValidationPolicy policy)
      : paths_(std::move(paths)), policy_(policy) {}

  std::optional<Article> next() {
    std::string line;
    for (;;) {
      if (!reader_) {
        if (file_index_ >= paths_.size()) return std::nullopt;
        reader_ = std::make_unique<LineReader>(paths_[file_index_++]);
      }
      if (!reader_->next(line)) {
        reader_.reset();
        continue;
      }
      if (text::trim(line).empty()) continue;
      ++counters_.read;
      try {
        json raw;
        try {
          raw = json::parse(line);
        } catch (const json::parse_error& e) {
          throw Error(ErrorCode::kMalformedJson, e.what());
        }
        Article a = validate_article(raw);
        if (!seen_ids_.insert(a.id).second) {
          throw Error(ErrorCode::kDuplicateId, "'" + a.id + "'", "id");
        }
        ++counters_.accepted;
        return a;
      } catch (const Error& e) {
        ++counters_.rejected[std::string(e.code_name())];
        if (policy_ == ValidationPolicy::kFailFast) throw;
      }
    }
  }

  const IngestCounters& counters() const noexcept { return counters_; }

 private:
  std::vector<std::string> paths_;
  ValidationPolicy policy_;
  std::size_t file_index_ = 0;
  std::unique_ptr<LineReader> reader_;
  std::unordered_set<std::string> seen_ids_;
  IngestCounters counters_;
};

inline std::vector<Article> read_corpus(const std::vector<std::string>& paths,
                                        ValidationPolicy policy,
                                        IngestCounters* counters = nullptr) {
  CorpusReader reader(paths, policy);
  std::vector<Article> out;
  while (auto a = reader.next()) out.push_back(std::move(*a));
  if (counters) *counters = reader.counters();
  return out;
}

// One thread per file. The callback is serialized by an internal mutex.
// Duplicate ids are checked per file only.
inline IngestCounters read_corpus_parallel(const std::vector<std::string>& paths,
                                           ValidationPolicy policy,
                                           const std::function<void(Article&&)>& sink) {
  std::mutex mu;
  IngestCounters total;
  std::vector<std::exception_ptr> errors(paths.size());
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    workers.emplace_back([&, i] {
      try {
        CorpusReader reader({paths[i]}, policy);
        while (auto a = reader.next()) {
          std::lock_guard lock(mu);
          sink(std::move(*a));
        }
        std::lock_guard lock(mu);
        total.merge(reader.counters());
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Sentence segmentation

struct SegmenterOptions {
  std::size_t min_sentence_tokens = 5;
};

namespace detail {

// Lowercased, without the trailing period. These never end a sentence.
inline const std::set<std::string, std::less<>>& title_abbreviations() {
  static const std::set<std::string, std::less<>> abbrevs = {
      "mr",   "mrs", "ms",  "dr",   "prof", "sr",   "jr",  "st",  "sen",  "rep",
      "gov",  "gen", "col", "lt",   "sgt",  "capt", "cmdr", "adm", "maj", "pres",
      "rev",  "hon", "mt",  "ft",   "vs",   "approx", "dept", "univ", "fig", "ave",
      "blvd", "rd",  "e.g", "i.e"};
  return abbrevs;
}

// Abbreviations that only continue the sentence before a number ("Jan. 5",
// "No. 3").
inline const std::set<std::string, std::less<>>& numeric_abbreviations() {
  static const std::set<std::string, std::less<>> abbrevs = {
      "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "no"};
  return abbrevs;
}

// Company suffixes behave like dotted acronyms.
inline const std::set<std::string, std::less<>>& company_abbreviations() {
  static const std::set<std::string, std::less<>> abbrevs = {"inc", "corp", "co", "ltd"};
  return abbrevs;
}

// Words that reliably open a new sentence after a dotted acronym
// ("... to the U.S. The talks ...").
inline const std::set<std::string, std::less<>>& sentence_starters() {
  static const std::set<std::string, std::less<>> words = {
      "the", "he", "she", "it", "they", "we", "i", "but", "and", "a", "an", "in", "this",
      "that", "there", "these", "those", "his", "her", "its", "their", "our", "on", "at",
      "after", "before", "when", "while", "however", "meanwhile", "officials", "as"};
  return words;
}

inline bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// Length of a closing quote/bracket at `pos` (ASCII or U+201D / U+2019), or 0.
inline std::size_t closer_length(std::string_view s, std::size_t pos) {
  if (is_closer(s[pos])) return 1;
  if (s.compare(pos, 3, "\u201d") == 0 || s.compare(pos, 3, "\u2019") == 0) return 3;
  return 0;
}

inline std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// True if the word (including its final '.') is an abbreviation that should
// not end a sentence when followed by `next_word`.
inline bool blocks_split(std::string_view word, std::string_view next_word) {
  while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\'')) {
    word.remove_prefix(1);
  }
  if (word.size() < 2 || word.back() != '.') return false;
  const std::string_view stem = word.substr(0, word.size() - 1);
  const std::string lower = lower_ascii(stem);
  // Single-letter initial: "J. Smith".
  if (stem.size() == 1 && std::isupper(static_cast<unsigned char>(stem[0]))) return true;
  if (title_abbreviations().count(lower)) return true;
  if (numeric_abbreviations().count(lower)) {
    return !next_word.empty() && std::isdigit(static_cast<unsigned char>(next_word[0]));
  }
  // Dotted acronym: "U.S", "U.K", "D.C".
  bool dotted = stem.size() >= 3;
  for (std::size_t i = 0; i < stem.size() && dotted; ++i) {
    const bool letter_slot = i % 2 == 0;
    dotted = letter_slot ? std::isalpha(static_cast<unsigned char>(stem[i])) != 0 : stem[i] == '.';
  }
  // Clock times ("5 p.m. Passengers ...") end sentences like any word.
  if (lower == "a.m" || lower == "p.m") dotted = false;
  if (dotted || company_abbreviations().count(lower)) {
    std::string next = lower_ascii(next_word);
    while (!next.empty() && !std::isalpha(static_cast<unsigned char>(next.back()))) next.pop_back();
    return sentence_starters().count(next) == 0;
  }
  return false;
}

}  // namespace detail

// Splits text into sentence strings (no token filtering). A boundary is a
// run of . ! ? (plus closing quotes/brackets) followed by whitespace and an
// uppercase letter, digit, opening quote/bracket or non-ASCII byte, or by the
// end of the text; abbreviations suppress '.' boundaries.
inline std::vector<std::string> split_sentences(std::string_view body) {
  std::vector<std::string> out;
  std::size_t start = 0;
  const std::size_t n = body.size();
  const auto emit = [&](std::size_t end) {
    const auto piece = text::trim(body.substr(start, end - start));
    if (!piece.empty()) out.emplace_back(piece);
    start = end;
  };
  std::size_t i = 0;
  while (i < n) {
    const char c = body[i];
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    while (end < n && (body[end] == '.' || body[end] == '!' || body[end] == '?')) ++end;
    while (end < n) {
      const std::size_t len = detail::closer_length(body, end);
      if (len == 0) break;
      end += len;
    }
    if (end < n && !text::is_space(body[end])) {
      i = end;
      continue;
    }
    std::size_t next = end;
    while (next < n && text::is_space(body[next])) ++next;
    if (next >= n) {
      emit(end);
      i = end;
      break;
    }
    const unsigned char first = static_cast<unsigned char>(body[next]);
    const bool opens = std::isupper(first) || std::isdigit(first) || first == '"' ||
                       first == '\'' || first == '(' || first == '[' || first >= 0x80;
    if (!opens) {
      i = end;
      continue;
    }
    if (c == '.' && end == i + 1) {
      std::size_t ws = i;
      while (ws > start && !text::is_space(body[ws - 1])) --ws;
      std::size_t next_end = next;
      while (next_end < n && !text::is_space(body[next_end])) ++next_end;
      if (detail::blocks_split(body.substr(ws, i + 1 - ws), body.substr(next, next_end - next))) {
        i = end;
        continue;
      }
    }
    emit(end);
    i = end;
  }
  if (start < n) emit(n);
  return out;
}

// Sentences of the article body that meet the token minimum, indexed
// contiguously from 0. Titles are not segmented.
inline std::vector<Sentence> segment_sentences(const Article& article,
                                               const SegmenterOptions& options = {}) {
  std::vector<Sentence> out;
  for (auto& piece : split_sentences(article.body)) {
    Sentence s = make_sentence(article.id, out.size(), std::move(piece));
    if (s.token_count >= options.min_sentence_tokens) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace decompkit::ingest
