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

// Test-only helpers: scripted backends and independent oracles. Nothing here
// calls the code path it is used to check.

#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "decompkit/backend.hpp"
#include "decompkit/corpus.hpp"
#include "decompkit/error.hpp"
#include "decompkit/text.hpp"

namespace decompkit::testing {

// Returns exactly the vectors it was given (no normalization) so boundary
// cosines like 4/5 stay exact. Unknown texts are an error.
class TableEmbed : public EmbedBackend {
 public:
  explicit TableEmbed(std::map<std::string, std::vector<double>> table) : table_(std::move(table)) {}

  EmbedResponse embed(const std::string&, const std::vector<std::string>& texts) override {
    std::lock_guard lock(mu_);
    ++calls_;
    EmbedResponse r;
    for (const auto& t : texts) {
      const auto it = table_.find(t);
      if (it == table_.end()) throw Error(ErrorCode::kProtocolError, "unscripted text: " + t);
      r.vectors.push_back(it->second);
      r.dim = it->second.size();
      requested_.push_back(t);
    }
    return r;
  }

  int calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }
  std::vector<std::string> requested() const {
    std::lock_guard lock(mu_);
    return requested_;
  }

 private:
  std::map<std::string, std::vector<double>> table_;
  mutable std::mutex mu_;
  int calls_ = 0;
  std::vector<std::string> requested_;
};

// Records every correction request.
class RecordingCorrector : public CorrectBackend {
 public:
  explicit RecordingCorrector(CorrectBackend& inner) : inner_(inner) {}

  std::string correct(const std::string& prompt, const std::string& sentence) override {
    {
      std::lock_guard lock(mu_);
      payloads_.push_back(prompt + "\n" + sentence);
    }
    return inner_.correct(prompt, sentence);
  }

  std::vector<std::string> payloads() const {
    std::lock_guard lock(mu_);
    return payloads_;
  }

 private:
  CorrectBackend& inner_;
  mutable std::mutex mu_;
  std::vector<std::string> payloads_;
};

// Brute-force all-pairs date filter, keyed by id.
inline std::set<std::pair<std::string, std::string>> brute_force_blocking(
    const std::vector<Article>& articles, long long window) {
  std::set<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    for (std::size_t j = 0; j < articles.size(); ++j) {
      if (i == j) continue;
      const long long gap = articles[i].published.day_number() - articles[j].published.day_number();
      if ((gap < 0 ? -gap : gap) <= window && articles[i].id < articles[j].id) {
        out.emplace(articles[i].id, articles[j].id);
      }
    }
  }
  return out;
}

// Splices denoising targets back into their inputs. Sentinels are recognized
// by the literal "⟨M<k>⟩" form.
inline std::string splice_denoise(const std::string& input, const std::string& target) {
  const auto is_sentinel = [](const std::string& tok) {
    return tok.rfind("⟨M", 0) == 0 && tok.size() > 6 && tok.substr(tok.size() - 3) == "⟩";
  };
  std::map<std::string, std::vector<std::string>> spans;
  std::string current;
  for (const auto& tok : text::split_whitespace(target)) {
    if (is_sentinel(tok)) {
      current = tok;
      spans[current];
    } else {
      spans[current].push_back(tok);
    }
  }
  std::vector<std::string> out;
  for (const auto& tok : text::split_whitespace(input)) {
    if (is_sentinel(tok)) {
      for (const auto& s : spans[tok]) out.push_back(s);
    } else {
      out.push_back(tok);
    }
  }
  return text::join(out, " ");
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("decompkit_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline Article make_article(std::string id, std::string title, std::string body, int day,
                            std::string domain = "example.com") {
  Article a;
  a.id = std::move(id);
  a.title = std::move(title);
  a.body = std::move(body);
  a.published = Date::from_ymd(2019, 1, 1)->plus_days(day);
  a.source_domain = std::move(domain);
  return a;
}

// Clustered synthetic news: each event has a base title and base sentences;
// its articles perturb a few words of each, so titles of one event are close
// and sentences land at assorted similarities.
inline std::vector<Article> synthetic_news(int events, int per_event, unsigned seed,
                                           int days = 30) {
  std::mt19937 gen(seed);
  const auto word = [&] { return "w" + std::to_string(gen() % 2000); };
  std::vector<Article> out;
  for (int e = 0; e < events; ++e) {
    std::vector<std::string> title(10);
    for (auto& w : title) w = word();
    std::vector<std::vector<std::string>> sentences(5, std::vector<std::string>(12));
    for (auto& s : sentences) {
      for (auto& w : s) w = word();
    }
    const int day = static_cast<int>(gen() % static_cast<unsigned>(days));
    for (int k = 0; k < per_event; ++k) {
      auto t = title;
      t[gen() % t.size()] = word();
      std::string body;
      for (auto s : sentences) {
        const int edits = 1 + static_cast<int>(gen() % 6);
        for (int r = 0; r < edits; ++r) s[gen() % s.size()] = word();
        s.front()[0] = 'W';
        body += text::join(s, " ") + ". ";
      }
      out.push_back(make_article("e" + std::to_string(e) + "a" + std::to_string(k),
                                 text::join(t, " "), body,
                                 day + static_cast<int>(gen() % 2)));
    }
  }
  return out;
}

}  // namespace decompkit::testing
