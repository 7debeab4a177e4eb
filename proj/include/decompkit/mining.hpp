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

// Comparable-article mining: publication-date blocking, title similarity
// filtering, and cross-document sentence pairing inside a similarity band.

#pragma once

#include <algorithm>
#include <exception>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "decompkit/corpus.hpp"
#include "decompkit/embedding.hpp"
#include "decompkit/error.hpp"
#include "decompkit/ingest.hpp"
#include "decompkit/text.hpp"

namespace decompkit::mining {

// Indices into the article array; articles[a].id < articles[b].id.
struct CandidatePair {
  std::size_t a = 0;
  std::size_t b = 0;

  friend auto operator<=>(const CandidatePair&, const CandidatePair&) = default;
};

// Calls fn(CandidatePair) once for every unordered pair whose publication
// dates differ by at most window_days calendar days. Sort-and-sweep: cost is
// O(n log n + output).
template <typename Fn>
void for_each_date_candidate(std::span<const Article> articles, long long window_days, Fn&& fn) {
  if (window_days < 0) throw Error(ErrorCode::kInvalidArgument, "window_days must be >= 0");
  std::vector<std::size_t> order(articles.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (articles[x].published != articles[y].published) {
      return articles[x].published < articles[y].published;
    }
    return articles[x].id < articles[y].id;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Article& left = articles[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Article& right = articles[order[j]];
      if (right.published - left.published > window_days) break;
      if (left.id < right.id) {
        fn(CandidatePair{order[i], order[j]});
      } else {
        fn(CandidatePair{order[j], order[i]});
      }
    }
  }
}

inline std::vector<CandidatePair> block_by_date(std::span<const Article> articles,
                                                long long window_days = 2) {
  std::vector<CandidatePair> out;
  for_each_date_candidate(articles, window_days, [&](CandidatePair p) { out.push_back(p); });
  return out;
}

struct TitleFilterOptions {
  double threshold = 0.8;
  // Optional cheap pre-filter: candidates whose titles share fewer tokens are
  // dropped before embedding. 0 disables it.
  std::size_t min_shared_tokens = 0;
};

inline std::size_t shared_token_count(std::string_view x, std::string_view y) {
  const auto tx = text::tokenize(x);
  const auto ty = text::tokenize(y);
  const std::set<std::string> sx(tx.begin(), tx.end());
  std::set<std::string> common;
  for (const auto& t : ty) {
    if (sx.count(t)) common.insert(t);
  }
  return common.size();
}

// Keeps candidates whose title cosine is strictly greater than the threshold.
inline std::vector<ArticlePair> filter_title_pairs(std::span<const Article> articles,
                                                   std::span<const CandidatePair> candidates,
                                                   EmbedClient& client,
                                                   const TitleFilterOptions& options = {}) {
  if (!(options.threshold > 0.0 && options.threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "title threshold must be in (0, 1)");
  }
  std::vector<CandidatePair> kept;
  kept.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (options.min_shared_tokens > 0 &&
        shared_token_count(articles[c.a].title, articles[c.b].title) < options.min_shared_tokens) {
      continue;
    }
    kept.push_back(c);
  }

  std::vector<std::size_t> involved;
  for (const auto& c : kept) {
    involved.push_back(c.a);
    involved.push_back(c.b);
  }
  std::sort(involved.begin(), involved.end());
  involved.erase(std::unique(involved.begin(), involved.end()), involved.end());
  std::vector<std::string> titles;
  titles.reserve(involved.size());
  for (auto i : involved) titles.push_back(articles[i].title);
  const auto vectors = client.embed(titles);
  std::unordered_map<std::size_t, const EmbeddingVector*> by_index;
  for (std::size_t k = 0; k < involved.size(); ++k) by_index[involved[k]] = &vectors[k];

  std::vector<ArticlePair> out;
  for (const auto& c : kept) {
    const double sim = cosine(*by_index.at(c.a), *by_index.at(c.b));
    if (sim > options.threshold) {
      out.push_back(ArticlePair::make(articles[c.a].id, articles[c.b].id,
                                      articles[c.a].published - articles[c.b].published, sim));
    }
  }
  return out;
}

struct SimilarityBand {
  double lo = 0.6;
  double hi = 0.9;

  bool contains(double s) const { return s >= lo && s <= hi; }
};

// All cross-document sentence combinations of one article pair whose cosine
// lies in [band.lo, band.hi]. `left` must belong to pair.a_id().
inline std::vector<SentencePair> mine_sentence_pairs(const ArticlePair& pair,
                                                     std::span<const Sentence> left,
                                                     std::span<const Sentence> right,
                                                     EmbedClient& client,
                                                     const SimilarityBand& band = {}) {
  if (!(band.lo < band.hi)) throw Error(ErrorCode::kInvalidArgument, "band_lo must be < band_hi");
  if (left.empty() || right.empty()) return {};
  std::vector<std::string> texts;
  texts.reserve(left.size() + right.size());
  for (const auto& s : left) texts.push_back(s.text);
  for (const auto& s : right) texts.push_back(s.text);
  const auto vectors = client.embed(texts);

  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (std::size_t j = 0; j < right.size(); ++j) {
      const double sim = cosine(vectors[i], vectors[left.size() + j]);
      if (!band.contains(sim)) continue;
      SentencePair p;
      p.left = left[i];
      p.right = right[j];
      p.pair_id = make_pair_id(p.left, p.right);
      p.similarity = sim;
      p.title_similarity = pair.title_similarity();
      out.push_back(std::move(p));
    }
  }
  return out;
}

struct MineOptions {
  long long window_days = 2;
  TitleFilterOptions title;
  SimilarityBand band;
  ingest::SegmenterOptions segmenter;
  std::size_t jobs = 1;
};

struct MineStats {
  std::uint64_t articles = 0;
  std::uint64_t date_candidates = 0;
  std::uint64_t article_pairs = 0;
  std::uint64_t sentence_pairs = 0;

  json to_json() const {
    return json{{"articles", articles},
                {"date_candidates", date_candidates},
                {"article_pairs", article_pairs},
                {"sentence_pairs", sentence_pairs}};
  }
};

struct MineResult {
  std::vector<ArticlePair> article_pairs;
  std::vector<SentencePair> sentence_pairs;  // sorted by pair_id
  MineStats stats;
};

// Full mining pass. Article pairs are split round-robin across `jobs`
// workers; the result is sorted by pair_id so it does not depend on jobs.
inline MineResult mine(std::span<const Article> articles, EmbedClient& title_client,
                       EmbedClient& sentence_client, const MineOptions& options = {}) {
  MineResult result;
  result.stats.articles = articles.size();
  const auto candidates = block_by_date(articles, options.window_days);
  result.stats.date_candidates = candidates.size();
  result.article_pairs = filter_title_pairs(articles, candidates, title_client, options.title);
  result.stats.article_pairs = result.article_pairs.size();

  std::unordered_map<std::string, const Article*> by_id;
  for (const auto& a : articles) by_id[a.id] = &a;
  std::unordered_map<std::string, std::vector<Sentence>> sentences;
  for (const auto& p : result.article_pairs) {
    for (const auto* id : {&p.a_id(), &p.b_id()}) {
      if (!sentences.count(*id)) {
        sentences[*id] = ingest::segment_sentences(*by_id.at(*id), options.segmenter);
      }
    }
  }

  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  std::vector<std::vector<SentencePair>> partial(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  const auto work = [&](std::size_t w) {
    try {
      for (std::size_t k = w; k < result.article_pairs.size(); k += jobs) {
        const auto& p = result.article_pairs[k];
        auto found = mine_sentence_pairs(p, sentences.at(p.a_id()), sentences.at(p.b_id()),
                                         sentence_client, options.band);
        partial[w].insert(partial[w].end(), std::make_move_iterator(found.begin()),
                          std::make_move_iterator(found.end()));
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < jobs; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& part : partial) {
    result.sentence_pairs.insert(result.sentence_pairs.end(), std::make_move_iterator(part.begin()),
                                 std::make_move_iterator(part.end()));
  }
  std::sort(result.sentence_pairs.begin(), result.sentence_pairs.end(),
            [](const SentencePair& x, const SentencePair& y) { return x.pair_id < y.pair_id; });
  result.stats.sentence_pairs = result.sentence_pairs.size();
  return result;
}

}  // namespace decompkit::mining
