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

// Dataset comparison statistics over a sample of sentence pairs.

#pragma once

#include <cmath>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "decompkit/corpus.hpp"
#include "decompkit/embedding.hpp"
#include "decompkit/error.hpp"
#include "decompkit/ingest.hpp"
#include "decompkit/random.hpp"
#include "decompkit/text.hpp"

namespace decompkit::metrics {

struct TextPair {
  std::string first;
  std::string second;
};

inline std::vector<TextPair> text_pairs(std::span<const SentencePair> pairs) {
  std::vector<TextPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({p.left.text, p.right.text});
  return out;
}

// Uniform sample of min(k, size) items without replacement.
template <typename T>
std::vector<T> sample_pairs(std::vector<T> pairs, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "sample size must be >= 1");
  Rng rng(seed);
  sample_prefix(pairs, k, rng);
  return pairs;
}

// Whitespace-separated text: "token v1 ... vD" per line. A leading
// "count dim" line (word2vec style) is skipped. Tokens are looked up after
// the shared tokenizer lowercases them, so the file should be lowercase.
class WordVectors {
 public:
  void add(std::string token, std::vector<double> values) {
    if (dim_ == 0) dim_ = values.size();
    if (values.size() != dim_ || dim_ == 0) {
      throw Error(ErrorCode::kDimensionMismatch, "word vector for '" + token + "' has dim " +
                                                     std::to_string(values.size()));
    }
    table_[std::move(token)] = std::move(values);
  }

  static WordVectors load(const std::string& path) {
    ingest::LineReader reader(path);
    WordVectors wv;
    std::string line;
    bool first = true;
    while (reader.next(line)) {
      std::istringstream in(line);
      std::string token;
      if (!(in >> token)) continue;
      std::vector<double> values;
      double v;
      while (in >> v) values.push_back(v);
      if (first && values.size() == 1 && token.find_first_not_of("0123456789") == std::string::npos) {
        first = false;
        continue;
      }
      first = false;
      wv.add(std::move(token), std::move(values));
    }
    if (wv.table_.empty()) throw Error(ErrorCode::kEmptyInput, "no word vectors in " + path);
    return wv;
  }

  const std::vector<double>* find(const std::string& token) const {
    const auto it = table_.find(token);
    return it == table_.end() ? nullptr : &it->second;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::unordered_map<std::string, std::vector<double>> table_;
  std::size_t dim_ = 0;
};

struct MetricsReport {
  std::size_t sample_size = 0;
  double mean_length = 0.0;
  double mean_length_diff = 0.0;
  double embed_sim = 0.0;
  double sem_sim = 0.0;
  // Bookkeeping for the word-vector average.
  double oov_fraction = 0.0;
  std::size_t pairs_without_word_vectors = 0;

  json to_json() const {
    return json{{"sample_size", sample_size},
                {"mean_length", mean_length},
                {"mean_length_diff", mean_length_diff},
                {"embed_sim", embed_sim},
                {"sem_sim", sem_sim},
                {"oov_fraction", oov_fraction},
                {"pairs_without_word_vectors", pairs_without_word_vectors},
                {"definitions",
                 {{"length", "mean over pairs of the mean token count of the two sentences"},
                  {"length_diff", "mean over pairs of |tokens(s1) - tokens(s2)|"},
                  {"embed_sim", "mean cosine of averaged word vectors, OOV tokens skipped"},
                  {"sem_sim", "mean cosine of backend sentence embeddings"}}}};
  }
};

struct MetricsOptions {
  // More OOV tokens than this fraction is an error, not a warning.
  double max_oov_fraction = 0.5;
};

namespace detail {

// Average of known word vectors; empty if none are known.
inline std::vector<double> average_vector(const std::vector<std::string>& tokens,
                                          const WordVectors& wv, std::size_t& oov) {
  std::vector<double> sum;
  std::size_t known = 0;
  for (const auto& t : tokens) {
    const auto* v = wv.find(t);
    if (v == nullptr) {
      ++oov;
      continue;
    }
    if (sum.empty()) sum.assign(v->size(), 0.0);
    for (std::size_t i = 0; i < v->size(); ++i) sum[i] += (*v)[i];
    ++known;
  }
  for (auto& x : sum) x /= static_cast<double>(known);
  return sum;
}

inline bool is_zero(const std::vector<double>& v) {
  for (double x : v) {
    if (x != 0.0) return false;
  }
  return true;
}

}  // namespace detail

inline MetricsReport compute_metrics(std::span<const TextPair> pairs, const WordVectors& wv,
                                     EmbedClient& client, const MetricsOptions& options = {}) {
  if (pairs.empty()) throw Error(ErrorCode::kEmptyInput, "no pairs to measure");
  MetricsReport r;
  r.sample_size = pairs.size();

  double length_sum = 0.0, diff_sum = 0.0, embed_sum = 0.0;
  std::size_t embed_n = 0, total_tokens = 0, oov = 0;
  std::vector<std::string> sentences;
  sentences.reserve(pairs.size() * 2);
  for (const auto& p : pairs) {
    const auto t1 = text::tokenize(p.first);
    const auto t2 = text::tokenize(p.second);
    const auto n1 = static_cast<double>(t1.size());
    const auto n2 = static_cast<double>(t2.size());
    length_sum += (n1 + n2) / 2.0;
    diff_sum += std::fabs(n1 - n2);
    total_tokens += t1.size() + t2.size();
    const auto v1 = detail::average_vector(t1, wv, oov);
    const auto v2 = detail::average_vector(t2, wv, oov);
    if (v1.empty() || v2.empty() || detail::is_zero(v1) || detail::is_zero(v2)) {
      ++r.pairs_without_word_vectors;
    } else {
      embed_sum += cosine(v1, v2);
      ++embed_n;
    }
    sentences.push_back(p.first);
    sentences.push_back(p.second);
  }
  r.oov_fraction = total_tokens == 0 ? 1.0 : static_cast<double>(oov) / static_cast<double>(total_tokens);
  if (r.oov_fraction > options.max_oov_fraction || embed_n == 0) {
    throw Error(ErrorCode::kMissingVectors,
                "OOV fraction " + std::to_string(r.oov_fraction) + " exceeds limit");
  }
  const auto n = static_cast<double>(pairs.size());
  r.mean_length = length_sum / n;
  r.mean_length_diff = diff_sum / n;
  r.embed_sim = embed_sum / static_cast<double>(embed_n);

  const auto vectors = client.embed(sentences);
  double sem_sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) sem_sum += cosine(vectors[2 * i], vectors[2 * i + 1]);
  r.sem_sim = sem_sum / n;
  return r;
}

}  // namespace decompkit::metrics
