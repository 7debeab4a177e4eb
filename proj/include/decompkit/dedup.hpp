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

// tf-idf signatures and per-signature capping of sentence pairs.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "decompkit/corpus.hpp"
#include "decompkit/error.hpp"
#include "decompkit/random.hpp"
#include "decompkit/text.hpp"

namespace decompkit::dedup {

// Accumulates document frequencies one document at a time.
class IdfBuilder {
 public:
  void add_document(std::string_view doc) {
    ++docs_;
    const auto tokens = text::tokenize(doc);
    const std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& t : unique) ++df_[t];
  }

  std::uint64_t doc_count() const noexcept { return docs_; }

  // idf(t) = ln(N / df(t)), no smoothing.
  IdfTable build() const {
    if (docs_ == 0) throw Error(ErrorCode::kEmptyCorpus, "idf needs at least one document");
    std::map<std::string, double> idf;
    for (const auto& [t, df] : df_) {
      idf[t] = std::log(static_cast<double>(docs_) / static_cast<double>(df));
    }
    return IdfTable(std::move(idf), docs_);
  }

 private:
  std::uint64_t docs_ = 0;
  std::map<std::string, std::uint64_t> df_;
};

template <typename Range>
IdfTable build_idf(const Range& documents) {
  IdfBuilder b;
  for (const auto& d : documents) b.add_document(d);
  return b.build();
}

// TSV: first line "#docs=N", then "token<TAB>idf" lines.
inline void write_idf(const IdfTable& table, std::ostream& out) {
  out << "#docs=" << table.doc_count() << "\n";
  char buf[64];
  for (const auto& [t, v] : table.entries()) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << t << '\t' << buf << '\n';
  }
}

inline void save_idf(const IdfTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  write_idf(table, out);
  if (!out) throw Error(ErrorCode::kIoError, "write failed on " + path);
}

inline IdfTable read_idf(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("#docs=", 0) != 0) {
    throw Error(ErrorCode::kMalformedJson, "idf table must start with '#docs=N'");
  }
  const std::uint64_t docs = std::stoull(line.substr(6));
  std::map<std::string, double> idf;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kMalformedJson, "idf line " + std::to_string(lineno) + " has no tab");
    }
    idf[line.substr(0, tab)] = std::stod(line.substr(tab + 1));
  }
  if (docs == 0) throw Error(ErrorCode::kEmptyCorpus, "idf table reports zero documents");
  return IdfTable(std::move(idf), docs);
}

inline IdfTable load_idf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return read_idf(in);
}

// Top three tokens by tf * idf, where tf counts occurrences over both
// sentences together. Ties go to the lexicographically smaller token.
inline Signature signature(std::string_view left, std::string_view right, const IdfTable& idf) {
  std::map<std::string, std::uint64_t> tf;
  for (auto& t : text::tokenize(left)) ++tf[std::move(t)];
  for (auto& t : text::tokenize(right)) ++tf[std::move(t)];
  if (tf.size() < Signature::kSize) {
    throw Error(ErrorCode::kTooFewTokens,
                "pair has " + std::to_string(tf.size()) + " distinct tokens");
  }
  std::vector<std::pair<double, std::string>> scored;
  scored.reserve(tf.size());
  for (const auto& [t, count] : tf) scored.emplace_back(static_cast<double>(count) * idf.idf(t), t);
  std::partial_sort(scored.begin(), scored.begin() + Signature::kSize, scored.end(),
                    [](const auto& x, const auto& y) {
                      if (x.first != y.first) return x.first > y.first;
                      return x.second < y.second;
                    });
  return Signature({scored[0].second, scored[1].second, scored[2].second});
}

inline Signature signature(const SentencePair& p, const IdfTable& idf) {
  return signature(p.left.text, p.right.text, idf);
}

// Keeps at most `cap` pairs per signature. Each group is ordered by pair_id
// and sampled with an Rng seeded from (seed, signature), so the result does
// not depend on input order. Output is sorted by (signature, pair_id).
// Every pair must already carry a signature.
inline std::vector<SentencePair> dedup_cap(std::vector<SentencePair> pairs, std::size_t cap,
                                           std::uint64_t seed) {
  if (cap < 1) throw Error(ErrorCode::kInvalidArgument, "cap must be >= 1");
  std::map<Signature, std::vector<SentencePair>> groups;
  for (auto& p : pairs) {
    if (!p.signature) throw Error(ErrorCode::kInvalidArgument, "pair " + p.pair_id + " has no signature");
    groups[*p.signature].push_back(std::move(p));
  }
  std::vector<SentencePair> out;
  for (auto& [sig, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const SentencePair& x, const SentencePair& y) { return x.pair_id < y.pair_id; });
    Rng rng(derive_seed(seed, sig.key()));
    sample_prefix(group, cap, rng);
    std::sort(group.begin(), group.end(),
              [](const SentencePair& x, const SentencePair& y) { return x.pair_id < y.pair_id; });
    out.insert(out.end(), std::make_move_iterator(group.begin()),
               std::make_move_iterator(group.end()));
  }
  return out;
}

struct DedupStats {
  std::uint64_t input = 0;
  std::uint64_t too_few_tokens = 0;
  std::uint64_t signatures = 0;
  std::uint64_t retained = 0;

  json to_json() const {
    return json{{"input", input},
                {"too_few_tokens", too_few_tokens},
                {"signatures", signatures},
                {"retained", retained}};
  }
};

struct DedupResult {
  std::vector<SentencePair> retained;
  DedupStats stats;
};

// Signs every pair (in parallel across `jobs` workers), drops pairs with too
// few tokens, then applies dedup_cap in a single grouping pass.
inline DedupResult sign_and_dedup(std::vector<SentencePair> pairs, const IdfTable& idf,
                                  std::size_t cap, std::uint64_t seed, std::size_t jobs = 1) {
  DedupResult r;
  r.stats.input = pairs.size();
  jobs = std::max<std::size_t>(1, jobs);
  std::vector<char> ok(pairs.size(), 0);
  std::vector<std::exception_ptr> errors(jobs);
  const auto work = [&](std::size_t w) {
    try {
      const std::size_t chunk = (pairs.size() + jobs - 1) / jobs;
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(pairs.size(), begin + chunk);
      for (std::size_t i = begin; i < end; ++i) {
        try {
          pairs[i].signature = signature(pairs[i], idf);
          ok[i] = 1;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kTooFewTokens) throw;
        }
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
  std::vector<SentencePair> signed_pairs;
  signed_pairs.reserve(pairs.size());
  std::set<Signature> distinct;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!ok[i]) {
      ++r.stats.too_few_tokens;
      continue;
    }
    distinct.insert(*pairs[i].signature);
    signed_pairs.push_back(std::move(pairs[i]));
  }
  r.stats.signatures = distinct.size();
  r.retained = dedup_cap(std::move(signed_pairs), cap, seed);
  r.stats.retained = r.retained.size();
  return r;
}

}  // namespace decompkit::dedup
