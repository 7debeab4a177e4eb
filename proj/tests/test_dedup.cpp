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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "decompkit/dedup.hpp"
#include "test_support.hpp"

namespace decompkit {
namespace {

TEST(BuildIdf, Formula) {
  const std::vector<std::string> docs = {"a b c", "A b.", "a d"};
  const auto idf = dedup::build_idf(docs);
  EXPECT_EQ(idf.doc_count(), 3u);
  EXPECT_EQ(idf.idf("a"), 0.0);
  EXPECT_NEAR(idf.idf("c"), 1.0986, 1e-4);
  // Hand-computed df: a=3, b=2, c=1, d=1.
  const std::map<std::string, double> expected = {
      {"a", std::log(3.0 / 3)}, {"b", std::log(3.0 / 2)}, {"c", std::log(3.0)}, {"d", std::log(3.0)}};
  EXPECT_EQ(idf.entries(), expected);
  EXPECT_EQ(idf.default_idf(), std::log(3.0));
  EXPECT_EQ(idf.idf("never-seen"), std::log(3.0));
}

TEST(BuildIdf, EmptyCorpus) {
  try {
    dedup::build_idf(std::vector<std::string>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
}

TEST(BuildIdf, TsvRoundTripIsExact) {
  const std::vector<std::string> docs = {"x y z", "x q", "w", "x y", "p q r s"};
  const auto idf = dedup::build_idf(docs);
  std::stringstream buf;
  dedup::write_idf(idf, buf);
  EXPECT_EQ(buf.str().rfind("#docs=5\n", 0), 0u);
  const auto back = dedup::read_idf(buf);
  EXPECT_EQ(back.entries(), idf.entries());
  EXPECT_EQ(back.doc_count(), 5u);
}

TEST(BuildIdf, RejectsBadTables) {
  std::stringstream no_header("a\t1\n");
  EXPECT_THROW(dedup::read_idf(no_header), Error);
  std::stringstream negative("#docs=3\na\t-1\n");
  EXPECT_THROW(dedup::read_idf(negative), Error);
}

IdfTable table(std::map<std::string, double> m) { return IdfTable(std::move(m), 10); }

TEST(Signature, DistinctTokensTakeHighestIdf) {
  const auto idf = table({{"a", 0.1}, {"b", 0.5}, {"c", 0.3}, {"d", 0.9}, {"e", 0.2}});
  EXPECT_EQ(dedup::signature("a b c", "d e", idf), Signature({"b", "c", "d"}));
}

TEST(Signature, TfOverConcatenationWithLexicographicTies) {
  const auto idf = table({{"syria", 1.0}, {"troops", 2.0}, {"policy", 2.0}});
  const auto sig = dedup::signature("syria syria", "troops policy", idf);
  EXPECT_EQ(sig, Signature({"policy", "syria", "troops"}));
  EXPECT_EQ(sig.tokens()[0], "policy");
}

TEST(Signature, OrderInvariantAndOovUsesDefault) {
  const auto idf = table({{"the", 0.0}, {"army", 1.0}, {"left", 0.5}, {"town", 0.7}});
  const auto s1 = dedup::signature("The army left town", "zyx arrived", idf);
  const auto s2 = dedup::signature("zyx arrived", "The army left town", idf);
  EXPECT_EQ(s1, s2);
  // OOV "zyx" and "arrived" get max idf 1.0; tie with "army" broken lexicographically.
  EXPECT_EQ(s1, Signature({"army", "arrived", "zyx"}));
}

TEST(Signature, TooFewTokens) {
  try {
    dedup::signature("yes yes", "no", table({}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewTokens);
  }
}

SentencePair signed_pair(const std::string& id, const Signature& sig) {
  SentencePair p;
  p.pair_id = id;
  p.left = make_sentence("l", 0, "left " + id);
  p.right = make_sentence("r", 0, "right " + id);
  p.similarity = 0.7;
  p.signature = sig;
  return p;
}

std::vector<std::string> ids(const std::vector<SentencePair>& pairs) {
  std::vector<std::string> out;
  for (const auto& p : pairs) out.push_back(p.pair_id);
  return out;
}

TEST(DedupCap, SmallGroupKeptWhole) {
  const Signature sig({"a", "b", "c"});
  std::vector<SentencePair> pairs = {signed_pair("p2", sig), signed_pair("p0", sig), signed_pair("p1", sig)};
  EXPECT_EQ(ids(dedup::dedup_cap(pairs, 10, 1)), (std::vector<std::string>{"p0", "p1", "p2"}));
}

TEST(DedupCap, LargeGroupCappedAndReproducible) {
  const Signature sig({"a", "b", "c"});
  std::vector<SentencePair> pairs;
  for (int i = 0; i < 25; ++i) pairs.push_back(signed_pair("p" + std::to_string(100 + i), sig));
  const auto a = dedup::dedup_cap(pairs, 10, 42);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(ids(dedup::dedup_cap(pairs, 10, 42)), ids(a));
  std::reverse(pairs.begin(), pairs.end());
  EXPECT_EQ(ids(dedup::dedup_cap(pairs, 10, 42)), ids(a));
  EXPECT_NE(ids(dedup::dedup_cap(pairs, 10, 43)), ids(a));
}

// Independent reference: group by signature key, order by id, full forward
// Fisher-Yates with the same seeded stream, keep the first `cap`.
std::vector<std::string> reference_dedup(const std::vector<SentencePair>& pairs, std::size_t cap,
                                         std::uint64_t seed) {
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& p : pairs) groups[p.signature->key()].push_back(p.pair_id);
  std::map<std::array<std::string, 3>, std::vector<std::string>> kept;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end());
    std::mt19937_64 eng(derive_seed(seed, key));
    const auto below = [&](std::uint64_t n) {
      const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
      for (;;) {
        const std::uint64_t x = eng();
        if (x < limit) return x % n;
      }
    };
    for (std::size_t i = 0; i + 1 < members.size(); ++i) {
      std::swap(members[i], members[i + below(members.size() - i)]);
    }
    members.resize(std::min(cap, members.size()));
    std::sort(members.begin(), members.end());
    const auto& p = *std::find_if(pairs.begin(), pairs.end(),
                                  [&](const SentencePair& q) { return q.signature->key() == key; });
    kept[p.signature->tokens()] = members;
  }
  std::vector<std::string> out;
  for (const auto& [sig, members] : kept) out.insert(out.end(), members.begin(), members.end());
  return out;
}

TEST(DedupCap, MatchesReferenceSampler) {
  std::mt19937 gen(3);
  std::vector<Signature> sigs;
  for (int s = 0; s < 7; ++s) {
    sigs.push_back(Signature({"t" + std::to_string(s), "u" + std::to_string(s), "v"}));
  }
  std::vector<SentencePair> pairs;
  for (int i = 0; i < 100; ++i) {
    // Skewed: signature 0 gets about half the pairs.
    const std::size_t s = (gen() % 2 == 0) ? 0 : gen() % sigs.size();
    pairs.push_back(signed_pair("pair" + std::to_string(i), sigs[s]));
  }
  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    EXPECT_EQ(ids(dedup::dedup_cap(pairs, 10, seed)), reference_dedup(pairs, 10, seed));
  }
}

TEST(DedupCap, IdempotentAndCapped) {
  std::vector<SentencePair> pairs;
  for (int i = 0; i < 300; ++i) {
    pairs.push_back(signed_pair("q" + std::to_string(i), Signature({"a", "b", std::to_string(i % 9)})));
  }
  const auto once = dedup::dedup_cap(pairs, 10, 5);
  std::map<std::string, int> counts;
  for (const auto& p : once) ++counts[p.signature->key()];
  for (const auto& [k, c] : counts) EXPECT_LE(c, 10);
  EXPECT_EQ(ids(dedup::dedup_cap(once, 10, 5)), ids(once));
  EXPECT_EQ(ids(dedup::dedup_cap(once, 10, 6)), ids(once));
}

TEST(DedupCap, UniformInclusion) {
  const Signature sig({"a", "b", "c"});
  std::vector<SentencePair> pairs;
  for (int i = 0; i < 25; ++i) pairs.push_back(signed_pair("p" + std::to_string(10 + i), sig));
  std::map<std::string, int> hits;
  const int trials = 4000;
  for (int s = 0; s < trials; ++s) {
    for (const auto& p : dedup::dedup_cap(pairs, 10, static_cast<std::uint64_t>(s))) ++hits[p.pair_id];
  }
  // Inclusion probability 0.4; binomial sd over 4000 trials is about 31.
  for (const auto& [id, h] : hits) EXPECT_NEAR(h, 0.4 * trials, 160) << id;
  EXPECT_EQ(hits.size(), 25u);
}

TEST(SignAndDedup, JobsAndOrderInvariant) {
  std::mt19937 gen(8);
  std::vector<std::string> vocab = {"syria", "troops", "policy", "market", "rally", "vote", "storm"};
  std::vector<SentencePair> pairs;
  for (int i = 0; i < 400; ++i) {
    SentencePair p;
    std::string l, r;
    for (int k = 0; k < 4; ++k) l += vocab[gen() % vocab.size()] + " ";
    for (int k = 0; k < 3; ++k) r += vocab[gen() % vocab.size()] + " ";
    p.left = make_sentence("a" + std::to_string(i), 0, l);
    p.right = make_sentence("b" + std::to_string(i), 0, r);
    p.pair_id = make_pair_id(p.left, p.right);
    pairs.push_back(p);
  }
  const auto idf = dedup::build_idf(vocab);
  const auto base = dedup::sign_and_dedup(pairs, idf, 10, 7, 1);
  EXPECT_EQ(base.stats.input, 400u);
  EXPECT_EQ(base.stats.retained, base.retained.size());
  for (std::size_t jobs : {4u, 16u}) {
    EXPECT_EQ(ids(dedup::sign_and_dedup(pairs, idf, 10, 7, jobs).retained), ids(base.retained));
  }
  std::shuffle(pairs.begin(), pairs.end(), gen);
  EXPECT_EQ(ids(dedup::sign_and_dedup(pairs, idf, 10, 7, 4).retained), ids(base.retained));
  EXPECT_GT(base.stats.too_few_tokens, 0u);
}

}  // namespace
}  // namespace decompkit
