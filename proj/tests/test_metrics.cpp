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
#include <numeric>
#include <random>
#include <sstream>

#include "decompkit/metrics.hpp"
#include "decompkit/mock_backend.hpp"
#include "test_support.hpp"

namespace decompkit {
namespace {

using metrics::TextPair;

TEST(Metrics, IdenticalPair) {
  metrics::WordVectors wv;
  wv.add("troops", {1, 0, 2});
  wv.add("left", {0, 1, 1});
  MockBackend mock;
  EmbedClient client(mock, "sentence");
  const std::vector<TextPair> pairs = {{"Troops left the base", "Troops left the base"}};
  const auto r = metrics::compute_metrics(pairs, wv, client);
  EXPECT_EQ(r.sample_size, 1u);
  EXPECT_EQ(r.mean_length, 4.0);
  EXPECT_EQ(r.mean_length_diff, 0.0);
  EXPECT_NEAR(r.embed_sim, 1.0, 1e-12);
  EXPECT_NEAR(r.sem_sim, 1.0, 1e-12);
  EXPECT_EQ(r.oov_fraction, 0.5);
}

TEST(Metrics, EmptyInputAndMissingVectors) {
  metrics::WordVectors wv;
  wv.add("a", {1.0});
  MockBackend mock;
  EmbedClient client(mock, "sentence");
  try {
    metrics::compute_metrics(std::vector<TextPair>{}, wv, client);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
  try {
    metrics::compute_metrics(std::vector<TextPair>{{"a b c", "a d e"}}, wv, client);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingVectors);
  }
}

TEST(WordVectors, LoadsTextFormat) {
  testing::TempDir dir("metrics");
  testing::write_file(dir.file("wv.txt"), "3 2\nsyria 0.5 -1\ntroops 1 1\n\npolicy 2 0\n");
  const auto wv = metrics::WordVectors::load(dir.file("wv.txt"));
  EXPECT_EQ(wv.size(), 3u);
  EXPECT_EQ(wv.dim(), 2u);
  EXPECT_EQ(*wv.find("syria"), (std::vector<double>{0.5, -1}));
  testing::write_file(dir.file("bad.txt"), "a 1 2\nb 1\n");
  EXPECT_THROW(metrics::WordVectors::load(dir.file("bad.txt")), Error);
}

struct Synthetic {
  std::vector<TextPair> pairs;
  std::map<std::string, std::vector<double>> word_vectors;
  std::map<std::string, std::vector<double>> sentence_vectors;
};

Synthetic synthetic(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Synthetic s;
  for (int w = 0; w < 60; ++w) {
    // Words 50..59 have no vectors.
    if (w < 50) {
      std::vector<double> v(6);
      for (auto& x : v) x = normal(gen);
      s.word_vectors["w" + std::to_string(w)] = v;
    }
  }
  const auto sentence = [&] {
    std::string out;
    const int len = 3 + static_cast<int>(gen() % 20);
    for (int k = 0; k < len; ++k) out += (k ? " " : "") + ("w" + std::to_string(gen() % 60));
    std::vector<double> v(8);
    for (auto& x : v) x = normal(gen);
    s.sentence_vectors[out] = v;
    return out;
  };
  for (int i = 0; i < n; ++i) {
    auto a = sentence();
    auto b = sentence();
    s.pairs.push_back({a, b});
  }
  return s;
}

double oracle_cos(const std::vector<double>& u, const std::vector<double>& v) {
  double dot = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  return dot / std::sqrt(uu * vv);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

TEST(Metrics, MatchesBruteForceOracle) {
  const auto s = synthetic(100, 23);
  metrics::WordVectors wv;
  for (const auto& [w, v] : s.word_vectors) wv.add(w, v);
  testing::TableEmbed table(s.sentence_vectors);
  EmbedClient client(table, "sentence");
  const auto r = metrics::compute_metrics(s.pairs, wv, client);

  double len = 0, diff = 0, esim = 0, ssim = 0;
  for (const auto& p : s.pairs) {
    const auto a = words(p.first), b = words(p.second);
    len += (static_cast<double>(a.size()) + static_cast<double>(b.size())) / 2;
    diff += std::abs(static_cast<double>(a.size()) - static_cast<double>(b.size()));
    const auto avg = [&](const std::vector<std::string>& ws) {
      std::vector<double> sum(6, 0.0);
      int known = 0;
      for (const auto& w : ws) {
        const auto it = s.word_vectors.find(w);
        if (it == s.word_vectors.end()) continue;
        for (int i = 0; i < 6; ++i) sum[i] += it->second[i];
        ++known;
      }
      for (auto& x : sum) x /= known;
      return sum;
    };
    esim += oracle_cos(avg(a), avg(b));
    ssim += oracle_cos(s.sentence_vectors.at(p.first), s.sentence_vectors.at(p.second));
  }
  EXPECT_NEAR(r.mean_length, len / 100, 1e-9);
  EXPECT_NEAR(r.mean_length_diff, diff / 100, 1e-9);
  EXPECT_NEAR(r.embed_sim, esim / 100, 1e-6);
  EXPECT_NEAR(r.sem_sim, ssim / 100, 1e-6);
  EXPECT_EQ(r.pairs_without_word_vectors, 0u);
}

TEST(Metrics, PermutationAndSwapInvariant) {
  auto s = synthetic(60, 31);
  metrics::WordVectors wv;
  for (const auto& [w, v] : s.word_vectors) wv.add(w, v);
  testing::TableEmbed table(s.sentence_vectors);
  EmbedClient client(table, "sentence");
  const auto base = metrics::compute_metrics(s.pairs, wv, client);
  auto shuffled = s.pairs;
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937(4));
  auto swapped = s.pairs;
  for (auto& p : swapped) std::swap(p.first, p.second);
  for (const auto& variant : {shuffled, swapped}) {
    const auto r = metrics::compute_metrics(variant, wv, client);
    EXPECT_NEAR(r.mean_length, base.mean_length, 1e-12);
    EXPECT_NEAR(r.mean_length_diff, base.mean_length_diff, 1e-12);
    EXPECT_NEAR(r.embed_sim, base.embed_sim, 1e-12);
    EXPECT_NEAR(r.sem_sim, base.sem_sim, 1e-12);
  }
}

TEST(SamplePairs, SmallPopulationAndDeterminism) {
  std::vector<int> pop(20);
  std::iota(pop.begin(), pop.end(), 0);
  EXPECT_EQ(metrics::sample_pairs(pop, 100, 1).size(), 20u);
  EXPECT_EQ(metrics::sample_pairs(pop, 5, 1), metrics::sample_pairs(pop, 5, 1));
  EXPECT_THROW(metrics::sample_pairs(pop, 0, 1), Error);
}

TEST(SamplePairs, UniformByChiSquare) {
  const int n = 10000, k = 1000, rounds = 200;
  std::vector<int> pop(n);
  std::iota(pop.begin(), pop.end(), 0);
  std::vector<int> hits(n, 0);
  for (int s = 0; s < rounds; ++s) {
    const auto sample = metrics::sample_pairs(pop, k, static_cast<std::uint64_t>(s));
    ASSERT_EQ(sample.size(), static_cast<std::size_t>(k));
    for (int x : sample) ++hits[x];
  }
  const double p = static_cast<double>(k) / n;
  const double expected = rounds * p;
  double chi = 0;
  for (int h : hits) chi += (h - expected) * (h - expected) / (expected * (1 - p));
  // Approximately chi-square with n - 1 degrees of freedom.
  EXPECT_NEAR(chi, n - 1, 6 * std::sqrt(2.0 * (n - 1)));
}

}  // namespace
}  // namespace decompkit
