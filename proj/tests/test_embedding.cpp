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

#include <atomic>
#include <chrono>
#include <thread>

#include "decompkit/embedding.hpp"
#include "decompkit/mock_backend.hpp"
#include "test_support.hpp"

namespace decompkit {
namespace {

TEST(Cosine, IdentityAntipodalOrthogonal) {
  const EmbeddingVector v({0.3, -1.2, 2.5});
  EXPECT_DOUBLE_EQ(cosine(v, v), 1.0);
  EXPECT_DOUBLE_EQ(cosine(v, -v), -1.0);
  EXPECT_DOUBLE_EQ(cosine(EmbeddingVector({1, 0}), EmbeddingVector({0, 1})), 0.0);
}

TEST(Cosine, SymmetricAndExactOnPythagoreanVectors) {
  const EmbeddingVector a({1, 0}), b({4, 3}), c({3, 4});
  EXPECT_EQ(cosine(a, b), 0.8);
  EXPECT_EQ(cosine(b, a), 0.8);
  EXPECT_EQ(cosine(a, c), 0.6);
  EXPECT_EQ(cosine(EmbeddingVector({1, 0, 0, 0, 0}), EmbeddingVector({19, 6, 1, 1, 1})), 0.95);
}

TEST(Cosine, Errors) {
  try {
    cosine(EmbeddingVector({1, 0}), EmbeddingVector({1, 0, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  try {
    cosine(EmbeddingVector({0, 0}), EmbeddingVector({1, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVector);
  }
}

// Counts calls and the peak number of concurrent calls.
class SlowCountingBackend : public EmbedBackend {
 public:
  EmbedResponse embed(const std::string&, const std::vector<std::string>& texts) override {
    const int now = ++active_;
    int seen = peak_.load();
    while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    ++calls_;
    batch_sizes_.push_back(texts.size());
    EmbedResponse r;
    r.dim = 2;
    for (const auto& t : texts) r.vectors.push_back({1.0, static_cast<double>(t.size())});
    --active_;
    return r;
  }
  std::atomic<int> active_{0};
  std::atomic<int> peak_{0};
  std::atomic<int> calls_{0};
  std::vector<std::size_t> batch_sizes_;  // only read after single-threaded use
};

std::vector<std::string> numbered(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("text " + std::to_string(i));
  return out;
}

TEST(EmbedClient, BatchesAndCaches) {
  SlowCountingBackend backend;
  EmbedClientOptions opts;
  opts.max_in_flight = 1;
  EmbedClient client(backend, "m", opts);
  const auto texts = numbered(150);
  const auto first = client.embed(texts);
  EXPECT_EQ(first.size(), 150u);
  EXPECT_EQ(backend.calls_, 3);
  EXPECT_EQ(backend.batch_sizes_, (std::vector<std::size_t>{64, 64, 22}));
  const auto second = client.embed(texts);
  EXPECT_EQ(backend.calls_, 3);
  EXPECT_EQ(client.stats().cache_hits, 150u);
  EXPECT_EQ(first, second);
  EXPECT_EQ(client.dim(), 2u);
}

TEST(EmbedClient, DuplicateTextsSentOnce) {
  SlowCountingBackend backend;
  EmbedClient client(backend, "m");
  const auto out = client.embed({"a", "b", "a", "a"});
  EXPECT_EQ(out.size(), 4u);
  EXPECT_EQ(out[0], out[2]);
  EXPECT_EQ(client.stats().texts_sent, 2u);
}

TEST(EmbedClient, CacheDisabledResends) {
  SlowCountingBackend backend;
  EmbedClientOptions opts;
  opts.cache = false;
  EmbedClient client(backend, "m", opts);
  client.embed({"a"});
  client.embed({"a"});
  EXPECT_EQ(backend.calls_, 2);
  EXPECT_EQ(client.stats().cache_hits, 0u);
}

TEST(EmbedClient, CacheCapacityClearsWholesale) {
  SlowCountingBackend backend;
  EmbedClientOptions opts;
  opts.cache_capacity = 2;
  EmbedClient client(backend, "m", opts);
  client.embed({"a", "b"});
  client.embed({"c"});  // cache full, dropped, then holds "c"
  client.embed({"a"});
  EXPECT_EQ(backend.calls_, 3);
  client.embed({"c"});
  EXPECT_EQ(client.stats().cache_hits, 1u);
}

TEST(EmbedClient, BoundedInFlight) {
  SlowCountingBackend backend;
  EmbedClientOptions opts;
  opts.batch_size = 2;
  opts.max_in_flight = 4;
  EmbedClient client(backend, "m", opts);
  client.embed(numbered(40));
  EXPECT_EQ(backend.calls_, 20);
  EXPECT_LE(backend.peak_, 4);
  EXPECT_GE(backend.peak_, 2);
}

class ShiftingDimBackend : public EmbedBackend {
 public:
  EmbedResponse embed(const std::string&, const std::vector<std::string>& texts) override {
    EmbedResponse r;
    r.dim = 2 + calls_++;
    for (std::size_t i = 0; i < texts.size(); ++i) r.vectors.emplace_back(r.dim, 1.0);
    return r;
  }
  int calls_ = 0;
};

TEST(EmbedClient, DimensionChangeIsAnError) {
  ShiftingDimBackend backend;
  EmbedClient client(backend, "m");
  client.embed({"a"});
  try {
    client.embed({"b"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

class ShortBackend : public EmbedBackend {
 public:
  EmbedResponse embed(const std::string&, const std::vector<std::string>&) override {
    return EmbedResponse{2, {{1.0, 0.0}}};
  }
};

TEST(EmbedClient, WrongVectorCountIsProtocolError) {
  ShortBackend backend;
  EmbedClient client(backend, "m");
  try {
    client.embed({"a", "b"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocolError);
  }
}

TEST(MockBackend, BowIsDeterministicAndUnitNorm) {
  MockBackend mock;
  const auto r = mock.embed("m", {"Troops leave Syria", "troops LEAVE syria!", "Markets rally"});
  EXPECT_EQ(r.dim, 256u);
  EXPECT_EQ(r.vectors[0], r.vectors[1]);
  double norm = 0;
  for (double x : r.vectors[2]) norm += x * x;
  EXPECT_NEAR(norm, 1.0, 1e-12);
  EXPECT_EQ(mock.embed("m", {"Markets rally"}).vectors[0], r.vectors[2]);
}

TEST(MockBackend, ScriptedVectorsPerModel) {
  MockBackend mock(json::parse(R"({"embed":{"dim":2,"vectors":{"x":[3,4]},
      "models":{"other":{"vectors":{"x":[0,2]}}}}})"));
  EXPECT_EQ(mock.embed("m", {"x"}).vectors[0], (std::vector<double>{0.6, 0.8}));
  EXPECT_EQ(mock.embed("other", {"x"}).vectors[0], (std::vector<double>{0.0, 1.0}));
}

TEST(MockBackend, BadScripts) {
  for (const char* script : {R"({"embed":{"dim":2,"vectors":{"x":[1,2,3]}}})",
                             R"({"embed":{"mode":"magic"}})", R"([1,2])",
                             R"({"entail":{"fixtures":[{"input":"q"}]}})"}) {
    try {
      MockBackend mock(json::parse(script));
      FAIL() << script;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadScript) << script;
    }
  }
}

}  // namespace
}  // namespace decompkit
