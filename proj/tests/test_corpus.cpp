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

#include <algorithm>
#include <random>

#include "decompkit/corpus.hpp"
#include "decompkit/date.hpp"
#include "decompkit/text.hpp"

namespace decompkit {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenizer, LowercasesAndStripsPunctuation) {
  EXPECT_EQ(text::tokenize("The US Military has already started withdrawal from Syria."),
            (Tokens{"the", "us", "military", "has", "already", "started", "withdrawal", "from",
                    "syria"}));
  EXPECT_EQ(text::tokenize("It began Friday."), (Tokens{"it", "began", "friday"}));
}

TEST(Tokenizer, JoinersInsideWords) {
  EXPECT_EQ(text::tokenize("U.S. forces"), (Tokens{"us", "forces"}));
  EXPECT_EQ(text::tokenize("around 75,000 people"), (Tokens{"around", "75000", "people"}));
  EXPECT_EQ(text::tokenize("don't"), (Tokens{"dont"}));
  EXPECT_EQ(text::tokenize("it’s"), (Tokens{"its"}));
  EXPECT_EQ(text::tokenize("non-essential"), (Tokens{"non", "essential"}));
  EXPECT_EQ(text::tokenize("end. Next"), (Tokens{"end", "next"}));
}

TEST(Tokenizer, Unicode) {
  EXPECT_EQ(text::tokenize("Éric Zürich “quoted”"), (Tokens{"éric", "zürich", "quoted"}));
  EXPECT_EQ(text::tokenize("ΑΘΗΝΑ Москва"), (Tokens{"αθηνα", "москва"}));
  EXPECT_EQ(text::tokenize("price €5 \U0001F600 ok"), (Tokens{"price", "5", "ok"}));
  EXPECT_EQ(text::tokenize("東京 は"), (Tokens{"東京", "は"}));
  // Malformed UTF-8 separates instead of crashing.
  EXPECT_EQ(text::tokenize(std::string("ab\xff" "cd")), (Tokens{"ab", "cd"}));
  EXPECT_TRUE(text::tokenize("... !!! --").empty());
}

TEST(Dates, IsoAndRfc2822) {
  EXPECT_EQ(parse_date("2019-01-05")->iso(), "2019-01-05");
  EXPECT_EQ(parse_date("2019-01-05T13:45:00Z")->iso(), "2019-01-05");
  EXPECT_EQ(parse_date("2019-01-05 13:45")->iso(), "2019-01-05");
  EXPECT_EQ(parse_date("Sat, 05 Jan 2019 10:00:00 +0000")->iso(), "2019-01-05");
  EXPECT_EQ(parse_date("5 Jan 2019")->iso(), "2019-01-05");
  EXPECT_FALSE(parse_date("Jan 5"));
  EXPECT_FALSE(parse_date("2019-02-30"));
  EXPECT_FALSE(parse_date("05/01/2019"));
  EXPECT_FALSE(parse_date(""));
}

TEST(Dates, DayArithmetic) {
  const auto a = *parse_date("2019-12-31");
  const auto b = *parse_date("2020-01-02");
  EXPECT_EQ(b - a, 2);
  EXPECT_EQ(a.plus_days(2), b);
  EXPECT_LT(a, b);
}

json raw(std::string id, std::string title, std::string text, std::string date) {
  return json{{"id", id}, {"title", title}, {"text", text}, {"date", date}, {"domain", "x"}};
}

TEST(ValidateArticle, MinimalRecord) {
  const auto a = validate_article(raw("1", "A", "B.", "2019-01-05"));
  EXPECT_EQ(a.id, "1");
  EXPECT_EQ(a.title, "A");
  EXPECT_EQ(a.body, "B.");
  EXPECT_EQ(a.published.iso(), "2019-01-05");
  EXPECT_EQ(a.source_domain, "x");
}

TEST(ValidateArticle, Errors) {
  try {
    validate_article(raw("1", "A", "B.", "Jan 5"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnparseableDate);
    EXPECT_EQ(e.field(), "date");
  }
  try {
    validate_article(raw("1", "  ", "B.", "2019-01-05"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyText);
    EXPECT_EQ(e.field(), "title");
  }
  auto missing = raw("1", "A", "B.", "2019-01-05");
  missing.erase("domain");
  try {
    validate_article(missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingField);
    EXPECT_EQ(e.field(), "domain");
  }
}

TEST(ValidateArticle, UnknownFieldsIgnored) {
  auto r = raw("1", "A", "B.", "2019-01-05");
  r["authors"] = json::array({"someone"});
  EXPECT_NO_THROW(validate_article(r));
}

TEST(ValidateArticle, SerializationRoundTripIsByteIdentical) {
  std::mt19937 gen(11);
  const std::vector<std::string> words = {"Syria", "troops", "\"quoted\"", "é", "\\", "line\nbreak", "tab\t"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string title, body;
    for (int k = 0; k < 5; ++k) title += words[gen() % words.size()] + " ";
    for (int k = 0; k < 20; ++k) body += words[gen() % words.size()] + " ";
    const std::string date = (gen() % 2) ? "2019-03-0" + std::to_string(1 + gen() % 9)
                                         : "Mon, 0" + std::to_string(1 + gen() % 9) + " Apr 2019";
    const auto a = validate_article(raw("id" + std::to_string(trial), title, body, date));
    const std::string once = to_json(a).dump();
    const auto b = validate_article(json::parse(once));
    EXPECT_EQ(a, b);
    EXPECT_EQ(to_json(b).dump(), once);
  }
}

TEST(Signature, PermutationsStoreIdentically) {
  std::vector<std::string> toks = {"syria", "troops", "policy"};
  std::sort(toks.begin(), toks.end());
  const Signature reference = Signature::from_tokens(toks);
  do {
    const Signature s = Signature::from_tokens(toks);
    EXPECT_EQ(s, reference);
    EXPECT_TRUE(std::is_sorted(s.tokens().begin(), s.tokens().end()));
  } while (std::next_permutation(toks.begin(), toks.end()));
  EXPECT_THROW(Signature::from_tokens({"a", "b"}), Error);
}

TEST(ArticlePair, CanonicalOrder) {
  const auto p = ArticlePair::make("b", "a", 2, 0.9);
  const auto q = ArticlePair::make("a", "b", -2, 0.9);
  EXPECT_EQ(p, q);
  EXPECT_EQ(p.a_id(), "a");
  EXPECT_EQ(p.b_id(), "b");
  EXPECT_EQ(p.date_gap_days(), 2);
}

TEST(IdfTable, DefaultIsMax) {
  IdfTable t({{"a", 0.0}, {"b", 1.5}, {"c", 0.7}}, 10);
  EXPECT_DOUBLE_EQ(t.default_idf(), 1.5);
  EXPECT_DOUBLE_EQ(t.idf("zzz"), 1.5);
  EXPECT_DOUBLE_EQ(t.idf("c"), 0.7);
  EXPECT_THROW(IdfTable({{"a", -1.0}}, 1), Error);
}

TEST(TrainingInstance, JsonRoundTrip) {
  TrainingInstance t;
  t.input_text = "in";
  t.target_text = "out";
  t.meta.similarity = 0.61;
  t.meta.signature = Signature::from_tokens({"c", "a", "b"});
  t.meta.left_id = "L";
  t.meta.right_id = "R";
  t.meta.forward = false;
  t.meta.seed = 0xffffffffffffffffULL;
  const auto j = to_json(t);
  EXPECT_EQ(j["meta"]["direction"], "rev");
  EXPECT_EQ(j["meta"]["signature"], json::array({"a", "b", "c"}));
  EXPECT_EQ(training_instance_from_json(json::parse(j.dump())), t);
}

}  // namespace
}  // namespace decompkit
