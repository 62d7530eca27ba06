// Copyright 2026 The ne-revise Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ne_revise/error.hpp"
#include "ne_revise/interchange.hpp"
#include "support/fixture.hpp"
#include "support/generators.hpp"

namespace ne_revise {
namespace {

using testing::Rng;

std::vector<Utterance> read(const std::string& jsonl) {
  std::istringstream in(jsonl);
  return read_utterances(in);
}

const char* kTwoRecords =
    R"({"schema_version":1,"id":"u1","hypothesis":"Now this is zaitz!","reference":"now this is seitz","context_doc_id":"d1","entities":[{"text":"Zaitz","type":"PERSON","start_token":3,"end_token":4,"probability":0.41}],"reference_entities":[{"text":"seitz","type":"PERSON","start_token":3,"end_token":4}]})"
    "\n\n"
    R"({"schema_version":1,"id":"u2","hypothesis":"margaret mit","context_doc_id":"d1","entities":[{"text":"margaret mit","type":"PERSON","start_token":0,"end_token":2}]})"
    "\n";

TEST(IngestUtterances, ValidTwoRecordFile) {
  const auto us = read(kTwoRecords);
  ASSERT_EQ(us.size(), 2u);
  EXPECT_EQ(us[0].hypothesis, (Tokens{"now", "this", "is", "zaitz"}));
  ASSERT_TRUE(us[0].reference);
  EXPECT_EQ(us[0].entities[0].surface, "zaitz");
  EXPECT_EQ(us[0].entities[0].span, (TokenSpan{3, 4}));
  EXPECT_DOUBLE_EQ(*us[0].entities[0].probability, 0.41);
  EXPECT_EQ(us[0].reference_ne_mask(), (std::vector<bool>{false, false, false, true}));
  EXPECT_FALSE(us[1].reference);
  EXPECT_FALSE(us[1].entities[0].probability);
}

TEST(IngestUtterances, FromFile) {
  const auto us = ingest_utterances(testing::data_path("synthetic/corpus.jsonl"));
  EXPECT_EQ(us.size(), 100u);
  EXPECT_THROW(ingest_utterances(testing::data_path("nope.jsonl")), ValidationError);
}

template <typename E>
void expect_record_error(const std::string& line, const std::string& id) {
  try {
    read(line);
    FAIL() << "no error for " << line;
  } catch (const E& e) {
    EXPECT_NE(std::string(e.what()).find(id), std::string::npos) << e.what();
  }
}

TEST(IngestUtterances, RejectsUnknownEntityType) {
  expect_record_error<UnknownEntityType>(
      R"({"schema_version":1,"id":"bad-type","hypothesis":"in may","context_doc_id":"d","entities":[{"text":"may","type":"DATE","start_token":1,"end_token":2}]})",
      "bad-type");
}

TEST(IngestUtterances, RejectsSpanPastEnd) {
  expect_record_error<SpanOutOfBounds>(
      R"({"schema_version":1,"id":"oob","hypothesis":"hello seitz","context_doc_id":"d","entities":[{"text":"seitz","type":"PERSON","start_token":1,"end_token":3}]})",
      "oob");
}

TEST(IngestUtterances, SchemaErrorsNameTheRecord) {
  expect_record_error<SchemaError>(R"({"schema_version":1,"id":"x1","context_doc_id":"d","entities":[]})", "x1");
  expect_record_error<SchemaError>(
      R"({"schema_version":1,"id":"x2","hypothesis":7,"context_doc_id":"d","entities":[]})", "x2");
  expect_record_error<SchemaError>(
      R"({"schema_version":2,"id":"x3","hypothesis":"a","context_doc_id":"d","entities":[]})", "x3");
  // entity text must match the covered tokens after normalization
  expect_record_error<SchemaError>(
      R"({"schema_version":1,"id":"x4","hypothesis":"hello seitz","context_doc_id":"d","entities":[{"text":"hello","type":"PERSON","start_token":1,"end_token":2}]})",
      "x4");
  // overlapping spans
  expect_record_error<SchemaError>(
      R"({"schema_version":1,"id":"x5","hypothesis":"konrad lorenz","context_doc_id":"d","entities":[{"text":"konrad lorenz","type":"PERSON","start_token":0,"end_token":2},{"text":"lorenz","type":"PERSON","start_token":1,"end_token":2}]})",
      "x5");
  // probability out of range
  expect_record_error<SchemaError>(
      R"({"schema_version":1,"id":"x6","hypothesis":"seitz","context_doc_id":"d","entities":[{"text":"seitz","type":"PERSON","start_token":0,"end_token":1,"probability":1.5}]})",
      "x6");
  // empty span
  expect_record_error<SchemaError>(
      R"({"schema_version":1,"id":"x7","hypothesis":"seitz","context_doc_id":"d","entities":[{"text":"seitz","type":"PERSON","start_token":1,"end_token":1}]})",
      "x7");
}

TEST(IngestUtterances, RejectsDuplicateIdsAndJunkLines) {
  const std::string line =
      R"({"schema_version":1,"id":"dup","hypothesis":"a","context_doc_id":"d","entities":[]})";
  EXPECT_THROW(read(line + "\n" + line + "\n"), SchemaError);
  EXPECT_THROW(read("{not json\n"), SchemaError);
  EXPECT_THROW(read("[1,2]\n"), SchemaError);
}

TEST(IngestContexts, SentencesOrSegmentedText) {
  std::istringstream in(
      R"({"schema_version":1,"id":"d1","sentences":["Konrad Lorenz studied geese."],"entities":[{"text":"Lorenz","type":"PERSON","sentence_id":0}]})"
      "\n"
      R"({"schema_version":1,"id":"d2","text":"Dr. Lorenz won. He studied geese."})"
      "\n");
  const auto docs = read_contexts(in);
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].entities[0].surface, "lorenz");
  EXPECT_EQ(docs[0].entities[0].sentence_id, 0u);
  EXPECT_EQ(docs[1].sentences, (std::vector<std::string>{"Dr. Lorenz won.", "He studied geese."}));
}

TEST(IngestContexts, RejectsBadRecords) {
  const auto bad = [](const std::string& line) {
    std::istringstream in(line + "\n");
    return read_contexts(in);
  };
  EXPECT_THROW(bad(R"({"schema_version":1,"id":"d","sentences":["ok",""]})"), SchemaError);
  EXPECT_THROW(bad(R"({"schema_version":1,"id":"d","sentences":["ok"],"entities":[{"text":"x","type":"TIME","sentence_id":0}]})"),
               UnknownEntityType);
  EXPECT_THROW(bad(R"({"schema_version":1,"id":"d"})"), SchemaError);
}

Utterance random_utterance(Rng& rng, std::size_t i) {
  Utterance u;
  u.id = "u" + std::to_string(i);
  u.context_doc_id = "doc" + std::to_string(testing::pick(rng, 3));
  const std::size_t n = testing::pick(rng, 12);
  for (std::size_t k = 0; k < n; ++k) u.hypothesis.push_back(testing::syllable_word(rng));
  std::size_t at = 0;
  while (at < n && testing::chance(rng, 0.5)) {
    at += testing::pick(rng, 3);
    if (at >= n) break;
    const std::size_t len = 1 + testing::pick(rng, std::min<std::size_t>(3, n - at));
    Entity e;
    e.tokens.assign(u.hypothesis.begin() + at, u.hypothesis.begin() + at + len);
    e.surface = join_tokens(e.tokens);
    e.type = kAllEntityTypes[testing::pick(rng, 8)];
    e.span = TokenSpan{at, at + len};
    if (testing::chance(rng, 0.7)) e.probability = testing::pick(rng, 1001) / 1000.0;
    u.entities.push_back(e);
    at += len;
  }
  if (testing::chance(rng, 0.7)) {
    u.reference = u.hypothesis;
    for (const Entity& e : u.entities) {
      Entity r = e;
      r.probability.reset();
      u.reference_entities.push_back(r);
    }
  }
  return u;
}

TEST(InterchangeProperty, UtteranceRoundTrip) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Utterance> corpus;
    const std::size_t n = testing::pick(rng, 20);
    for (std::size_t i = 0; i < n; ++i) corpus.push_back(random_utterance(rng, i));
    std::ostringstream out;
    write_utterances(out, corpus);
    const auto once = read(out.str());
    ASSERT_EQ(once, corpus);
    std::ostringstream again;
    write_utterances(again, once);
    ASSERT_EQ(again.str(), out.str());
    for (const Utterance& u : once) {
      for (const Entity& e : u.entities) {
        ASSERT_TRUE(parse_entity_type(to_string(e.type)).has_value());
      }
    }
  }
}

TEST(InterchangeProperty, ContextRoundTrip) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = testing::random_corpus(rng, 30, 8);
    std::ostringstream out;
    write_contexts(out, {c.doc});
    std::istringstream in(out.str());
    const auto docs = read_contexts(in);
    ASSERT_EQ(docs.size(), 1u);
    ASSERT_EQ(docs[0], c.doc);
  }
}

}  // namespace
}  // namespace ne_revise
