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

#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ne_revise/context_index.hpp"
#include "ne_revise/error.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace ne_revise {
namespace {

using testing::Rng;

Entity ctx_entity(const std::string& text, EntityType type, std::size_t sentence) {
  Entity e = make_entity(text, type);
  e.sentence_id = sentence;
  return e;
}

ContextDocument lorenz_doc() {
  ContextDocument doc;
  doc.id = "ethology";
  doc.sentences = {"Konrad Lorenz studied geese.", "The lab was near MIT.", "Lorenz won a Nobel prize."};
  doc.entities = {ctx_entity("Lorenz", EntityType::kPerson, 0), ctx_entity("MIT", EntityType::kOrg, 1),
                  ctx_entity("Lorenz", EntityType::kPerson, 2)};
  return doc;
}

TEST(BuildIndex, SingleEntityHasItsCodes) {
  ContextDocument doc;
  doc.id = "d";
  doc.sentences = {"Konrad Lorenz studied geese."};
  doc.entities = {ctx_entity("Lorenz", EntityType::kPerson, 0)};
  const ContextIndex index = build_index(doc);
  ASSERT_EQ(index.size(), 1u);
  EXPECT_EQ(index.entries_with_code("LRNS"), (std::vector<std::size_t>{0}));
  EXPECT_EQ(index.entries_of_type(EntityType::kPerson), (std::vector<std::size_t>{0}));
  EXPECT_EQ(index.entries()[0].sentences, (std::vector<std::string>{"Konrad Lorenz studied geese."}));
}

TEST(BuildIndex, EmptyEntityListGivesEmptyIndex) {
  ContextDocument doc;
  doc.id = "d";
  doc.sentences = {"Nothing here."};
  EXPECT_TRUE(build_index(doc).empty());
}

TEST(BuildIndex, DanglingSentenceRef) {
  ContextDocument doc;
  doc.id = "d";
  doc.sentences = {"Only one."};
  doc.entities = {ctx_entity("Lorenz", EntityType::kPerson, 3)};
  EXPECT_THROW(build_index(doc), DanglingSentenceRef);
  doc.entities[0].sentence_id.reset();
  EXPECT_THROW(build_index(doc), DanglingSentenceRef);
}

TEST(BuildIndex, RepeatedMentionsMerge) {
  const ContextIndex index = build_index(lorenz_doc());
  ASSERT_EQ(index.size(), 2u);
  EXPECT_EQ(index.entries()[0].entity.surface, "lorenz");
  EXPECT_EQ(index.entries()[0].sentences,
            (std::vector<std::string>{"Konrad Lorenz studied geese.", "Lorenz won a Nobel prize."}));
}

TEST(FilterContext, MatchesTypeAndSound) {
  const ContextIndex index = build_index(lorenz_doc());
  const auto f = filter_context(index, {make_entity("lawrence", EntityType::kPerson)});
  ASSERT_EQ(f.matches.size(), 1u);
  EXPECT_EQ(f.matches[0].context_entity.surface, "lorenz");
  EXPECT_EQ(f.matches[0].predicted.surface, "lawrence");
  EXPECT_EQ(f.matches[0].sentences.size(), 2u);
}

TEST(FilterContext, EmptyPredictionsGiveEmptyResult) {
  EXPECT_TRUE(filter_context(build_index(lorenz_doc()), {}).empty());
}

TEST(FilterContext, TypeMismatchIsNotAMatch) {
  ContextDocument doc;
  doc.id = "d";
  doc.sentences = {"She lectured at MIT."};
  doc.entities = {ctx_entity("MIT", EntityType::kOrg, 0)};
  ASSERT_TRUE(sounds_similar("mead", "mit"));
  EXPECT_TRUE(filter_context(build_index(doc), {make_entity("mead", EntityType::kPerson)}).empty());
}

TEST(FilterContext, AnyTokenPairMatchesInsideMultiWordEntities) {
  ContextDocument doc;
  doc.id = "d";
  doc.sentences = {"Margaret Mead studied Samoa."};
  doc.entities = {ctx_entity("Margaret Mead", EntityType::kPerson, 0)};
  const ContextIndex index = build_index(doc);
  const auto any = filter_context(index, {make_entity("margaret mit", EntityType::kPerson)});
  EXPECT_EQ(any.matches.size(), 1u);
  const auto single = filter_context(index, {make_entity("mit", EntityType::kPerson)});
  EXPECT_EQ(single.matches.size(), 1u);

  FilterOptions whole;
  whole.match_mode = MatchMode::kConcatenated;
  EXPECT_TRUE(filter_context(index, {make_entity("mit", EntityType::kPerson)}, whole).empty());
}

TEST(FilterContext, UnencodableTokensAreSkipped) {
  ContextDocument doc;
  doc.id = "d";
  doc.sentences = {"Apollo 11 landed."};
  doc.entities = {ctx_entity("Apollo 11", EntityType::kEvent, 0)};
  const ContextIndex index = build_index(doc);
  EXPECT_TRUE(filter_context(index, {make_entity("11", EntityType::kEvent)}).empty());
  EXPECT_EQ(filter_context(index, {make_entity("apolo 12", EntityType::kEvent)}).matches.size(), 1u);
}

TEST(FilterContext, CapKeepsEarliestMatches) {
  ContextDocument doc;
  doc.id = "d";
  for (int i = 0; i < 8; ++i) {
    doc.sentences.push_back("Sentence " + std::to_string(i) + ".");
  }
  const std::vector<std::string> names = {"smith", "smyth", "smithe", "smit", "smitt", "smid", "smyt", "smeth"};
  for (std::size_t i = 0; i < names.size(); ++i) doc.entities.push_back(ctx_entity(names[i], EntityType::kPerson, i));
  const ContextIndex index = build_index(doc);
  const std::vector<Entity> predicted = {make_entity("smith", EntityType::kPerson)};
  const auto all = testing::filter_oracle(index, predicted, 0);
  ASSERT_GT(all.size(), 5u);
  const auto capped = filter_context(index, predicted);
  ASSERT_EQ(capped.matches.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(capped.matches[i].entry_index, all[i].first);
  FilterOptions unlimited;
  unlimited.max_matches_per_entity = 0;
  EXPECT_EQ(filter_context(index, predicted, unlimited).matches.size(), all.size());
}

void check_index_invariants(const ContextIndex& index, const ContextDocument& doc) {
  std::multiset<std::size_t> reached;
  for (const auto& [type, ids] : index.by_type()) {
    for (std::size_t id : ids) {
      ASSERT_EQ(index.entries()[id].entity.type, type);
      reached.insert(id);
    }
  }
  for (std::size_t i = 0; i < index.size(); ++i) ASSERT_EQ(reached.count(i), 1u);

  for (std::size_t i = 0; i < index.size(); ++i) {
    const IndexEntry& e = index.entries()[i];
    for (const std::string& s : e.sentences) {
      ASSERT_NE(std::find(doc.sentences.begin(), doc.sentences.end(), s), doc.sentences.end());
    }
    for (const std::string& token : e.entity.tokens) {
      const auto code = try_encode(token, index.phonetic_options());
      if (!code || code->empty()) continue;  // nothing to key on
      for (const std::string* key : {&code->primary, &code->alternate}) {
        const auto& ids = index.entries_with_code(*key);
        ASSERT_NE(std::find(ids.begin(), ids.end(), i), ids.end()) << token << " " << *key;
      }
    }
  }
}

TEST(FilterContextProperty, EqualsBruteForceOnRandomCorpora) {
  Rng rng(99);
  for (int trial = 0; trial < 150; ++trial) {
    const auto corpus = testing::random_corpus(rng, trial < 20 ? 200 : 40);
    const ContextIndex index = build_index(corpus.doc);
    check_index_invariants(index, corpus.doc);
    for (std::size_t cap : {std::size_t{0}, std::size_t{5}, std::size_t{1}}) {
      FilterOptions options;
      options.max_matches_per_entity = cap;
      const auto got = filter_context(index, corpus.predicted, options);
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (const auto& m : got.matches) {
        ASSERT_EQ(m.context_entity, index.entries()[m.entry_index].entity);
        ASSERT_EQ(m.predicted, corpus.predicted[m.predicted_index]);
        pairs.emplace_back(m.entry_index, m.predicted_index);
      }
      ASSERT_EQ(pairs, testing::filter_oracle(index, corpus.predicted, cap)) << "trial " << trial;
      ASSERT_LE(pairs.size(), index.size() * corpus.predicted.size());
      ASSERT_EQ(std::set(pairs.begin(), pairs.end()).size(), pairs.size());
    }
  }
}

TEST(FilterContextProperty, Deterministic) {
  Rng rng(5);
  const auto corpus = testing::random_corpus(rng, 100);
  const auto a = filter_context(build_index(corpus.doc), corpus.predicted);
  const auto b = filter_context(build_index(corpus.doc), corpus.predicted);
  ASSERT_EQ(a.matches.size(), b.matches.size());
  for (std::size_t i = 0; i < a.matches.size(); ++i) {
    EXPECT_EQ(a.matches[i].entry_index, b.matches[i].entry_index);
    EXPECT_EQ(a.matches[i].predicted_index, b.matches[i].predicted_index);
  }
}

}  // namespace
}  // namespace ne_revise
