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

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ne_revise/error.hpp"
#include "ne_revise/phonetic.hpp"
#include "support/fixture.hpp"
#include "support/generators.hpp"

namespace ne_revise {
namespace {

using testing::Rng;

bool in_alphabet(const std::string& code) {
  return code.find_first_not_of("AFHJKLMNPRSTX0") == std::string::npos;
}

TEST(Encode, KnownCodes) {
  EXPECT_EQ(encode("SMITH"), (PhoneticCode{"SM0", "XMT"}));
  EXPECT_EQ(encode("smith"), encode("SMITH"));
  EXPECT_EQ(encode("mead").primary, "MT");
  EXPECT_EQ(encode("mit").primary, "MT");
  EXPECT_EQ(encode("banana").primary, "PNN");
  EXPECT_EQ(encode("lorenz").primary, "LRNS");
  EXPECT_EQ(encode("lawrence").primary, "LRNS");
}

TEST(Encode, AlternateDefaultsToPrimary) {
  const PhoneticCode c = encode("banana");
  EXPECT_EQ(c.alternate, c.primary);
}

TEST(Encode, FoldsDiacriticsAndDropsNonLetters) {
  EXPECT_EQ(encode("Müller"), encode("Muller"));
  EXPECT_EQ(encode("O'Brien"), encode("obrien"));
  EXPECT_EQ(encode("François").primary, encode("Fransois").primary);
}

TEST(Encode, RejectsEmptyAndMultiWordInput) {
  EXPECT_THROW(encode(""), EmptyInput);
  EXPECT_THROW(encode("1984"), EmptyInput);
  EXPECT_THROW(encode("  --  "), EmptyInput);
  EXPECT_THROW(encode("margaret mead"), MultiWordInput);
  EXPECT_NO_THROW(encode("  mead  "));
}

TEST(Encode, MaxCodeLengthIsConfigurable) {
  EXPECT_EQ(encode("Schwarzenegger").primary.size(), 4u);
  const PhoneticCode longer = encode("Schwarzenegger", {8});
  EXPECT_GT(longer.primary.size(), 4u);
  EXPECT_LE(longer.primary.size(), 8u);
  EXPECT_EQ(longer.primary.substr(0, 4), encode("Schwarzenegger").primary);
}

TEST(SoundsSimilar, KnownConfusionPairs) {
  EXPECT_TRUE(sounds_similar("lorenz", "lawrence"));
  EXPECT_TRUE(sounds_similar("seitz", "zaitz"));
  EXPECT_TRUE(sounds_similar("seitz", "zeitz"));
  EXPECT_TRUE(sounds_similar("mead", "mit"));
  EXPECT_TRUE(sounds_similar("smith", "smith"));
  EXPECT_FALSE(sounds_similar("mead", "banana"));
}

TEST(SoundsSimilar, CrossMatchingIsNotAMatch) {
  // smith = (SM0, XMT), schmidt = (XMT, SMT): they share XMT only across
  // primary and alternate.
  const PhoneticCode a = encode("smith");
  const PhoneticCode b = encode("schmidt");
  ASSERT_EQ(a.alternate, b.primary);
  ASSERT_NE(a.primary, b.primary);
  ASSERT_NE(a.alternate, b.alternate);
  EXPECT_FALSE(sounds_similar("smith", "schmidt"));
}

TEST(SoundsSimilar, PropagatesEmptyInput) {
  EXPECT_THROW(sounds_similar("", "mead"), EmptyInput);
  EXPECT_THROW(sounds_similar("mead", "42"), EmptyInput);
}

TEST(EncodeOracle, MatchesReferenceFixture) {
  const auto fixture = testing::load_dm_fixture();
  ASSERT_GE(fixture.size(), 5000u);
  std::size_t mismatches = 0;
  for (const auto& row : fixture) {
    const PhoneticCode c = encode(row.word);
    if (c.primary != row.primary || c.alternate != row.alternate) {
      if (++mismatches <= 10) {
        ADD_FAILURE() << row.word << ": got " << c.primary << "/" << c.alternate << ", want "
                      << row.primary << "/" << row.alternate;
      }
    }
  }
  EXPECT_EQ(mismatches, 0u);
}

TEST(EncodeProperty, AlphabetAndLengthBounds) {
  std::vector<std::string> words;
  for (const auto& row : testing::load_dm_fixture()) words.push_back(row.word);
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) words.push_back(testing::random_letters(rng, 1, 14));
  for (const std::string& w : words) {
    const PhoneticCode c = encode(w);
    ASSERT_TRUE(in_alphabet(c.primary)) << w << " -> " << c.primary;
    ASSERT_TRUE(in_alphabet(c.alternate)) << w << " -> " << c.alternate;
    ASSERT_LE(c.primary.size(), 4u) << w;
    ASSERT_LE(c.alternate.size(), 4u) << w;
  }
}

TEST(EncodeProperty, CaseInsensitiveAndPure) {
  Rng rng(2);
  for (int i = 0; i < 5000; ++i) {
    const std::string w = testing::random_letters(rng, 1, 12);
    std::string upper = w;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const PhoneticCode first = encode(w);
    ASSERT_EQ(first, encode(w));
    ASSERT_EQ(first, encode(upper));
  }
}

TEST(SoundsSimilarProperty, ReflexiveForEncodableWords) {
  Rng rng(3);
  for (int i = 0; i < 5000; ++i) {
    const std::string w = testing::random_letters(rng, 1, 12);
    if (encode(w).empty()) continue;  // silent-letter words have no code
    ASSERT_TRUE(sounds_similar(w, w)) << w;
  }
}

TEST(SoundsSimilarProperty, Symmetric) {
  Rng rng(4);
  for (int i = 0; i < 20000; ++i) {
    const std::string a = testing::syllable_word(rng);
    const std::string b = testing::syllable_word(rng);
    ASSERT_EQ(sounds_similar(a, b), sounds_similar(b, a)) << a << " " << b;
  }
}

}  // namespace
}  // namespace ne_revise
