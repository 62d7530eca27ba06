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

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ne_revise/text.hpp"

namespace ne_revise {

namespace detail {

// Lowercased, without the trailing period.
inline constexpr std::array<std::string_view, 36> kAbbreviations = {
    "dr",  "mr",   "mrs",  "ms",   "prof", "st",  "jr",   "sr",    "vs",
    "etc", "e.g",  "i.e",  "fig",  "figs", "no",  "nos",  "inc",   "ltd",
    "co",  "corp", "mt",   "gen",  "col",  "lt",  "sgt",  "capt",  "rev",
    "hon", "u.s",  "u.k",  "al",   "approx", "dept", "univ", "vol", "pp"};

inline bool is_abbreviation(std::string_view word) {
  // Strip leading punctuation such as an opening parenthesis or quote.
  while (!word.empty() && !std::isalnum(static_cast<unsigned char>(word.front()))) {
    word.remove_prefix(1);
  }
  if (word.size() == 1 && std::isupper(static_cast<unsigned char>(word[0]))) return true;  // initial
  std::string lower(word);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

inline bool is_closing(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

}  // namespace detail

/// Rule-based sentence splitter for context documents.
///
/// A boundary is a '.', '!' or '?' (optionally followed by closing quotes or
/// brackets) that is followed by whitespace and an uppercase letter. A period
/// ending a known abbreviation or a single-letter initial is not a boundary.
/// Sentences are returned trimmed.
inline std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t end = i + 1;
    while (end < n && (detail::is_closing(text[end]) || text[end] == '.' || text[end] == '!' ||
                       text[end] == '?')) {
      ++end;
    }
    std::size_t next = end;
    while (next < n && std::isspace(static_cast<unsigned char>(text[next]))) ++next;
    if (next == end || next >= n || !std::isupper(static_cast<unsigned char>(text[next]))) {
      i = end - 1;
      continue;
    }
    if (c == '.') {
      std::size_t word_start = i;
      while (word_start > start && !std::isspace(static_cast<unsigned char>(text[word_start - 1]))) {
        --word_start;
      }
      if (detail::is_abbreviation(text.substr(word_start, i - word_start))) {
        i = end - 1;
        continue;
      }
    }
    std::string sentence = trim(text.substr(start, end - start));
    if (!sentence.empty()) sentences.push_back(std::move(sentence));
    start = next;
    i = next - 1;
  }
  std::string tail = trim(text.substr(std::min(start, n)));
  if (!tail.empty()) sentences.push_back(std::move(tail));
  return sentences;
}

}  // namespace ne_revise
