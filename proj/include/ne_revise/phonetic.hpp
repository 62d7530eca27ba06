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

// Double Metaphone phonetic encoding (Lawrence Philips, 2000) and the
// word-level "sounds similar" predicate built on it.

#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <string_view>

#include "ne_revise/error.hpp"
#include "ne_revise/text.hpp"

namespace ne_revise {

/// Primary and alternate Double Metaphone codes of one word.
///
/// Codes use the alphabet {A F H J K L M N P R S T X 0}, where 0 stands for
/// the "th" sound. `alternate` equals `primary` when no alternate rule fired.
struct PhoneticCode {
  std::string primary;
  std::string alternate;

  bool empty() const { return primary.empty() && alternate.empty(); }
  friend bool operator==(const PhoneticCode&, const PhoneticCode&) = default;
};

struct PhoneticOptions {
  std::size_t max_code_length = 4;
};

namespace detail {

class DoubleMetaphone {
 public:
  // `word` must be uppercase ASCII letters.
  DoubleMetaphone(std::string_view word, std::size_t max_length)
      : length_(static_cast<int>(word.size())),
        last_(length_ - 1),
        max_length_(max_length),
        text_(std::string(word) + "     ") {}

  PhoneticCode encode() {
    int current = 0;
    if (at(0, {"GN", "KN", "PN", "WR", "PS"})) current += 1;
    // Initial 'X' is pronounced 'Z', e.g. "Xavier".
    if (char_at(0) == 'X') {
      add("S");
      current += 1;
    }
    while ((primary_.size() < max_length_ || alternate_.size() < max_length_) &&
           current < length_) {
      current = step(current);
    }
    if (primary_.size() > max_length_) primary_.resize(max_length_);
    if (alternate_.size() > max_length_) alternate_.resize(max_length_);
    return {primary_, alternate_};
  }

 private:
  char char_at(int pos) const {
    if (pos < 0 || pos >= static_cast<int>(text_.size())) return '\0';
    return text_[pos];
  }

  bool at(int pos, std::initializer_list<std::string_view> options) const {
    if (pos < 0 || pos >= static_cast<int>(text_.size())) return false;
    const std::string_view rest = std::string_view(text_).substr(pos);
    return std::any_of(options.begin(), options.end(),
                       [&](std::string_view o) { return rest.starts_with(o); });
  }

  bool is_vowel(int pos) const {
    if (pos < 0 || pos >= length_) return false;
    return std::string_view("AEIOUY").find(text_[pos]) != std::string_view::npos;
  }

  bool slavo_germanic() const {
    const std::string_view w(text_.data(), length_);
    return w.find('W') != w.npos || w.find('K') != w.npos || w.find("CZ") != w.npos;
  }

  bool germanic_prefix() const { return at(0, {"VAN ", "VON "}) || at(0, {"SCH"}); }

  void add(std::string_view both) { add(both, both); }
  void add(std::string_view primary, std::string_view alternate) {
    primary_ += primary;
    alternate_ += alternate;
  }

  // Consumes the letter at `current`; returns the next position.
  int step(int current) {
    switch (char_at(current)) {
      case 'A': case 'E': case 'I': case 'O': case 'U': case 'Y':
        if (current == 0) add("A");
        return current + 1;
      case 'B':
        add("P");
        return current + (char_at(current + 1) == 'B' ? 2 : 1);
      case 'C': return letter_c(current);
      case 'D':
        if (at(current, {"DG"})) {
          if (at(current + 2, {"I", "E", "Y"})) {
            add("J");  // "edge"
            return current + 3;
          }
          add("TK");  // "edgar"
          return current + 2;
        }
        add("T");
        return current + (at(current, {"DT", "DD"}) ? 2 : 1);
      case 'F':
        add("F");
        return current + (char_at(current + 1) == 'F' ? 2 : 1);
      case 'G': return letter_g(current);
      case 'H':
        // Kept only when initial or between vowels and followed by a vowel.
        if ((current == 0 || is_vowel(current - 1)) && is_vowel(current + 1)) {
          add("H");
          return current + 2;
        }
        return current + 1;
      case 'J': return letter_j(current);
      case 'K':
        add("K");
        return current + (char_at(current + 1) == 'K' ? 2 : 1);
      case 'L':
        if (char_at(current + 1) == 'L') {
          // Spanish, e.g. "cabrillo", "gallegos".
          if ((current == length_ - 3 && at(current - 1, {"ILLO", "ILLA", "ALLE"})) ||
              ((at(last_ - 1, {"AS", "OS"}) || at(last_, {"A", "O"})) &&
               at(current - 1, {"ALLE"}))) {
            add("L", "");
            return current + 2;
          }
          add("L");
          return current + 2;
        }
        add("L");
        return current + 1;
      case 'M':
        add("M");
        // "dumb", "thumb"
        if ((at(current - 1, {"UMB"}) && (current + 1 == last_ || at(current + 2, {"ER"}))) ||
            char_at(current + 1) == 'M') {
          return current + 2;
        }
        return current + 1;
      case 'N':
        add("N");
        return current + (char_at(current + 1) == 'N' ? 2 : 1);
      case 'P':
        if (char_at(current + 1) == 'H') {
          add("F");
          return current + 2;
        }
        add("P");
        // "campbell", "raspberry"
        return current + (at(current + 1, {"P", "B"}) ? 2 : 1);
      case 'Q':
        add("K");
        return current + (char_at(current + 1) == 'Q' ? 2 : 1);
      case 'R':
        // French, e.g. "rogier", but not "hochmeier".
        if (current == last_ && !slavo_germanic() && at(current - 2, {"IE"}) &&
            !at(current - 4, {"ME", "MA"})) {
          add("", "R");
        } else {
          add("R");
        }
        return current + (char_at(current + 1) == 'R' ? 2 : 1);
      case 'S': return letter_s(current);
      case 'T': return letter_t(current);
      case 'V':
        add("F");
        return current + (char_at(current + 1) == 'V' ? 2 : 1);
      case 'W': return letter_w(current);
      case 'X':
        // French, e.g. "breaux".
        if (!(current == last_ &&
              (at(current - 3, {"IAU", "EAU"}) || at(current - 2, {"AU", "OU"})))) {
          add("KS");
        }
        return current + (at(current + 1, {"C", "X"}) ? 2 : 1);
      case 'Z':
        // Chinese pinyin, e.g. "zhao".
        if (char_at(current + 1) == 'H') {
          add("J");
          return current + 2;
        }
        if (at(current + 1, {"ZO", "ZI", "ZA"}) ||
            (slavo_germanic() && current > 0 && char_at(current - 1) != 'T')) {
          add("S", "TS");
        } else {
          add("S");
        }
        return current + (char_at(current + 1) == 'Z' ? 2 : 1);
      default:
        return current + 1;
    }
  }

  int letter_c(int current) {
    // Various Germanic.
    if (current > 1 && !is_vowel(current - 2) && at(current - 1, {"ACH"}) &&
        char_at(current + 2) != 'I' &&
        (char_at(current + 2) != 'E' || at(current - 2, {"BACHER", "MACHER"}))) {
      add("K");
      return current + 2;
    }
    if (current == 0 && at(current, {"CAESAR"})) {
      add("S");
      return current + 2;
    }
    // Italian "chianti".
    if (at(current, {"CHIA"})) {
      add("K");
      return current + 2;
    }
    if (at(current, {"CH"})) {
      // "michael"
      if (current > 0 && at(current, {"CHAE"})) {
        add("K", "X");
        return current + 2;
      }
      // Greek roots, e.g. "chemistry", "chorus".
      if (current == 0 &&
          (at(current + 1, {"HARAC", "HARIS"}) || at(current + 1, {"HOR", "HYM", "HIA", "HEM"})) &&
          !at(0, {"CHORE"})) {
        add("K");
        return current + 2;
      }
      if (germanic_prefix() || at(current - 2, {"ORCHES", "ARCHIT", "ORCHID"}) ||
          at(current + 2, {"T", "S"}) ||
          ((at(current - 1, {"A", "O", "U", "E"}) || current == 0) &&
           at(current + 2, {"L", "R", "N", "M", "B", "H", "F", "V", "W", " "}))) {
        add("K");
      } else if (current > 0) {
        if (at(0, {"MC"})) {
          add("K");  // "McHugh"
        } else {
          add("X", "K");
        }
      } else {
        add("X");
      }
      return current + 2;
    }
    // "czerny"
    if (at(current, {"CZ"}) && !at(current - 2, {"WICZ"})) {
      add("S", "X");
      return current + 2;
    }
    // "focaccia"
    if (at(current + 1, {"CIA"})) {
      add("X");
      return current + 3;
    }
    // Double 'C', but not "McClellan".
    if (at(current, {"CC"}) && !(current == 1 && char_at(0) == 'M')) {
      // "bellocchio" but not "bacchus"
      if (at(current + 2, {"I", "E", "H"}) && !at(current + 2, {"HU"})) {
        // "accident", "accede", "succeed"
        if ((current == 1 && char_at(current - 1) == 'A') ||
            at(current - 1, {"UCCEE", "UCCES"})) {
          add("KS");
        } else {
          add("X");  // "bacci", "bertucci"
        }
        return current + 3;
      }
      add("K");
      return current + 2;
    }
    if (at(current, {"CK", "CG", "CQ"})) {
      add("K");
      return current + 2;
    }
    if (at(current, {"CI", "CE", "CY"})) {
      if (at(current, {"CIO", "CIE", "CIA"})) {
        add("S", "X");
      } else {
        add("S");
      }
      return current + 2;
    }
    add("K");
    // "mac caffrey", "mac gregor"
    if (at(current + 1, {" C", " Q", " G"})) return current + 3;
    if (at(current + 1, {"C", "K", "Q"}) && !at(current + 1, {"CE", "CI"})) return current + 2;
    return current + 1;
  }

  int letter_g(int current) {
    if (char_at(current + 1) == 'H') {
      if (current > 0 && !is_vowel(current - 1)) {
        add("K");
        return current + 2;
      }
      // "ghislane", "ghiradelli"
      if (current == 0) {
        add(char_at(current + 2) == 'I' ? "J" : "K");
        return current + 2;
      }
      // Parker's rule, e.g. "hugh", "bough", "broughton".
      if ((current > 1 && at(current - 2, {"B", "H", "D"})) ||
          (current > 2 && at(current - 3, {"B", "H", "D"})) ||
          (current > 3 && at(current - 4, {"B", "H"}))) {
        return current + 2;
      }
      // "laugh", "McLaughlin", "cough", "gough", "rough", "tough"
      if (current > 2 && char_at(current - 1) == 'U' &&
          at(current - 3, {"C", "G", "L", "R", "T"})) {
        add("F");
      } else if (current > 0 && char_at(current - 1) != 'I') {
        add("K");
      }
      return current + 2;
    }
    if (char_at(current + 1) == 'N') {
      if (current == 1 && is_vowel(0) && !slavo_germanic()) {
        add("KN", "N");
      } else if (!at(current + 2, {"EY"}) && char_at(current + 1) != 'Y' && !slavo_germanic()) {
        add("N", "KN");  // not "cagney"
      } else {
        add("KN");
      }
      return current + 2;
    }
    // "tagliaro"
    if (at(current + 1, {"LI"}) && !slavo_germanic()) {
      add("KL", "L");
      return current + 2;
    }
    // -ges-, -gep-, -gel-, -gie- at the beginning
    if (current == 0 &&
        (char_at(current + 1) == 'Y' ||
         at(current + 1, {"ES", "EP", "EB", "EL", "EY", "IB", "IL", "IN", "IE", "EI", "ER"}))) {
      add("K", "J");
      return current + 2;
    }
    // -ger-, -gy-
    if ((at(current + 1, {"ER"}) || char_at(current + 1) == 'Y') &&
        !at(0, {"DANGER", "RANGER", "MANGER"}) && !at(current - 1, {"E", "I"}) &&
        !at(current - 1, {"RGY", "OGY"})) {
      add("K", "J");
      return current + 2;
    }
    // Italian, e.g. "biaggi".
    if (at(current + 1, {"E", "I", "Y"}) || at(current - 1, {"AGGI", "OGGI"})) {
      if (germanic_prefix() || at(current + 1, {"ET"})) {
        add("K");
      } else if (at(current + 1, {"IER "})) {
        add("J");  // French ending
      } else {
        add("J", "K");
      }
      return current + 2;
    }
    add("K");
    return current + (char_at(current + 1) == 'G' ? 2 : 1);
  }

  int letter_j(int current) {
    // Spanish, "jose", "san jacinto".
    if (at(current, {"JOSE"}) || at(0, {"SAN "})) {
      if ((current == 0 && char_at(current + 4) == ' ') || at(0, {"SAN "})) {
        add("H");
      } else {
        add("J", "H");
      }
      return current + 1;
    }
    if (current == 0 && !at(current, {"JOSE"})) {
      add("J", "A");  // "Yankelovich", "Jankelowicz"
    } else if (is_vowel(current - 1) && !slavo_germanic() &&
               (char_at(current + 1) == 'A' || char_at(current + 1) == 'O')) {
      add("J", "H");  // Spanish "bajador"
    } else if (current == last_) {
      add("J", "");
    } else if (!at(current + 1, {"L", "T", "K", "S", "N", "M", "B", "Z"}) &&
               !at(current - 1, {"S", "K", "L"})) {
      add("J");
    }
    return current + (char_at(current + 1) == 'J' ? 2 : 1);
  }

  int letter_s(int current) {
    // "island", "isle", "carlisle", "carlysle"
    if (at(current - 1, {"ISL", "YSL"})) return current + 1;
    // "sugar-"
    if (current == 0 && at(current, {"SUGAR"})) {
      add("X", "S");
      return current + 1;
    }
    if (at(current, {"SH"})) {
      if (at(current + 1, {"HEIM", "HOEK", "HOLM", "HOLZ"})) {
        add("S");  // Germanic
      } else {
        add("X");
      }
      return current + 2;
    }
    // Italian and Armenian.
    if (at(current, {"SIO", "SIA"}) || at(current, {"SIAN"})) {
      if (!slavo_germanic()) {
        add("S", "X");
      } else {
        add("S");
      }
      return current + 3;
    }
    // German and anglicisations, "smith" vs "schmidt", "snider" vs
    // "schneider"; also -sz- in Slavic languages.
    if ((current == 0 && at(current + 1, {"M", "N", "L", "W"})) || at(current + 1, {"Z"})) {
      add("S", "X");
      return current + (at(current + 1, {"Z"}) ? 2 : 1);
    }
    if (at(current, {"SC"})) {
      // Schlesinger's rule.
      if (char_at(current + 2) == 'H') {
        // Dutch origin, e.g. "school", "schooner".
        if (at(current + 3, {"OO", "ER", "EN", "UY", "ED", "EM"})) {
          if (at(current + 3, {"ER", "EN"})) {
            add("X", "SK");  // "schermerhorn", "schenker"
          } else {
            add("SK");
          }
          return current + 3;
        }
        if (current == 0 && !is_vowel(3) && char_at(3) != 'W') {
          add("X", "S");
        } else {
          add("X");
        }
        return current + 3;
      }
      if (at(current + 2, {"I", "E", "Y"})) {
        add("S");
        return current + 3;
      }
      add("SK");
      return current + 3;
    }
    // French, e.g. "resnais", "artois".
    if (current == last_ && at(current - 2, {"AI", "OI"})) {
      add("", "S");
    } else {
      add("S");
    }
    return current + (at(current + 1, {"S", "Z"}) ? 2 : 1);
  }

  int letter_t(int current) {
    if (at(current, {"TION"})) {
      add("X");
      return current + 3;
    }
    if (at(current, {"TIA", "TCH"})) {
      add("X");
      return current + 3;
    }
    if (at(current, {"TH"}) || at(current, {"TTH"})) {
      // "thomas", "thames", or Germanic.
      if (at(current + 2, {"OM", "AM"}) || germanic_prefix()) {
        add("T");
      } else {
        add("0", "T");
      }
      return current + 2;
    }
    add("T");
    return current + (at(current + 1, {"T", "D"}) ? 2 : 1);
  }

  int letter_w(int current) {
    if (at(current, {"WR"})) {
      add("R");
      return current + 2;
    }
    if (current == 0 && (is_vowel(current + 1) || at(current, {"WH"}))) {
      // "Wasserman" should match "Vasserman"; "Uomo" should match "Womo".
      if (is_vowel(current + 1)) {
        add("A", "F");
      } else {
        add("A");
      }
    }
    // "Arnow" should match "Arnoff".
    if ((current == last_ && is_vowel(current - 1)) ||
        at(current - 1, {"EWSKI", "EWSKY", "OWSKI", "OWSKY"}) || at(0, {"SCH"})) {
      add("", "F");
      return current + 1;
    }
    // Polish, e.g. "filipowicz".
    if (at(current, {"WICZ", "WITZ"})) {
      add("TS", "FX");
      return current + 4;
    }
    return current + 1;
  }

  int length_;
  int last_;
  std::size_t max_length_;
  std::string text_;  // word padded with spaces so lookahead never leaves it
  std::string primary_;
  std::string alternate_;
};

// Uppercase ASCII letters of a single word; throws for empty or multi-word
// input.
inline std::string prepare_word(std::string_view word) {
  std::string letters;
  bool seen_gap = false;
  for (std::size_t pos = 0; pos < word.size();) {
    const char32_t cp = utf8::decode(word, pos);
    if (detail::is_space(cp)) {
      if (!letters.empty()) seen_gap = true;
      continue;
    }
    std::string_view folded;
    // The cedilla keeps the value the original algorithm gives it.
    if (cp == 0xC7 || cp == 0xE7) {
      folded = "S";
    } else {
      folded = fold_letter(cp);
    }
    if (folded.empty()) continue;
    if (seen_gap) {
      throw MultiWordInput("encode expects a single word, got '" + std::string(word) + "'");
    }
    for (char c : folded) letters.push_back(static_cast<char>(c >= 'a' && c <= 'z' ? c - 32 : c));
  }
  if (letters.empty()) {
    throw EmptyInput("no letters to encode in '" + std::string(word) + "'");
  }
  return letters;
}

}  // namespace detail

/// Double Metaphone codes for a single word.
///
/// Diacritics are folded to ASCII and non-letters dropped before encoding.
/// Throws EmptyInput when nothing is left and MultiWordInput when the input
/// holds more than one whitespace-separated word. A word made only of
/// silent letters (e.g. "h") yields empty codes.
inline PhoneticCode encode(std::string_view word, const PhoneticOptions& options = {}) {
  const std::string letters = detail::prepare_word(word);
  return detail::DoubleMetaphone(letters, std::max<std::size_t>(options.max_code_length, 1))
      .encode();
}

/// Primary matches primary or alternate matches alternate. Empty codes never
/// match anything.
inline bool codes_match(const PhoneticCode& a, const PhoneticCode& b) {
  return (!a.primary.empty() && a.primary == b.primary) ||
         (!a.alternate.empty() && a.alternate == b.alternate);
}

inline bool sounds_similar(std::string_view a, std::string_view b,
                           const PhoneticOptions& options = {}) {
  return codes_match(encode(a, options), encode(b, options));
}

}  // namespace ne_revise
