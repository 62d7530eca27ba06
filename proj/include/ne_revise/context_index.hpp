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
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ne_revise/entity.hpp"
#include "ne_revise/error.hpp"
#include "ne_revise/phonetic.hpp"

namespace ne_revise {

enum class MatchMode {
  kAnyToken,      // some predicted token sounds like some context token
  kConcatenated,  // codes of the whole entity with spaces removed
};

struct FilterOptions {
  MatchMode match_mode = MatchMode::kAnyToken;
  std::size_t max_matches_per_entity = 5;  // 0 disables the cap
};

// Codes of a token, or nothing when the token has no letters.
inline std::optional<PhoneticCode> try_encode(std::string_view word, const PhoneticOptions& options) {
  try {
    return encode(word, options);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

inline std::optional<PhoneticCode> encode_concatenated(const Tokens& tokens,
                                                       const PhoneticOptions& options) {
  std::string joined;
  for (const std::string& t : tokens) joined += t;
  return try_encode(joined, options);
}

struct IndexEntry {
  Entity entity;                        // first occurrence in the document
  std::vector<std::string> sentences;   // verbatim, document order, no repeats
  std::vector<std::optional<PhoneticCode>> token_codes;
  std::optional<PhoneticCode> concatenated_code;
};

/// Context entities of one document, keyed by type and by phonetic code.
///
/// Repeated mentions of the same (tokens, type) collapse into one entry that
/// lists every containing sentence. Entries are in document order.
class ContextIndex {
 public:
  const std::string& doc_id() const { return doc_id_; }
  const std::vector<IndexEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const PhoneticOptions& phonetic_options() const { return phonetic_; }

  const std::vector<std::size_t>& entries_of_type(EntityType type) const {
    static const std::vector<std::size_t> kNone;
    auto it = by_type_.find(type);
    return it == by_type_.end() ? kNone : it->second;
  }

  const std::vector<std::size_t>& entries_with_code(std::string_view code) const {
    static const std::vector<std::size_t> kNone;
    auto it = by_code_.find(std::string(code));
    return it == by_code_.end() ? kNone : it->second;
  }

  const std::map<EntityType, std::vector<std::size_t>>& by_type() const { return by_type_; }
  const std::unordered_map<std::string, std::vector<std::size_t>>& by_code() const {
    return by_code_;
  }

 private:
  friend ContextIndex build_index(const ContextDocument&, const std::vector<Entity>&,
                                  const PhoneticOptions&);

  std::string doc_id_;
  PhoneticOptions phonetic_;
  std::vector<IndexEntry> entries_;
  std::map<EntityType, std::vector<std::size_t>> by_type_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_code_;
};

inline ContextIndex build_index(const ContextDocument& doc, const std::vector<Entity>& entities,
                                const PhoneticOptions& phonetic = {}) {
  ContextIndex index;
  index.doc_id_ = doc.id;
  index.phonetic_ = phonetic;

  std::vector<std::size_t> order(entities.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Entity& e = entities[i];
    if (!e.sentence_id || *e.sentence_id >= doc.sentences.size()) {
      throw DanglingSentenceRef(
          doc.id, "entity '" + e.surface + "' references sentence " +
                      (e.sentence_id ? std::to_string(*e.sentence_id) : std::string("<none>")) +
                      " of " + std::to_string(doc.sentences.size()));
    }
    order[i] = i;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return *entities[a].sentence_id < *entities[b].sentence_id;
  });

  std::map<std::pair<Tokens, EntityType>, std::size_t> seen;
  for (std::size_t i : order) {
    const Entity& e = entities[i];
    const std::string& sentence = doc.sentences[*e.sentence_id];
    auto [it, inserted] = seen.try_emplace({e.tokens, e.type}, index.entries_.size());
    if (!inserted) {
      auto& sentences = index.entries_[it->second].sentences;
      if (std::find(sentences.begin(), sentences.end(), sentence) == sentences.end()) {
        sentences.push_back(sentence);
      }
      continue;
    }
    IndexEntry entry;
    entry.entity = e;
    entry.sentences.push_back(sentence);
    for (const std::string& token : e.tokens) entry.token_codes.push_back(try_encode(token, phonetic));
    entry.concatenated_code = encode_concatenated(e.tokens, phonetic);
    index.entries_.push_back(std::move(entry));
  }

  for (std::size_t i = 0; i < index.entries_.size(); ++i) {
    const IndexEntry& entry = index.entries_[i];
    index.by_type_[entry.entity.type].push_back(i);
    std::set<std::string> keys;
    for (const auto& code : entry.token_codes) {
      if (!code) continue;
      if (!code->primary.empty()) keys.insert(code->primary);
      if (!code->alternate.empty()) keys.insert(code->alternate);
    }
    for (const std::string& key : keys) index.by_code_[key].push_back(i);
  }
  return index;
}

inline ContextIndex build_index(const ContextDocument& doc, const PhoneticOptions& phonetic = {}) {
  return build_index(doc, doc.entities, phonetic);
}

struct ContextMatch {
  std::size_t entry_index = 0;  // position in the index (document order)
  Entity context_entity;
  std::vector<std::string> sentences;
  std::size_t predicted_index = 0;
  Entity predicted;
};

struct FilteredContext {
  std::vector<ContextMatch> matches;

  bool empty() const { return matches.empty(); }

  // Matches for one predicted entity, in document order.
  std::vector<const ContextMatch*> for_predicted(std::size_t predicted_index) const {
    std::vector<const ContextMatch*> out;
    for (const ContextMatch& m : matches) {
      if (m.predicted_index == predicted_index) out.push_back(&m);
    }
    return out;
  }
};

/// Context entities that share a predicted entity's type and sound like it.
///
/// With MatchMode::kAnyToken a pair matches when any predicted token and any
/// context token have equal primary or equal alternate codes. Per predicted
/// entity at most `max_matches_per_entity` entries are kept, earliest first.
/// Output is ordered by context position, then by predicted entity.
inline FilteredContext filter_context(const ContextIndex& index, const std::vector<Entity>& predicted,
                                      const FilterOptions& options = {}) {
  const PhoneticOptions& phonetic = index.phonetic_options();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (entry, predicted)

  for (std::size_t p = 0; p < predicted.size(); ++p) {
    const Entity& entity = predicted[p];
    std::vector<std::size_t> hits;
    if (options.match_mode == MatchMode::kConcatenated) {
      const auto code = encode_concatenated(entity.tokens, phonetic);
      if (code) {
        for (std::size_t e : index.entries_of_type(entity.type)) {
          const auto& other = index.entries()[e].concatenated_code;
          if (other && codes_match(*code, *other)) hits.push_back(e);
        }
      }
    } else {
      std::vector<PhoneticCode> codes;
      std::set<std::size_t> candidates;
      for (const std::string& token : entity.tokens) {
        auto code = try_encode(token, phonetic);
        if (!code) continue;
        for (const std::string* key : {&code->primary, &code->alternate}) {
          if (key->empty()) continue;
          const auto& found = index.entries_with_code(*key);
          candidates.insert(found.begin(), found.end());
        }
        codes.push_back(std::move(*code));
      }
      // A shared key is necessary but not sufficient: primary-vs-alternate
      // collisions are not matches.
      for (std::size_t e : candidates) {
        const IndexEntry& entry = index.entries()[e];
        if (entry.entity.type != entity.type) continue;
        const bool similar = std::any_of(codes.begin(), codes.end(), [&](const PhoneticCode& c) {
          return std::any_of(entry.token_codes.begin(), entry.token_codes.end(),
                             [&](const auto& other) { return other && codes_match(c, *other); });
        });
        if (similar) hits.push_back(e);
      }
    }
    std::sort(hits.begin(), hits.end());
    if (options.max_matches_per_entity > 0 && hits.size() > options.max_matches_per_entity) {
      hits.resize(options.max_matches_per_entity);
    }
    for (std::size_t e : hits) pairs.emplace_back(e, p);
  }

  std::sort(pairs.begin(), pairs.end());
  FilteredContext out;
  for (const auto& [e, p] : pairs) {
    const IndexEntry& entry = index.entries()[e];
    out.matches.push_back(ContextMatch{e, entry.entity, entry.sentences, p, predicted[p]});
  }
  return out;
}

}  // namespace ne_revise
