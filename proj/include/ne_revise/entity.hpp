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

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ne_revise/text.hpp"

namespace ne_revise {

// The closed set of entity types the pipeline handles (OntoNotes labels).
enum class EntityType { kPerson, kOrg, kGpe, kLoc, kProduct, kEvent, kNorp, kFac };

inline constexpr std::array<EntityType, 8> kAllEntityTypes = {
    EntityType::kPerson, EntityType::kOrg,   EntityType::kGpe,  EntityType::kLoc,
    EntityType::kProduct, EntityType::kEvent, EntityType::kNorp, EntityType::kFac};

inline constexpr std::string_view to_string(EntityType type) {
  switch (type) {
    case EntityType::kPerson: return "PERSON";
    case EntityType::kOrg: return "ORG";
    case EntityType::kGpe: return "GPE";
    case EntityType::kLoc: return "LOC";
    case EntityType::kProduct: return "PRODUCT";
    case EntityType::kEvent: return "EVENT";
    case EntityType::kNorp: return "NORP";
    case EntityType::kFac: return "FAC";
  }
  return "";
}

// Exact, case-sensitive match against the eight labels.
inline std::optional<EntityType> parse_entity_type(std::string_view label) {
  for (EntityType type : kAllEntityTypes) {
    if (to_string(type) == label) return type;
  }
  return std::nullopt;
}

// Half-open token range [begin, end).
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

struct Entity {
  std::string surface;  // tokens joined by single spaces
  Tokens tokens;
  EntityType type = EntityType::kPerson;
  std::optional<double> probability;  // ASR-derived entities only
  std::optional<std::size_t> sentence_id;  // context entities: sentence index
  std::optional<TokenSpan> span;           // utterance entities: token range

  friend bool operator==(const Entity&, const Entity&) = default;
};

inline Entity make_entity(std::string_view text, EntityType type) {
  Entity e;
  e.tokens = normalize_text(text);
  e.surface = join_tokens(e.tokens);
  e.type = type;
  return e;
}

struct Utterance {
  std::string id;
  Tokens hypothesis;
  std::optional<Tokens> reference;
  std::vector<Entity> entities;            // over hypothesis tokens
  std::vector<Entity> reference_entities;  // over reference tokens
  std::string context_doc_id;

  std::string prediction() const { return join_tokens(hypothesis); }

  // One flag per reference token: inside some reference entity span.
  std::vector<bool> reference_ne_mask() const {
    std::vector<bool> mask(reference ? reference->size() : 0, false);
    for (const Entity& e : reference_entities) {
      if (!e.span) continue;
      for (std::size_t i = e.span->begin; i < e.span->end && i < mask.size(); ++i) mask[i] = true;
    }
    return mask;
  }

  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct ContextDocument {
  std::string id;
  std::vector<std::string> sentences;
  std::vector<Entity> entities;  // tagged context entities with sentence_id

  friend bool operator==(const ContextDocument&, const ContextDocument&) = default;
};

}  // namespace ne_revise
