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

// JSON Lines interchange files exchanged with the external ASR/NER adapter.
// The record layout is documented in docs/interchange.md.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ne_revise/entity.hpp"
#include "ne_revise/error.hpp"
#include "ne_revise/segment.hpp"
#include "ne_revise/text.hpp"

namespace ne_revise {

inline constexpr int kSchemaVersion = 1;

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& record) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(record, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string require_string(const json& obj, const char* key, const std::string& record) {
  const json& v = require(obj, key, record);
  if (!v.is_string()) throw SchemaError(record, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

inline std::size_t require_index(const json& obj, const char* key, const std::string& record) {
  const json& v = require(obj, key, record);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw SchemaError(record, std::string("field '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

inline void check_schema_version(const json& obj, const std::string& record) {
  const json& v = require(obj, "schema_version", record);
  if (!v.is_number_integer() || v.get<long long>() != kSchemaVersion) {
    throw SchemaError(record, "unsupported schema_version " + v.dump());
  }
}

inline EntityType require_type(const json& obj, const std::string& record) {
  const std::string label = require_string(obj, "type", record);
  auto type = parse_entity_type(label);
  if (!type) throw UnknownEntityType(record, "unknown entity type '" + label + "'");
  return *type;
}

inline std::vector<Entity> parse_span_entities(const json& array, const Tokens& tokens,
                                               bool allow_probability, const std::string& field,
                                               const std::string& record) {
  if (!array.is_array()) throw SchemaError(record, "field '" + field + "' must be an array");
  std::vector<Entity> entities;
  for (const json& item : array) {
    if (!item.is_object()) throw SchemaError(record, "entries of '" + field + "' must be objects");
    Entity e = make_entity(require_string(item, "text", record), require_type(item, record));
    const std::size_t begin = require_index(item, "start_token", record);
    const std::size_t end = require_index(item, "end_token", record);
    if (begin >= end) {
      throw SchemaError(record, "empty span [" + std::to_string(begin) + ", " +
                                    std::to_string(end) + ") in '" + field + "'");
    }
    if (end > tokens.size()) {
      throw SpanOutOfBounds(record, "span [" + std::to_string(begin) + ", " + std::to_string(end) +
                                        ") exceeds " + std::to_string(tokens.size()) +
                                        " tokens in '" + field + "'");
    }
    const Tokens covered(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                         tokens.begin() + static_cast<std::ptrdiff_t>(end));
    if (covered != e.tokens) {
      throw SchemaError(record, "entity text '" + e.surface + "' does not match tokens '" +
                                    join_tokens(covered) + "'");
    }
    e.span = TokenSpan{begin, end};
    if (auto p = item.find("probability"); p != item.end() && !p->is_null()) {
      if (!allow_probability) {
        throw SchemaError(record, "probability is only allowed on hypothesis entities");
      }
      if (!p->is_number() || !std::isfinite(p->get<double>()) || p->get<double>() < 0.0 ||
          p->get<double>() > 1.0) {
        throw SchemaError(record, "probability must be a number in [0, 1]");
      }
      e.probability = p->get<double>();
    }
    entities.push_back(std::move(e));
  }
  std::vector<TokenSpan> spans;
  for (const Entity& e : entities) spans.push_back(*e.span);
  std::sort(spans.begin(), spans.end(),
            [](const TokenSpan& a, const TokenSpan& b) { return a.begin < b.begin; });
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].begin < spans[i - 1].end) {
      throw SchemaError(record, "overlapping entity spans in '" + field + "'");
    }
  }
  return entities;
}

inline nlohmann::ordered_json span_entity_json(const Entity& e, bool with_probability) {
  nlohmann::ordered_json j;
  j["text"] = e.surface;
  j["type"] = to_string(e.type);
  j["start_token"] = e.span ? e.span->begin : 0;
  j["end_token"] = e.span ? e.span->end : 0;
  if (with_probability && e.probability) j["probability"] = *e.probability;
  return j;
}

template <typename ParseRecord>
void for_each_record(std::istream& in, ParseRecord&& parse) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) throw SchemaError(where, "not a JSON object");
    parse(obj, where);
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

inline Utterance parse_utterance(const nlohmann::json& obj, const std::string& where = "record") {
  if (!obj.is_object()) throw SchemaError(where, "not a JSON object");
  const std::string id = detail::require_string(obj, "id", where);
  detail::check_schema_version(obj, id);
  Utterance u;
  u.id = id;
  u.hypothesis = normalize_text(detail::require_string(obj, "hypothesis", id));
  if (auto r = obj.find("reference"); r != obj.end() && !r->is_null()) {
    if (!r->is_string()) throw SchemaError(id, "field 'reference' must be a string");
    u.reference = normalize_text(r->get<std::string>());
  }
  u.context_doc_id = detail::require_string(obj, "context_doc_id", id);
  u.entities = detail::parse_span_entities(detail::require(obj, "entities", id), u.hypothesis,
                                           true, "entities", id);
  if (auto r = obj.find("reference_entities"); r != obj.end() && !r->is_null()) {
    if (!u.reference) throw SchemaError(id, "reference_entities given without a reference");
    u.reference_entities =
        detail::parse_span_entities(*r, *u.reference, false, "reference_entities", id);
  }
  return u;
}

inline std::vector<Utterance> read_utterances(std::istream& in) {
  std::vector<Utterance> out;
  std::set<std::string> seen;
  detail::for_each_record(in, [&](const nlohmann::json& obj, const std::string& where) {
    Utterance u = parse_utterance(obj, where);
    if (!seen.insert(u.id).second) throw SchemaError(u.id, "duplicate utterance id");
    out.push_back(std::move(u));
  });
  return out;
}

/// Reads and validates a JSON Lines utterance file.
inline std::vector<Utterance> ingest_utterances(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  return read_utterances(in);
}

inline nlohmann::ordered_json to_json(const Utterance& u) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["id"] = u.id;
  j["hypothesis"] = join_tokens(u.hypothesis);
  if (u.reference) j["reference"] = join_tokens(*u.reference);
  j["context_doc_id"] = u.context_doc_id;
  j["entities"] = nlohmann::ordered_json::array();
  for (const Entity& e : u.entities) j["entities"].push_back(detail::span_entity_json(e, true));
  if (u.reference) {
    j["reference_entities"] = nlohmann::ordered_json::array();
    for (const Entity& e : u.reference_entities) {
      j["reference_entities"].push_back(detail::span_entity_json(e, false));
    }
  }
  return j;
}

inline void write_utterances(std::ostream& out, const std::vector<Utterance>& utterances) {
  for (const Utterance& u : utterances) out << to_json(u).dump() << '\n';
}

inline ContextDocument parse_context(const nlohmann::json& obj, const std::string& where = "record") {
  if (!obj.is_object()) throw SchemaError(where, "not a JSON object");
  const std::string id = detail::require_string(obj, "id", where);
  detail::check_schema_version(obj, id);
  ContextDocument doc;
  doc.id = id;
  if (auto s = obj.find("sentences"); s != obj.end()) {
    if (!s->is_array()) throw SchemaError(id, "field 'sentences' must be an array");
    for (const auto& sentence : *s) {
      if (!sentence.is_string() || trim(sentence.get<std::string>()).empty()) {
        throw SchemaError(id, "sentences must be non-empty strings");
      }
      doc.sentences.push_back(sentence.get<std::string>());
    }
  } else if (auto t = obj.find("text"); t != obj.end() && t->is_string()) {
    doc.sentences = segment_sentences(t->get<std::string>());
  } else {
    throw SchemaError(id, "missing field 'sentences'");
  }
  if (auto ents = obj.find("entities"); ents != obj.end() && !ents->is_null()) {
    if (!ents->is_array()) throw SchemaError(id, "field 'entities' must be an array");
    for (const auto& item : *ents) {
      if (!item.is_object()) throw SchemaError(id, "entries of 'entities' must be objects");
      Entity e = make_entity(detail::require_string(item, "text", id), detail::require_type(item, id));
      if (e.tokens.empty()) throw SchemaError(id, "entity text has no word tokens");
      e.sentence_id = detail::require_index(item, "sentence_id", id);
      doc.entities.push_back(std::move(e));
    }
  }
  return doc;
}

inline std::vector<ContextDocument> read_contexts(std::istream& in) {
  std::vector<ContextDocument> out;
  std::set<std::string> seen;
  detail::for_each_record(in, [&](const nlohmann::json& obj, const std::string& where) {
    ContextDocument doc = parse_context(obj, where);
    if (!seen.insert(doc.id).second) throw SchemaError(doc.id, "duplicate context id");
    out.push_back(std::move(doc));
  });
  return out;
}

inline std::vector<ContextDocument> ingest_contexts(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  return read_contexts(in);
}

inline nlohmann::ordered_json to_json(const ContextDocument& doc) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["id"] = doc.id;
  j["sentences"] = doc.sentences;
  j["entities"] = nlohmann::ordered_json::array();
  for (const Entity& e : doc.entities) {
    nlohmann::ordered_json ej;
    ej["text"] = e.surface;
    ej["type"] = to_string(e.type);
    ej["sentence_id"] = e.sentence_id.value_or(0);
    j["entities"].push_back(std::move(ej));
  }
  return j;
}

inline void write_contexts(std::ostream& out, const std::vector<ContextDocument>& docs) {
  for (const ContextDocument& doc : docs) out << to_json(doc).dump() << '\n';
}

}  // namespace ne_revise
