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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ne_revise/error.hpp"

namespace ne_revise {

enum class RevisionMode { kNone, kPhoneticRandom, kFullContext, kContextSummary, kProposed };

inline constexpr std::array<RevisionMode, 5> kAllRevisionModes = {
    RevisionMode::kNone, RevisionMode::kPhoneticRandom, RevisionMode::kFullContext,
    RevisionMode::kContextSummary, RevisionMode::kProposed};

inline constexpr std::string_view to_string(RevisionMode mode) {
  switch (mode) {
    case RevisionMode::kNone: return "none";
    case RevisionMode::kPhoneticRandom: return "phonetic_random";
    case RevisionMode::kFullContext: return "full_context";
    case RevisionMode::kContextSummary: return "context_summary";
    case RevisionMode::kProposed: return "proposed";
  }
  return "";
}

inline std::optional<RevisionMode> parse_revision_mode(std::string_view name) {
  for (RevisionMode mode : kAllRevisionModes) {
    if (to_string(mode) == name) return mode;
  }
  return std::nullopt;
}

// Modes that talk to a language model.
inline constexpr bool uses_provider(RevisionMode mode) {
  return mode == RevisionMode::kFullContext || mode == RevisionMode::kContextSummary ||
         mode == RevisionMode::kProposed;
}

enum class RevisionStatus { kRevised, kUnchanged, kFallbackFormatError, kRejectedGuardrail };

inline constexpr std::array<RevisionStatus, 4> kAllRevisionStatuses = {
    RevisionStatus::kRevised, RevisionStatus::kUnchanged, RevisionStatus::kFallbackFormatError,
    RevisionStatus::kRejectedGuardrail};

inline constexpr std::string_view to_string(RevisionStatus status) {
  switch (status) {
    case RevisionStatus::kRevised: return "revised";
    case RevisionStatus::kUnchanged: return "unchanged";
    case RevisionStatus::kFallbackFormatError: return "fallback_format_error";
    case RevisionStatus::kRejectedGuardrail: return "rejected_guardrail";
  }
  return "";
}

inline std::optional<RevisionStatus> parse_revision_status(std::string_view name) {
  for (RevisionStatus status : kAllRevisionStatuses) {
    if (to_string(status) == name) return status;
  }
  return std::nullopt;
}

struct RevisionResult {
  std::string utterance_id;
  RevisionMode mode = RevisionMode::kNone;
  std::string original;
  std::string revised;
  RevisionStatus status = RevisionStatus::kUnchanged;
  std::string raw_response;
  std::vector<std::pair<std::string, std::string>> changed_entities;  // (from, to)

  friend bool operator==(const RevisionResult&, const RevisionResult&) = default;
};

inline nlohmann::ordered_json to_json(const RevisionResult& r) {
  nlohmann::ordered_json j;
  j["utterance_id"] = r.utterance_id;
  j["mode"] = to_string(r.mode);
  j["original"] = r.original;
  j["revised"] = r.revised;
  j["status"] = to_string(r.status);
  j["raw_response"] = r.raw_response;
  auto changes = nlohmann::ordered_json::array();
  for (const auto& [from, to] : r.changed_entities) {
    changes.push_back(nlohmann::ordered_json{{"from", from}, {"to", to}});
  }
  j["changed_entities"] = std::move(changes);
  return j;
}

inline RevisionResult revision_result_from_json(const nlohmann::json& j, const std::string& where) {
  const auto field = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw SchemaError(where, std::string("field '") + key + "' must be a string");
    }
    return it->get<std::string>();
  };
  RevisionResult r;
  r.utterance_id = field("utterance_id");
  const std::string mode = field("mode");
  const std::string status = field("status");
  auto parsed_mode = parse_revision_mode(mode);
  auto parsed_status = parse_revision_status(status);
  if (!parsed_mode) throw SchemaError(where, "unknown mode '" + mode + "'");
  if (!parsed_status) throw SchemaError(where, "unknown status '" + status + "'");
  r.mode = *parsed_mode;
  r.status = *parsed_status;
  r.original = field("original");
  r.revised = field("revised");
  r.raw_response = field("raw_response");
  if (auto it = j.find("changed_entities"); it != j.end()) {
    if (!it->is_array()) throw SchemaError(where, "field 'changed_entities' must be an array");
    for (const auto& c : *it) {
      if (!c.is_object() || !c.contains("from") || !c.contains("to") || !c["from"].is_string() ||
          !c["to"].is_string()) {
        throw SchemaError(where, "changed_entities items need string 'from' and 'to'");
      }
      r.changed_entities.emplace_back(c["from"].get<std::string>(), c["to"].get<std::string>());
    }
  }
  return r;
}

}  // namespace ne_revise
