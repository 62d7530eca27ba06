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
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ne_revise/context_index.hpp"
#include "ne_revise/entity.hpp"
#include "ne_revise/result.hpp"
#include "ne_revise/text.hpp"

namespace ne_revise {

enum class PromptVariant { kFull, kShort };

inline constexpr std::string_view to_string(PromptVariant v) {
  return v == PromptVariant::kFull ? "full" : "short";
}

inline std::optional<PromptVariant> parse_prompt_variant(std::string_view name) {
  if (name == "full") return PromptVariant::kFull;
  if (name == "short") return PromptVariant::kShort;
  return std::nullopt;
}

struct PromptSpec {
  std::string template_id = "revision-v1";
  double asr_confidence_threshold = 0.85;
  std::string context_block;
  std::string prediction;
  // Entity surface -> probability, in utterance order; nullopt renders "missing".
  std::vector<std::pair<std::string, std::optional<double>>> entity_probabilities;
  PromptVariant variant = PromptVariant::kFull;
};

// Shortest round-trip decimal form, locale independent.
inline std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

namespace detail {

inline constexpr std::string_view kPreamble =
    "Speech recognition may incorrectly capture named entities due to similar-sounding words or "
    "uncommon entities in training data.\n"
    "The named entities and their probabilities are provided below as \"Named entities "
    "probability\" in the format: entity : probability.\n"
    "Review the prediction's named entities. For each entity whose probability is below ";

inline constexpr std::string_view kAfterThreshold =
    ", or missing, please complete the following steps:\n";

inline constexpr std::string_view kBullets[] = {
    "Examine the context to determine what the similar-sounding entity refers to, and analyze "
    "the sentence to understand what the ASR-predicted entity refers to. Check if (1) both refer "
    "to the same thing, (2) the difference is likely due to an ASR transcription error, (3) the "
    "replacement improves accuracy, preserves the original sentence's meaning, and fits naturally "
    "within the sentence. If yes to those 3 criteria, then replace the ASR-predicted entity with "
    "the similar-sounding entity.",
    "Make sure to treat each named entity as a cohesive unit when evaluating or replacing. Do not "
    "modify individual words separately in a multi-word entity.",
    "If no suitable similar-sounding entity exists, leave the entity unchanged.",
    "Do not delete any words in the entity that are absent from the context.",
    "Keep all other words, punctuation, and formatting unchanged.",
};

inline constexpr std::string_view kClosing =
    "The context includes similar-sounding entities and sentences containing these named "
    "entities.\n"
    "The revised prediction should start with <<@ and end with @>>\n";

inline constexpr std::string_view kSummaryPrompt =
    "Summarize the following context concisely while ensuring all named entities are preserved. "
    "Include a sentence for each named entity, using only alphabets and digits. Context:";

}  // namespace detail

inline constexpr std::string_view kOpenMarker = "<<@";
inline constexpr std::string_view kCloseMarker = "@>>";

/// Renders the revision prompt. The short variant keeps only the first
/// guideline bullet.
inline std::string build_prompt(const PromptSpec& spec) {
  std::string out;
  out += detail::kPreamble;
  out += format_number(spec.asr_confidence_threshold);
  out += detail::kAfterThreshold;
  const std::size_t bullets = spec.variant == PromptVariant::kFull ? std::size(detail::kBullets) : 1;
  for (std::size_t i = 0; i < bullets; ++i) {
    out += "- ";
    out += detail::kBullets[i];
    out += '\n';
  }
  out += detail::kClosing;
  out += "Context: ";
  out += spec.context_block;
  out += "\n\nSpeech recognition prediction: ";
  out += spec.prediction;
  out += "\n\nNamed entities probability:\n";
  for (const auto& [entity, probability] : spec.entity_probabilities) {
    out += entity;
    out += " : ";
    out += probability ? format_number(*probability) : std::string("missing");
    out += '\n';
  }
  return out;
}

inline std::string build_summary_prompt(std::string_view context) {
  std::string out(detail::kSummaryPrompt);
  out += context;
  return out;
}

// One line per distinct surface, first occurrence wins.
inline std::vector<std::pair<std::string, std::optional<double>>> entity_probabilities(
    const std::vector<Entity>& entities) {
  std::vector<std::pair<std::string, std::optional<double>>> out;
  for (const Entity& e : entities) {
    bool seen = false;
    for (const auto& [surface, p] : out) seen = seen || surface == e.surface;
    if (!seen) out.emplace_back(e.surface, e.probability);
  }
  return out;
}

/// Context block for the proposed mode: each selected context entity with
/// the predicted entities it sounds like, followed by its sentences.
inline std::string render_filtered_context(const FilteredContext& filtered) {
  std::string out;
  for (std::size_t i = 0; i < filtered.matches.size();) {
    const ContextMatch& first = filtered.matches[i];
    std::vector<std::string> similar;
    std::size_t j = i;
    for (; j < filtered.matches.size() && filtered.matches[j].entry_index == first.entry_index; ++j) {
      const std::string& s = filtered.matches[j].predicted.surface;
      if (std::find(similar.begin(), similar.end(), s) == similar.end()) similar.push_back(s);
    }
    out += "\n- entity: " + first.context_entity.surface;
    out += " | type: " + std::string(to_string(first.context_entity.type));
    out += " | similar to: ";
    for (std::size_t k = 0; k < similar.size(); ++k) out += (k ? ", " : "") + similar[k];
    for (const std::string& sentence : first.sentences) out += "\n  sentence: " + sentence;
    i = j;
  }
  return out;
}

inline std::string render_document(const ContextDocument& doc) {
  std::string out;
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    if (i) out += '\n';
    out += doc.sentences[i];
  }
  return out;
}

struct ParsedRevision {
  std::string revised;
  RevisionStatus status = RevisionStatus::kUnchanged;
};

/// Extracts the text between the first "<<@" and the next "@>>".
///
/// Never throws. Missing markers or an empty body give back the original
/// with fallback_format_error. The extracted text is normalized the same way
/// as the prediction, so an echo of the prediction reads as unchanged.
inline ParsedRevision parse_revision(std::string_view raw, std::string_view original) {
  const auto open = raw.find(kOpenMarker);
  const auto close =
      open == std::string_view::npos ? open : raw.find(kCloseMarker, open + kOpenMarker.size());
  if (close == std::string_view::npos) {
    return {std::string(original), RevisionStatus::kFallbackFormatError};
  }
  const std::string_view body = raw.substr(open + kOpenMarker.size(), close - open - kOpenMarker.size());
  const Tokens tokens = normalize_text(body);
  if (tokens.empty()) return {std::string(original), RevisionStatus::kFallbackFormatError};
  std::string revised = join_tokens(tokens);
  if (revised == join_tokens(normalize_text(original))) {
    return {std::string(original), RevisionStatus::kUnchanged};
  }
  return {std::move(revised), RevisionStatus::kRevised};
}

}  // namespace ne_revise
