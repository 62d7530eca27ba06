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
#include <atomic>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "ne_revise/alignment.hpp"
#include "ne_revise/context_index.hpp"
#include "ne_revise/entity.hpp"
#include "ne_revise/error.hpp"
#include "ne_revise/guardrail.hpp"
#include "ne_revise/prompt.hpp"
#include "ne_revise/provider.hpp"
#include "ne_revise/result.hpp"
#include "ne_revise/text.hpp"

namespace ne_revise {

struct RevisionOptions {
  double asr_confidence_threshold = 0.85;
  PromptVariant variant = PromptVariant::kFull;
  GuardrailBudget guardrail;
  std::uint64_t seed = 0;
};

// What a mode reads besides the utterance. Only the member the mode needs
// has to be set.
struct RevisionContext {
  const FilteredContext* filtered = nullptr;  // proposed, phonetic_random
  const ContextDocument* document = nullptr;  // full_context
  const std::string* summary = nullptr;       // context_summary
};

// raw_response prefix marking a provider failure rather than a model reply.
inline constexpr std::string_view kProviderFailurePrefix = "[provider unavailable] ";

inline bool provider_failed(const RevisionResult& r) {
  return std::string_view(r.raw_response).substr(0, kProviderFailurePrefix.size()) ==
         kProviderFailurePrefix;
}

inline bool needs_review(const Entity& e, double threshold) {
  return !e.probability || *e.probability < threshold;
}

namespace detail {

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Unbiased index in [0, n) by rejection; the engine's bits are fully
// specified by the standard, unlike std::uniform_int_distribution.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

inline std::vector<std::pair<std::string, std::string>> entity_changes(
    const Tokens& before, const Tokens& after, const std::vector<Entity>& entities) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto projected = project_entities(before, after, entities);
  for (std::size_t i = 0; i < entities.size(); ++i) {
    if (entities[i].surface != projected[i].surface) {
      out.emplace_back(entities[i].surface, projected[i].surface);
    }
  }
  return out;
}

inline RevisionResult base_result(const Utterance& u, RevisionMode mode) {
  RevisionResult r;
  r.utterance_id = u.id;
  r.mode = mode;
  r.original = u.prediction();
  r.revised = r.original;
  r.status = RevisionStatus::kUnchanged;
  return r;
}

}  // namespace detail

/// Control condition: swap every low-confidence entity for a random
/// same-type, similar-sounding context entity. Seeded per utterance, so the
/// output depends only on (utterance, candidates, seed).
inline RevisionResult revise_phonetic_random(const Utterance& u, const FilteredContext& filtered,
                                             const RevisionOptions& options) {
  RevisionResult r = detail::base_result(u, RevisionMode::kPhoneticRandom);
  const std::uint64_t h = detail::fnv1a(u.id);
  std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  std::mt19937_64 rng(seq);

  struct Replacement {
    TokenSpan span;
    const Entity* with;
  };
  std::vector<Replacement> replacements;
  for (std::size_t i = 0; i < u.entities.size(); ++i) {
    const Entity& e = u.entities[i];
    if (!e.span || !needs_review(e, options.asr_confidence_threshold)) continue;
    const auto candidates = filtered.for_predicted(i);
    if (candidates.empty()) continue;
    const ContextMatch* pick = candidates[detail::uniform_index(rng, candidates.size())];
    replacements.push_back({*e.span, &pick->context_entity});
  }
  std::sort(replacements.begin(), replacements.end(),
            [](const Replacement& a, const Replacement& b) { return a.span.begin > b.span.begin; });

  Tokens tokens = u.hypothesis;
  for (const Replacement& rep : replacements) {
    const auto first = tokens.begin() + static_cast<std::ptrdiff_t>(rep.span.begin);
    tokens.erase(first, first + static_cast<std::ptrdiff_t>(rep.span.size()));
    tokens.insert(tokens.begin() + static_cast<std::ptrdiff_t>(rep.span.begin), rep.with->tokens.begin(),
                  rep.with->tokens.end());
  }
  const std::string revised = join_tokens(tokens);
  if (revised != r.original) {
    r.revised = revised;
    r.status = RevisionStatus::kRevised;
    r.changed_entities = detail::entity_changes(u.hypothesis, tokens, u.entities);
  }
  return r;
}

/// The LLM path shared by proposed, full_context and context_summary:
/// prompt, call, parse, guardrail.
inline RevisionResult revise_with_provider(const Utterance& u, RevisionMode mode,
                                           const std::string& context_block, Provider& provider,
                                           const RevisionOptions& options) {
  RevisionResult r = detail::base_result(u, mode);
  if (u.entities.empty()) return r;

  PromptSpec spec;
  spec.asr_confidence_threshold = options.asr_confidence_threshold;
  spec.context_block = context_block;
  spec.prediction = r.original;
  spec.entity_probabilities = entity_probabilities(u.entities);
  spec.variant = options.variant;

  try {
    r.raw_response = provider.complete({u.id, build_prompt(spec)});
  } catch (const ProviderUnavailable& e) {
    r.raw_response = std::string(kProviderFailurePrefix) + e.what();
    r.status = RevisionStatus::kFallbackFormatError;
    return r;
  }

  ParsedRevision parsed = parse_revision(r.raw_response, r.original);
  r.status = parsed.status;
  if (parsed.status != RevisionStatus::kRevised) return r;

  const Tokens revised = normalize_text(parsed.revised);
  r.status = guardrail(u.hypothesis, revised, u.entities, options.guardrail);
  if (r.status == RevisionStatus::kRevised) {
    r.revised = std::move(parsed.revised);
    r.changed_entities = detail::entity_changes(u.hypothesis, revised, u.entities);
  }
  return r;
}

inline RevisionResult revise_utterance(const Utterance& u, const RevisionContext& context,
                                       RevisionMode mode, Provider* provider,
                                       const RevisionOptions& options) {
  const auto need = [&](const void* p, const char* what) {
    if (!p) {
      throw ValidationError("mode " + std::string(to_string(mode)) + " needs " + what +
                            " for utterance '" + u.id + "'");
    }
  };
  switch (mode) {
    case RevisionMode::kNone:
      return detail::base_result(u, mode);
    case RevisionMode::kPhoneticRandom:
      need(context.filtered, "a filtered context");
      return revise_phonetic_random(u, *context.filtered, options);
    case RevisionMode::kProposed:
      need(context.filtered, "a filtered context");
      need(provider, "a provider");
      return revise_with_provider(u, mode, render_filtered_context(*context.filtered), *provider, options);
    case RevisionMode::kFullContext:
      need(context.document, "a context document");
      need(provider, "a provider");
      return revise_with_provider(u, mode, render_document(*context.document), *provider, options);
    case RevisionMode::kContextSummary:
      need(context.summary, "a context summary");
      need(provider, "a provider");
      return revise_with_provider(u, mode, *context.summary, *provider, options);
  }
  throw Error("unhandled revision mode");
}

// Throws ProviderUnavailable when the provider gives up.
inline std::string summarize_context(const ContextDocument& doc, Provider& provider) {
  return provider.complete({summary_key(doc.id), build_summary_prompt(render_document(doc))});
}

/// Runs f(0..n-1) on `workers` threads and returns results in index order.
/// The first exception thrown by any task is rethrown after all workers stop.
template <typename F>
auto parallel_map(std::size_t n, std::size_t workers, F&& f) {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  const auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  std::vector<R> out;
  out.reserve(n);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

}  // namespace ne_revise
