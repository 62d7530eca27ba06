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
#include <optional>
#include <string_view>
#include <vector>

#include "ne_revise/entity.hpp"
#include "ne_revise/text.hpp"

namespace ne_revise {

enum class EditKind { kMatch, kSubstitute, kDelete, kInsert };

inline constexpr std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::kMatch: return "match";
    case EditKind::kSubstitute: return "substitute";
    case EditKind::kDelete: return "delete";
    case EditKind::kInsert: return "insert";
  }
  return "";
}

struct EditOp {
  EditKind kind = EditKind::kMatch;
  std::optional<std::size_t> ref;  // absent for insertions
  std::optional<std::size_t> hyp;  // absent for deletions

  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct Alignment {
  std::vector<EditOp> ops;  // left to right

  std::size_t cost() const {
    return static_cast<std::size_t>(std::count_if(
        ops.begin(), ops.end(), [](const EditOp& op) { return op.kind != EditKind::kMatch; }));
  }
};

/// Minimum edit distance alignment with unit costs.
///
/// Among equal-cost paths the backtrace prefers match, then substitution,
/// then deletion, then insertion, so the result is deterministic.
inline Alignment align(const Tokens& ref, const Tokens& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t width = m + 1;
  std::vector<std::size_t> d((n + 1) * width);
  const auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return d[i * width + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  Alignment out;
  out.ops.reserve(n + m);
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && at(i, j) == at(i - 1, j - 1)) {
      out.ops.push_back({EditKind::kMatch, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      out.ops.push_back({EditKind::kSubstitute, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      out.ops.push_back({EditKind::kDelete, i - 1, std::nullopt});
      --i;
    } else {
      out.ops.push_back({EditKind::kInsert, std::nullopt, j - 1});
      --j;
    }
  }
  std::reverse(out.ops.begin(), out.ops.end());
  return out;
}

/// Maps entity spans over `before` onto `after` through the alignment.
///
/// The projected span covers every `after` token aligned to a token of the
/// original span, plus insertions strictly inside it. Entities whose tokens
/// were all deleted project to an empty span and keep no tokens.
inline std::vector<Entity> project_entities(const Tokens& before, const Tokens& after,
                                            const std::vector<Entity>& entities) {
  const Alignment alignment = align(before, after);
  std::vector<Entity> out;
  out.reserve(entities.size());
  for (const Entity& e : entities) {
    Entity projected = e;
    projected.tokens.clear();
    projected.probability.reset();
    if (!e.span) {
      out.push_back(std::move(projected));
      continue;
    }
    std::optional<std::size_t> lo;
    std::size_t hi = 0;
    bool inside = false;
    for (const EditOp& op : alignment.ops) {
      if (op.ref) inside = e.span->contains(*op.ref);
      const bool interior_insert = !op.ref && inside && lo;
      if ((op.ref && inside && op.hyp) || interior_insert) {
        if (!lo) lo = *op.hyp;
        hi = *op.hyp + 1;
      }
      if (op.ref && *op.ref + 1 == e.span->end) inside = false;
    }
    const std::size_t begin = lo.value_or(0);
    const std::size_t end = lo ? hi : 0;
    projected.span = TokenSpan{begin, end};
    projected.tokens.assign(after.begin() + static_cast<std::ptrdiff_t>(begin),
                            after.begin() + static_cast<std::ptrdiff_t>(end));
    projected.surface = join_tokens(projected.tokens);
    out.push_back(std::move(projected));
  }
  return out;
}

}  // namespace ne_revise
