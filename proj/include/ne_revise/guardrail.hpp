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

#include <cstddef>
#include <limits>
#include <vector>

#include "ne_revise/alignment.hpp"
#include "ne_revise/entity.hpp"
#include "ne_revise/result.hpp"

namespace ne_revise {

struct GuardrailBudget {
  double max_length_ratio = 1.5;
  std::size_t max_nne_edits = 2;
};

struct GuardrailCheck {
  double length_ratio = 0.0;
  std::size_t nne_edits = 0;
  bool accepted = false;
};

/// Word edits between `original` and `revised` that touch no entity span.
///
/// Substitutions and deletions are judged by their original word. An
/// insertion is entity-related when a neighbouring original word is.
inline std::size_t count_nne_edits(const Tokens& original, const Tokens& revised,
                                   const std::vector<Entity>& entities) {
  std::vector<bool> in_entity(original.size(), false);
  for (const Entity& e : entities) {
    if (!e.span) continue;
    for (std::size_t i = e.span->begin; i < e.span->end && i < in_entity.size(); ++i) {
      in_entity[i] = true;
    }
  }
  std::size_t edits = 0;
  std::size_t next_ref = 0;  // original index following the current position
  for (const EditOp& op : align(original, revised).ops) {
    if (op.ref) {
      next_ref = *op.ref + 1;
      if (op.kind != EditKind::kMatch && !in_entity[*op.ref]) ++edits;
      continue;
    }
    const bool left = next_ref > 0 && in_entity[next_ref - 1];
    const bool right = next_ref < original.size() && in_entity[next_ref];
    if (!left && !right) ++edits;
  }
  return edits;
}

inline GuardrailCheck check_guardrail(const Tokens& original, const Tokens& revised,
                                      const std::vector<Entity>& entities,
                                      const GuardrailBudget& budget = {}) {
  GuardrailCheck check;
  if (original.empty()) {
    check.length_ratio = revised.empty() ? 1.0 : std::numeric_limits<double>::infinity();
  } else {
    check.length_ratio = static_cast<double>(revised.size()) / static_cast<double>(original.size());
  }
  check.nne_edits = count_nne_edits(original, revised, entities);
  check.accepted =
      check.length_ratio <= budget.max_length_ratio && check.nne_edits <= budget.max_nne_edits;
  return check;
}

inline RevisionStatus guardrail(const Tokens& original, const Tokens& revised,
                                const std::vector<Entity>& entities,
                                const GuardrailBudget& budget = {}) {
  return check_guardrail(original, revised, entities, budget).accepted
             ? RevisionStatus::kRevised
             : RevisionStatus::kRejectedGuardrail;
}

}  // namespace ne_revise
