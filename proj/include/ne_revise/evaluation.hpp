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
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <json.hpp>

#include "ne_revise/alignment.hpp"
#include "ne_revise/entity.hpp"
#include "ne_revise/error.hpp"
#include "ne_revise/result.hpp"
#include "ne_revise/text.hpp"

namespace ne_revise {

struct ErrorCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;

  std::size_t total() const { return substitutions + deletions + insertions; }

  ErrorCounts& operator+=(const ErrorCounts& o) {
    substitutions += o.substitutions;
    deletions += o.deletions;
    insertions += o.insertions;
    return *this;
  }
  friend bool operator==(const ErrorCounts&, const ErrorCounts&) = default;
};

// Undefined ratios stay absent rather than collapsing to 0 or NaN.
inline std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

/// Word errors split by the tag of the reference word involved.
///
/// Insertions have no reference word and are all booked to NNE; the NNE
/// insertion count is kept separately so other attributions can be
/// recomputed from the report.
struct WerReport {
  std::size_t ne_ref_words = 0;
  std::size_t nne_ref_words = 0;
  ErrorCounts ne;
  ErrorCounts nne;

  std::size_t ne_errors() const { return ne.total(); }
  std::size_t nne_errors() const { return nne.total(); }
  std::size_t ref_words() const { return ne_ref_words + nne_ref_words; }

  std::optional<double> ne_wer() const { return ratio(ne_errors(), ne_ref_words); }
  std::optional<double> nne_wer() const { return ratio(nne_errors(), nne_ref_words); }
  std::optional<double> overall_wer() const { return ratio(ne_errors() + nne_errors(), ref_words()); }

  // Micro-averaging: pool counts, then divide.
  WerReport& operator+=(const WerReport& o) {
    ne_ref_words += o.ne_ref_words;
    nne_ref_words += o.nne_ref_words;
    ne += o.ne;
    nne += o.nne;
    return *this;
  }
  friend bool operator==(const WerReport&, const WerReport&) = default;
};

inline WerReport tagged_wer(const Tokens& ref, const std::vector<bool>& ne_mask, const Tokens& hyp) {
  if (ne_mask.size() != ref.size()) {
    throw MaskLengthMismatch("mask has " + std::to_string(ne_mask.size()) + " flags for " +
                             std::to_string(ref.size()) + " reference tokens");
  }
  WerReport report;
  for (bool tagged : ne_mask) ++(tagged ? report.ne_ref_words : report.nne_ref_words);
  for (const EditOp& op : align(ref, hyp).ops) {
    switch (op.kind) {
      case EditKind::kMatch:
        break;
      case EditKind::kSubstitute:
        ++(ne_mask[*op.ref] ? report.ne : report.nne).substitutions;
        break;
      case EditKind::kDelete:
        ++(ne_mask[*op.ref] ? report.ne : report.nne).deletions;
        break;
      case EditKind::kInsert:
        ++report.nne.insertions;
        break;
    }
  }
  return report;
}

using EntityKey = std::pair<std::string, EntityType>;

inline std::optional<double> entity_set_recall(const std::set<EntityKey>& gold,
                                               const std::set<EntityKey>& predicted) {
  std::size_t hits = 0;
  for (const EntityKey& g : gold) hits += predicted.count(g);
  return ratio(hits, gold.size());
}

inline std::set<EntityKey> entity_keys(const std::vector<Entity>& entities) {
  std::set<EntityKey> keys;
  for (const Entity& e : entities) {
    if (!e.tokens.empty()) keys.emplace(e.surface, e.type);
  }
  return keys;
}

struct WelchResult {
  double t = 0.0;                 // +-infinity when both samples have zero variance
  std::optional<double> df;       // absent in the zero-variance case
  double p = 1.0;                 // two-sided
  bool zero_variance = false;
};

/// Welch's unequal-variance two-sample t-test, two-sided.
inline WelchResult length_significance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InsufficientSamples("each sample needs at least 2 values (got " +
                              std::to_string(a.size()) + " and " + std::to_string(b.size()) + ")");
  }
  const auto moments = [](const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair{mean, ss / static_cast<double>(xs.size() - 1)};
  };
  const auto [mean_a, var_a] = moments(a);
  const auto [mean_b, var_b] = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = var_a / na;
  const double sb = var_b / nb;

  WelchResult r;
  if (sa + sb == 0.0) {
    r.zero_variance = true;
    if (mean_a == mean_b) return r;
    r.t = mean_a > mean_b ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.t = (mean_a - mean_b) / std::sqrt(sa + sb);
  const double df = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  r.df = df;
  const boost::math::students_t dist(df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  return r;
}

inline std::vector<double> word_counts(const std::vector<std::string>& texts) {
  std::vector<double> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(static_cast<double>(normalize_text(t).size()));
  return out;
}

// One row of the corpus table: a mode's results scored against references.
struct ModeReport {
  RevisionMode mode = RevisionMode::kNone;
  std::string llm = "-";
  std::size_t utterances = 0;
  WerReport before;
  WerReport after;
  std::map<RevisionStatus, std::size_t> statuses;
  std::optional<double> recall_before;
  std::optional<double> recall_after;
};

struct CorpusReport {
  std::vector<ModeReport> rows;  // first-appearance order of modes
};

/// Scores revision results against the corpus references, one row per mode.
///
/// `llm_labels` fills the LLM/mode column; modes without a label show "-".
inline CorpusReport corpus_report(const std::vector<RevisionResult>& results,
                                  const std::vector<Utterance>& corpus,
                                  const std::map<RevisionMode, std::string>& llm_labels = {}) {
  std::unordered_map<std::string, const Utterance*> by_id;
  for (const Utterance& u : corpus) by_id.emplace(u.id, &u);

  CorpusReport report;
  std::map<RevisionMode, std::size_t> row_of;
  std::map<RevisionMode, std::pair<std::vector<Entity>, std::vector<Entity>>> predicted;
  std::vector<Entity> gold;

  for (const RevisionResult& r : results) {
    auto it = by_id.find(r.utterance_id);
    if (it == by_id.end()) throw MissingReference(r.utterance_id, "utterance not in corpus");
    const Utterance& u = *it->second;
    if (!u.reference) throw MissingReference(u.id, "utterance has no reference");

    auto [slot, added] = row_of.try_emplace(r.mode, report.rows.size());
    if (added) {
      ModeReport row;
      row.mode = r.mode;
      if (auto label = llm_labels.find(r.mode); label != llm_labels.end()) row.llm = label->second;
      report.rows.push_back(std::move(row));
    }
    ModeReport& row = report.rows[slot->second];
    const std::vector<bool> mask = u.reference_ne_mask();
    const Tokens revised = normalize_text(r.revised);
    row.utterances += 1;
    row.before += tagged_wer(*u.reference, mask, u.hypothesis);
    row.after += tagged_wer(*u.reference, mask, revised);
    row.statuses[r.status] += 1;

    auto& [ents_before, ents_after] = predicted[r.mode];
    ents_before.insert(ents_before.end(), u.entities.begin(), u.entities.end());
    const auto projected = project_entities(u.hypothesis, revised, u.entities);
    ents_after.insert(ents_after.end(), projected.begin(), projected.end());
  }

  // Gold set: reference entities of every utterance scored by any mode.
  std::set<std::string> scored;
  for (const RevisionResult& r : results) scored.insert(r.utterance_id);
  for (const Utterance& u : corpus) {
    if (scored.count(u.id)) gold.insert(gold.end(), u.reference_entities.begin(), u.reference_entities.end());
  }
  const std::set<EntityKey> gold_keys = entity_keys(gold);
  for (ModeReport& row : report.rows) {
    const auto& [ents_before, ents_after] = predicted[row.mode];
    row.recall_before = entity_set_recall(gold_keys, entity_keys(ents_before));
    row.recall_after = entity_set_recall(gold_keys, entity_keys(ents_after));
  }
  return report;
}

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

inline nlohmann::ordered_json to_json(const ErrorCounts& c) {
  return nlohmann::ordered_json{{"substitutions", c.substitutions},
                                {"deletions", c.deletions},
                                {"insertions", c.insertions}};
}

inline nlohmann::ordered_json to_json(const WerReport& w) {
  nlohmann::ordered_json j;
  j["ne_ref_words"] = w.ne_ref_words;
  j["nne_ref_words"] = w.nne_ref_words;
  j["ne_errors"] = to_json(w.ne);
  j["nne_errors"] = to_json(w.nne);
  j["ne_wer"] = optional_json(w.ne_wer());
  j["nne_wer"] = optional_json(w.nne_wer());
  j["overall_wer"] = optional_json(w.overall_wer());
  return j;
}

inline std::optional<double> delta(const std::optional<double>& after,
                                   const std::optional<double>& before) {
  if (!after || !before) return std::nullopt;
  return *after - *before;
}

inline nlohmann::ordered_json to_json(const CorpusReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const ModeReport& row : report.rows) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(row.mode);
    j["llm"] = row.llm;
    j["utterances"] = row.utterances;
    j["before"] = to_json(row.before);
    j["after"] = to_json(row.after);
    j["delta"] = {{"ne_wer", optional_json(delta(row.after.ne_wer(), row.before.ne_wer()))},
                  {"nne_wer", optional_json(delta(row.after.nne_wer(), row.before.nne_wer()))},
                  {"overall_wer",
                   optional_json(delta(row.after.overall_wer(), row.before.overall_wer()))}};
    nlohmann::ordered_json statuses;
    for (RevisionStatus s : kAllRevisionStatuses) {
      auto it = row.statuses.find(s);
      statuses[std::string(to_string(s))] = it == row.statuses.end() ? 0 : it->second;
    }
    j["statuses"] = std::move(statuses);
    j["entity_recall"] = {{"before", optional_json(row.recall_before)},
                          {"after", optional_json(row.recall_after)}};
    rows.push_back(std::move(j));
  }
  return nlohmann::ordered_json{{"schema_version", 1}, {"rows", std::move(rows)}};
}

inline std::string format_percent(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *v * 100.0);
  return buf;
}

/// Plain-text table in the layout Method | LLM/mode | NE | NNE (percent).
///
/// The first line after the header is the unrevised ASR output; each mode
/// then gets one row with its post-revision error rates.
inline std::string render_table(const CorpusReport& report) {
  std::vector<std::array<std::string, 4>> lines;
  lines.push_back({"Method", "LLM/mode", "NE", "NNE"});
  std::optional<WerReport> shown_before;
  for (const ModeReport& row : report.rows) {
    if (!shown_before || !(*shown_before == row.before)) {
      lines.push_back({"ASR (no revision)", "-", format_percent(row.before.ne_wer()),
                       format_percent(row.before.nne_wer())});
      shown_before = row.before;
    }
    lines.push_back({std::string(to_string(row.mode)), row.llm, format_percent(row.after.ne_wer()),
                     format_percent(row.after.nne_wer())});
  }
  std::array<std::size_t, 4> width{};
  for (const auto& l : lines) {
    for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], l[c].size());
  }
  std::ostringstream out;
  for (const auto& l : lines) {
    out << l[0] << std::string(width[0] - l[0].size() + 2, ' ');
    out << l[1] << std::string(width[1] - l[1].size() + 2, ' ');
    out << std::string(width[2] - l[2].size(), ' ') << l[2] << "  ";
    out << std::string(width[3] - l[3].size(), ' ') << l[3] << '\n';
  }
  return out.str();
}

}  // namespace ne_revise
