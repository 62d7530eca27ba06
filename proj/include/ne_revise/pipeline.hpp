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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ne_revise/context_index.hpp"
#include "ne_revise/entity.hpp"
#include "ne_revise/error.hpp"
#include "ne_revise/evaluation.hpp"
#include "ne_revise/http_provider.hpp"
#include "ne_revise/interchange.hpp"
#include "ne_revise/provider.hpp"
#include "ne_revise/result.hpp"
#include "ne_revise/revision.hpp"

namespace ne_revise {

inline constexpr const char* kToolVersion = "0.1.0";

enum class ProviderKind { kScripted, kHttp };

struct RunConfig {
  std::vector<std::string> corpus;
  std::vector<std::string> context;
  RevisionMode mode = RevisionMode::kNone;
  PromptVariant prompt_variant = PromptVariant::kFull;
  double asr_confidence_threshold = 0.85;
  GuardrailBudget guardrail;
  FilterOptions filter;
  PhoneticOptions phonetic;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::string cache_dir;
  std::string out_dir = "out";
  ProviderKind provider_kind = ProviderKind::kScripted;
  ProviderConfig provider;

  /// Checks ranges, mode requirements, and that every input path exists.
  void validate() const {
    if (corpus.empty()) throw ConfigError("config needs at least one corpus file");
    for (const auto* paths : {&corpus, &context}) {
      for (const std::string& p : *paths) {
        if (!std::filesystem::exists(p)) throw ConfigError("input file not found: " + p);
      }
    }
    if (!(asr_confidence_threshold >= 0.0 && asr_confidence_threshold <= 1.0)) {
      throw ConfigError("asr_confidence_threshold must lie in [0, 1]");
    }
    if (mode == RevisionMode::kPhoneticRandom && !seed) {
      throw ConfigError("mode phonetic_random requires a seed");
    }
    if (!(guardrail.max_length_ratio > 0.0)) throw ConfigError("guardrail.max_length_ratio must be > 0");
    if (phonetic.max_code_length == 0) throw ConfigError("max_code_length must be > 0");
    if (workers == 0) throw ConfigError("workers must be >= 1");
    if (out_dir.empty()) throw ConfigError("out_dir must not be empty");
    if (uses_provider(mode)) {
      provider.validate();
      if (provider_kind == ProviderKind::kScripted) {
        if (provider.script.empty()) throw ConfigError("scripted provider needs provider.script");
        if (!std::filesystem::exists(provider.script)) {
          throw ConfigError("provider script not found: " + provider.script);
        }
      }
    }
  }
};

namespace detail {

inline std::string resolve_path(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal().string();
}

inline void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& known,
                                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
T config_value(const nlohmann::json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

inline std::vector<std::string> config_paths(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return {};
  if (it->is_string()) return {it->get<std::string>()};
  if (it->is_array() && std::all_of(it->begin(), it->end(), [](const auto& v) { return v.is_string(); })) {
    return it->get<std::vector<std::string>>();
  }
  throw ConfigError(std::string("config key '") + key + "' must be a path or a list of paths");
}

inline std::size_t config_count(const nlohmann::json& obj, const char* key, std::size_t fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

}  // namespace detail

/// Parses a JSON config. Relative paths resolve against `base_dir`
/// (normally the directory holding the config file).
inline RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  using detail::config_value;
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  detail::reject_unknown_keys(
      j,
      {"corpus", "context", "mode", "prompt_variant", "asr_confidence_threshold", "guardrail",
       "max_matches_per_entity", "match_mode", "max_code_length", "seed", "workers", "cache_dir",
       "out_dir", "provider"},
      "config");

  RunConfig c;
  for (const std::string& p : detail::config_paths(j, "corpus")) c.corpus.push_back(detail::resolve_path(base_dir, p));
  for (const std::string& p : detail::config_paths(j, "context")) c.context.push_back(detail::resolve_path(base_dir, p));

  const std::string mode = config_value<std::string>(j, "mode", "none");
  auto parsed_mode = parse_revision_mode(mode);
  if (!parsed_mode) throw ConfigError("unknown mode '" + mode + "'");
  c.mode = *parsed_mode;

  const std::string variant = config_value<std::string>(j, "prompt_variant", "full");
  auto parsed_variant = parse_prompt_variant(variant);
  if (!parsed_variant) throw ConfigError("prompt_variant must be 'full' or 'short'");
  c.prompt_variant = *parsed_variant;

  c.asr_confidence_threshold = config_value<double>(j, "asr_confidence_threshold", 0.85);
  if (auto g = j.find("guardrail"); g != j.end()) {
    if (!g->is_object()) throw ConfigError("guardrail must be an object");
    detail::reject_unknown_keys(*g, {"max_length_ratio", "max_nne_edits"}, "guardrail");
    c.guardrail.max_length_ratio = config_value<double>(*g, "max_length_ratio", 1.5);
    c.guardrail.max_nne_edits = detail::config_count(*g, "max_nne_edits", 2);
  }
  c.filter.max_matches_per_entity = detail::config_count(j, "max_matches_per_entity", 5);
  const std::string match_mode = config_value<std::string>(j, "match_mode", "any_token");
  if (match_mode == "any_token") {
    c.filter.match_mode = MatchMode::kAnyToken;
  } else if (match_mode == "concatenated") {
    c.filter.match_mode = MatchMode::kConcatenated;
  } else {
    throw ConfigError("match_mode must be 'any_token' or 'concatenated'");
  }
  c.phonetic.max_code_length = detail::config_count(j, "max_code_length", 4);
  if (j.contains("seed")) c.seed = detail::config_count(j, "seed", 0);
  c.workers = detail::config_count(j, "workers", 1);
  c.cache_dir = detail::resolve_path(base_dir, config_value<std::string>(j, "cache_dir", ""));
  c.out_dir = detail::resolve_path(base_dir, config_value<std::string>(j, "out_dir", "out"));

  if (auto p = j.find("provider"); p != j.end()) {
    if (!p->is_object()) throw ConfigError("provider must be an object");
    detail::reject_unknown_keys(*p,
                                {"kind", "script", "endpoint", "model", "temperature", "max_output_tokens",
                                 "timeout_seconds", "retries", "backoff_seconds", "requests_per_second"},
                                "provider");
    const std::string kind = config_value<std::string>(*p, "kind", "scripted");
    if (kind == "scripted") {
      c.provider_kind = ProviderKind::kScripted;
    } else if (kind == "http") {
      c.provider_kind = ProviderKind::kHttp;
    } else {
      throw ConfigError("provider.kind must be 'scripted' or 'http'");
    }
    ProviderConfig& pc = c.provider;
    pc.script = detail::resolve_path(base_dir, config_value<std::string>(*p, "script", ""));
    pc.endpoint = config_value<std::string>(*p, "endpoint", pc.endpoint);
    pc.model = config_value<std::string>(*p, "model", kind == "scripted" ? "scripted" : pc.model);
    pc.temperature = config_value<double>(*p, "temperature", pc.temperature);
    pc.max_output_tokens = config_value<int>(*p, "max_output_tokens", pc.max_output_tokens);
    pc.timeout_seconds = config_value<double>(*p, "timeout_seconds", pc.timeout_seconds);
    pc.retries = config_value<int>(*p, "retries", pc.retries);
    pc.backoff_seconds = config_value<double>(*p, "backoff_seconds", pc.backoff_seconds);
    pc.requests_per_second = config_value<double>(*p, "requests_per_second", pc.requests_per_second);
  } else {
    c.provider.model = "scripted";
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config '" + path + "' is not valid JSON");
  return parse_config(j, std::filesystem::absolute(path).parent_path());
}

// Canonical form, used for the manifest hash.
inline nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["corpus"] = c.corpus;
  j["context"] = c.context;
  j["mode"] = to_string(c.mode);
  j["prompt_variant"] = to_string(c.prompt_variant);
  j["asr_confidence_threshold"] = c.asr_confidence_threshold;
  j["guardrail"] = {{"max_length_ratio", c.guardrail.max_length_ratio},
                    {"max_nne_edits", c.guardrail.max_nne_edits}};
  j["max_matches_per_entity"] = c.filter.max_matches_per_entity;
  j["match_mode"] = c.filter.match_mode == MatchMode::kAnyToken ? "any_token" : "concatenated";
  j["max_code_length"] = c.phonetic.max_code_length;
  j["seed"] = c.seed ? nlohmann::ordered_json(*c.seed) : nlohmann::ordered_json(nullptr);
  j["workers"] = c.workers;
  j["cache_dir"] = c.cache_dir;
  j["out_dir"] = c.out_dir;
  j["provider"] = {{"kind", c.provider_kind == ProviderKind::kScripted ? "scripted" : "http"},
                   {"script", c.provider.script},
                   {"endpoint", c.provider.endpoint},
                   {"model", c.provider.model},
                   {"temperature", c.provider.temperature},
                   {"max_output_tokens", c.provider.max_output_tokens},
                   {"timeout_seconds", c.provider.timeout_seconds},
                   {"retries", c.provider.retries},
                   {"backoff_seconds", c.provider.backoff_seconds},
                   {"requests_per_second", c.provider.requests_per_second}};
  return j;
}

// Re-raises a module error with the stage name prefixed, keeping the
// category the CLI maps to an exit code.
template <typename F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ProviderUnavailable& e) {
    throw ProviderUnavailable(std::string("stage ") + stage + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("stage ") + stage + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct LoadedCorpus {
  std::vector<Utterance> utterances;
  std::vector<ContextDocument> documents;
  std::string corpus_sha256;  // over input file contents, in config order
};

inline LoadedCorpus load_corpus(const RunConfig& config) {
  LoadedCorpus out;
  std::string digests;
  std::set<std::string> ids;
  run_stage("ingest", [&] {
    for (const std::string& path : config.corpus) {
      for (Utterance& u : ingest_utterances(path)) {
        if (!ids.insert(u.id).second) throw SchemaError(u.id, "duplicate utterance id across corpus files");
        out.utterances.push_back(std::move(u));
      }
      digests += sha256_hex(read_file(path)) + "\n";
    }
    std::set<std::string> doc_ids;
    for (const std::string& path : config.context) {
      for (ContextDocument& d : ingest_contexts(path)) {
        if (!doc_ids.insert(d.id).second) throw SchemaError(d.id, "duplicate context id across files");
        out.documents.push_back(std::move(d));
      }
      digests += sha256_hex(read_file(path)) + "\n";
    }
  });
  out.corpus_sha256 = sha256_hex(digests);
  return out;
}

inline std::shared_ptr<Provider> make_transport(const RunConfig& config) {
  if (config.provider_kind == ProviderKind::kScripted) {
    return ScriptedProvider::from_file(config.provider.script, config.provider.model);
  }
  return std::make_shared<HttpProvider>(config.provider);
}

struct RunArtifacts {
  std::vector<RevisionResult> results;  // corpus order
  std::vector<std::pair<std::string, FilteredContext>> filtered;  // per utterance
  std::vector<nlohmann::ordered_json> summaries;
  std::optional<CorpusReport> report;
  std::size_t provider_failures = 0;
};

/// Index, filter, revise, and (when every utterance has a reference)
/// evaluate. Writes nothing.
inline RunArtifacts execute(const RunConfig& config, const LoadedCorpus& corpus, Provider* provider) {
  RunArtifacts out;
  std::unordered_map<std::string, const ContextDocument*> docs;
  std::unordered_map<std::string, ContextIndex> indexes;
  run_stage("index", [&] {
    for (const ContextDocument& d : corpus.documents) {
      docs.emplace(d.id, &d);
      indexes.emplace(d.id, build_index(d, config.phonetic));
    }
    for (const Utterance& u : corpus.utterances) {
      if (!docs.count(u.context_doc_id)) {
        throw SchemaError(u.id, "unknown context_doc_id '" + u.context_doc_id + "'");
      }
    }
  });

  // The random control draws from every similar candidate; the cap only
  // bounds prompt length.
  FilterOptions filter = config.filter;
  if (config.mode == RevisionMode::kPhoneticRandom) filter.max_matches_per_entity = 0;
  run_stage("filter", [&] {
    for (const Utterance& u : corpus.utterances) {
      out.filtered.emplace_back(u.id, filter_context(indexes.at(u.context_doc_id), u.entities, filter));
    }
  });

  std::map<std::string, std::string> summary_text;
  std::map<std::string, std::string> summary_failure;
  if (config.mode == RevisionMode::kContextSummary) {
    std::vector<const ContextDocument*> wanted;
    std::set<std::string> seen;
    for (const Utterance& u : corpus.utterances) {
      if (!u.entities.empty() && seen.insert(u.context_doc_id).second) wanted.push_back(docs.at(u.context_doc_id));
    }
    std::sort(wanted.begin(), wanted.end(),
              [](const ContextDocument* a, const ContextDocument* b) { return a->id < b->id; });
    auto texts = parallel_map(wanted.size(), config.workers, [&](std::size_t i) {
      try {
        return std::pair<bool, std::string>{true, summarize_context(*wanted[i], *provider)};
      } catch (const ProviderUnavailable& e) {
        return std::pair<bool, std::string>{false, e.what()};
      }
    });
    for (std::size_t i = 0; i < wanted.size(); ++i) {
      nlohmann::ordered_json s;
      s["doc_id"] = wanted[i]->id;
      if (texts[i].first) {
        summary_text[wanted[i]->id] = texts[i].second;
        s["summary"] = texts[i].second;
      } else {
        summary_failure[wanted[i]->id] = texts[i].second;
        s["summary"] = nullptr;
        s["error"] = texts[i].second;
      }
      out.summaries.push_back(std::move(s));
    }
  }

  RevisionOptions options;
  options.asr_confidence_threshold = config.asr_confidence_threshold;
  options.variant = config.prompt_variant;
  options.guardrail = config.guardrail;
  options.seed = config.seed.value_or(0);

  out.results = run_stage("revise", [&] {
    return parallel_map(corpus.utterances.size(), config.workers, [&](std::size_t i) {
      const Utterance& u = corpus.utterances[i];
      RevisionContext ctx;
      ctx.filtered = &out.filtered[i].second;
      ctx.document = docs.at(u.context_doc_id);
      if (config.mode == RevisionMode::kContextSummary && !u.entities.empty()) {
        if (auto f = summary_failure.find(u.context_doc_id); f != summary_failure.end()) {
          RevisionResult r = revise_utterance(u, ctx, RevisionMode::kNone, nullptr, options);
          r.mode = config.mode;
          r.status = RevisionStatus::kFallbackFormatError;
          r.raw_response = std::string(kProviderFailurePrefix) + f->second;
          return r;
        }
      }
      auto s = summary_text.find(u.context_doc_id);
      static const std::string kEmpty;
      ctx.summary = s == summary_text.end() ? &kEmpty : &s->second;
      return revise_utterance(u, ctx, config.mode, provider, options);
    });
  });
  for (const RevisionResult& r : out.results) out.provider_failures += provider_failed(r) ? 1 : 0;

  const bool all_referenced = std::all_of(corpus.utterances.begin(), corpus.utterances.end(),
                                          [](const Utterance& u) { return u.reference.has_value(); });
  if (all_referenced && !corpus.utterances.empty()) {
    std::map<RevisionMode, std::string> labels;
    if (uses_provider(config.mode) && provider) labels[config.mode] = provider->model();
    out.report = run_stage("evaluate", [&] { return corpus_report(out.results, corpus.utterances, labels); });
  }
  return out;
}

inline nlohmann::ordered_json filtered_json(const std::string& utterance_id, const FilteredContext& f) {
  nlohmann::ordered_json j;
  j["utterance_id"] = utterance_id;
  auto matches = nlohmann::ordered_json::array();
  for (const ContextMatch& m : f.matches) {
    matches.push_back({{"context_entity", m.context_entity.surface},
                       {"type", to_string(m.context_entity.type)},
                       {"sentences", m.sentences},
                       {"predicted_entity", m.predicted.surface},
                       {"predicted_index", m.predicted_index}});
  }
  j["matches"] = std::move(matches);
  return j;
}

struct RunSummary {
  RunArtifacts artifacts;
  std::size_t provider_calls = 0;
  std::size_t cache_hits = 0;
  std::filesystem::path out_dir;
  std::vector<std::string> files;  // written, relative to out_dir
};

/// Full run: ingest through evaluation, then writes every stage's output
/// and a manifest to config.out_dir. `transport` overrides the configured
/// provider (tests pass fakes here).
inline RunSummary run_pipeline(RunConfig config, std::shared_ptr<Provider> transport = nullptr) {
  config.provider.cache_dir = config.cache_dir;
  config.validate();
  const LoadedCorpus corpus = load_corpus(config);

  ProviderStack stack;
  if (uses_provider(config.mode)) {
    if (!transport) transport = make_transport(config);
    stack = wrap_provider(transport, config.provider);
  }

  RunSummary summary;
  summary.artifacts = execute(config, corpus, stack.top.get());
  summary.provider_calls = stack.counter ? stack.counter->calls() : 0;
  summary.cache_hits = stack.cache ? stack.cache->hits() : 0;
  summary.out_dir = config.out_dir;

  std::filesystem::create_directories(summary.out_dir);
  nlohmann::ordered_json hashes = nlohmann::ordered_json::object();
  const auto emit = [&](const std::string& name, const std::string& content) {
    const auto path = summary.out_dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error("cannot write " + path.string());
    hashes[name] = sha256_hex(content);
    summary.files.push_back(name);
  };
  const auto jsonl = [](const auto& records) {
    std::string s;
    for (const auto& r : records) s += r.dump() + "\n";
    return s;
  };

  const RunArtifacts& a = summary.artifacts;
  std::vector<nlohmann::ordered_json> revisions;
  for (const RevisionResult& r : a.results) revisions.push_back(to_json(r));
  emit("revisions.jsonl", jsonl(revisions));
  std::vector<nlohmann::ordered_json> filtered;
  for (const auto& [id, f] : a.filtered) filtered.push_back(filtered_json(id, f));
  emit("filtered_context.jsonl", jsonl(filtered));
  if (config.mode == RevisionMode::kContextSummary) emit("summaries.jsonl", jsonl(a.summaries));
  if (a.report) {
    emit("report.json", to_json(*a.report).dump(2) + "\n");
    emit("report.txt", render_table(*a.report));
  }

  nlohmann::ordered_json manifest;
  manifest["schema_version"] = 1;
  manifest["tool_version"] = kToolVersion;
  manifest["config_sha256"] = sha256_hex(to_json(config).dump());
  manifest["corpus_sha256"] = corpus.corpus_sha256;
  manifest["mode"] = to_string(config.mode);
  manifest["model"] = uses_provider(config.mode) ? config.provider.model : "-";
  manifest["utterances"] = corpus.utterances.size();
  manifest["provider_calls"] = summary.provider_calls;
  manifest["provider_failures"] = a.provider_failures;
  manifest["evaluated"] = a.report.has_value();
  manifest["files"] = hashes;
  const auto path = summary.out_dir / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
  return summary;
}

struct TunePoint {
  double threshold = 0.0;
  std::optional<double> ne_wer;
  std::optional<double> nne_wer;
};

struct TuneResult {
  std::vector<TunePoint> points;  // grid order
  double best = 0.0;
};

/// Grid search for the confidence threshold minimizing corpus NE WER.
/// Ties go to the higher threshold, which sends fewer entities to review.
inline TuneResult tune_threshold(RunConfig config, std::vector<double> grid,
                                 std::shared_ptr<Provider> transport = nullptr) {
  if (grid.empty()) throw ConfigError("threshold grid is empty");
  for (double t : grid) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("grid thresholds must lie in [0, 1]");
  }
  config.provider.cache_dir = config.cache_dir;
  config.validate();
  const LoadedCorpus corpus = load_corpus(config);
  for (const Utterance& u : corpus.utterances) {
    if (!u.reference) throw MissingReference(u.id, "tune-threshold needs references");
  }
  ProviderStack stack;
  if (uses_provider(config.mode)) {
    if (!transport) transport = make_transport(config);
    stack = wrap_provider(transport, config.provider);
  }

  TuneResult out;
  std::optional<double> best_wer;
  bool have_best = false;
  for (double t : grid) {
    config.asr_confidence_threshold = t;
    const RunArtifacts a = execute(config, corpus, stack.top.get());
    TunePoint p{t, std::nullopt, std::nullopt};
    if (a.report && !a.report->rows.empty()) {
      p.ne_wer = a.report->rows.front().after.ne_wer();
      p.nne_wer = a.report->rows.front().after.nne_wer();
    }
    out.points.push_back(p);
    // Undefined NE WER ranks after every defined value.
    const auto better = [&] {
      if (!have_best) return true;
      if (p.ne_wer && !best_wer) return true;
      if (!p.ne_wer && best_wer) return false;
      if (p.ne_wer && best_wer && *p.ne_wer != *best_wer) return *p.ne_wer < *best_wer;
      return t > out.best;
    };
    if (better()) {
      have_best = true;
      best_wer = p.ne_wer;
      out.best = t;
    }
  }
  return out;
}

}  // namespace ne_revise
