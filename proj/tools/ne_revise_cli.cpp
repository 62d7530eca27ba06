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

// ne-revise: command line front end for the revision pipeline.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ne_revise/alignment.hpp"
#include "ne_revise/context_index.hpp"
#include "ne_revise/error.hpp"
#include "ne_revise/evaluation.hpp"
#include "ne_revise/interchange.hpp"
#include "ne_revise/phonetic.hpp"
#include "ne_revise/pipeline.hpp"
#include "ne_revise/result.hpp"
#include "ne_revise/segment.hpp"

namespace {

using namespace ne_revise;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitProvider = 2;
constexpr int kExitInternal = 3;

struct GlobalFlags {
  std::string config;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string cache_dir;
  std::string out_dir;
};

std::string absolute(const std::string& p) {
  return std::filesystem::absolute(p).lexically_normal().string();
}

RunConfig resolve_config(const GlobalFlags& g) {
  if (g.config.empty()) throw ConfigError("this command needs --config");
  RunConfig c = load_config(g.config);
  if (!g.mode.empty()) {
    auto mode = parse_revision_mode(g.mode);
    if (!mode) throw ConfigError("unknown mode '" + g.mode + "'");
    c.mode = *mode;
  }
  if (g.seed) c.seed = *g.seed;
  if (g.workers) c.workers = *g.workers;
  if (!g.cache_dir.empty()) c.cache_dir = absolute(g.cache_dir);
  if (!g.out_dir.empty()) c.out_dir = absolute(g.out_dir);
  return c;
}

std::vector<RevisionResult> read_revisions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::vector<RevisionResult> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw SchemaError(where, "not a JSON object");
    out.push_back(revision_result_from_json(j, where));
  }
  return out;
}

std::vector<Utterance> read_corpus_files(const std::vector<std::string>& paths) {
  std::vector<Utterance> out;
  for (const std::string& p : paths) {
    auto part = ingest_utterances(p);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::vector<ContextDocument> read_context_files(const std::vector<std::string>& paths) {
  std::vector<ContextDocument> out;
  for (const std::string& p : paths) {
    auto part = ingest_contexts(p);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

std::string code_string(const std::optional<PhoneticCode>& c) {
  return c ? c->primary + "/" + c->alternate : std::string("-");
}

int cmd_encode(const std::vector<std::string>& words, std::size_t max_length) {
  int status = kExitOk;
  for (const std::string& w : words) {
    try {
      const PhoneticCode code = encode(w, {max_length});
      std::cout << w << ' ' << code.primary << ' ' << code.alternate << '\n';
    } catch (const ValidationError& e) {
      std::cerr << "encode: '" << w << "': " << e.what() << '\n';
      status = kExitValidation;
    }
  }
  return status;
}

int cmd_segment(const std::string& path) {
  std::string text;
  if (path.empty() || path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    text = read_file(path);
  }
  for (const std::string& s : segment_sentences(text)) std::cout << s << '\n';
  return kExitOk;
}

int cmd_index(const std::vector<std::string>& context_paths, std::size_t max_length) {
  for (const ContextDocument& doc : read_context_files(context_paths)) {
    const ContextIndex index = build_index(doc, PhoneticOptions{max_length});
    for (const IndexEntry& e : index.entries()) {
      nlohmann::ordered_json j;
      j["doc_id"] = doc.id;
      j["entity"] = e.entity.surface;
      j["type"] = to_string(e.entity.type);
      auto codes = nlohmann::ordered_json::array();
      for (const auto& c : e.token_codes) codes.push_back(code_string(c));
      j["token_codes"] = std::move(codes);
      j["sentences"] = e.sentences;
      std::cout << j.dump() << '\n';
    }
  }
  return kExitOk;
}

int cmd_filter(const std::vector<std::string>& corpus_paths, const std::vector<std::string>& context_paths,
               const FilterOptions& options, std::size_t max_length) {
  std::unordered_map<std::string, ContextIndex> indexes;
  for (const ContextDocument& doc : read_context_files(context_paths)) {
    indexes.emplace(doc.id, build_index(doc, PhoneticOptions{max_length}));
  }
  for (const Utterance& u : read_corpus_files(corpus_paths)) {
    auto it = indexes.find(u.context_doc_id);
    if (it == indexes.end()) throw SchemaError(u.id, "unknown context_doc_id '" + u.context_doc_id + "'");
    std::cout << filtered_json(u.id, filter_context(it->second, u.entities, options)).dump() << '\n';
  }
  return kExitOk;
}

int cmd_revise(const GlobalFlags& g) {
  RunConfig config = resolve_config(g);
  config.provider.cache_dir = config.cache_dir;
  config.validate();
  const LoadedCorpus corpus = load_corpus(config);
  ProviderStack stack;
  if (uses_provider(config.mode)) stack = wrap_provider(make_transport(config), config.provider);
  const RunArtifacts a = execute(config, corpus, stack.top.get());
  for (const RevisionResult& r : a.results) std::cout << to_json(r).dump() << '\n';
  if (a.provider_failures > 0) {
    std::cerr << "revise: " << a.provider_failures << " utterance(s) hit an unavailable provider\n";
    return kExitProvider;
  }
  return kExitOk;
}

int cmd_evaluate(const std::vector<std::string>& corpus_paths, const std::string& revisions,
                 const std::string& compare) {
  const auto corpus = read_corpus_files(corpus_paths);
  const auto results = read_revisions(revisions);
  nlohmann::ordered_json out = to_json(corpus_report(results, corpus));
  if (!compare.empty()) {
    std::vector<std::string> a;
    std::vector<std::string> b;
    for (const auto& r : results) a.push_back(r.revised);
    for (const auto& r : read_revisions(compare)) b.push_back(r.revised);
    const WelchResult w = length_significance(word_counts(a), word_counts(b));
    nlohmann::ordered_json lt;
    lt["t"] = std::isinf(w.t) ? nlohmann::ordered_json(w.t > 0 ? "inf" : "-inf") : nlohmann::ordered_json(w.t);
    lt["df"] = optional_json(w.df);
    lt["p"] = w.p;
    lt["zero_variance"] = w.zero_variance;
    out["length_significance"] = std::move(lt);
  }
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int cmd_run(const GlobalFlags& g) {
  const RunSummary s = run_pipeline(resolve_config(g));
  if (s.artifacts.report) std::cout << render_table(*s.artifacts.report);
  std::cout << "wrote " << s.files.size() + 1 << " files to " << s.out_dir.string()
            << " (provider calls: " << s.provider_calls << ", cache hits: " << s.cache_hits << ")\n";
  if (s.artifacts.provider_failures > 0) {
    std::cerr << "run: " << s.artifacts.provider_failures << " utterance(s) hit an unavailable provider\n";
    return kExitProvider;
  }
  return kExitOk;
}

int cmd_tune(const GlobalFlags& g, const std::vector<double>& grid) {
  const TuneResult t = tune_threshold(resolve_config(g), grid);
  std::cout << "threshold  NE      NNE\n";
  for (const TunePoint& p : t.points) {
    std::cout << format_number(p.threshold) << std::string(11 - std::min<std::size_t>(10, format_number(p.threshold).size()), ' ')
              << format_percent(p.ne_wer) << "  " << format_percent(p.nne_wer) << '\n';
  }
  std::cout << "best " << format_number(t.best) << '\n';
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& corpus_paths, const std::vector<std::string>& revision_paths) {
  const auto corpus = read_corpus_files(corpus_paths);
  std::vector<RevisionResult> all;
  for (const std::string& p : revision_paths) {
    auto part = read_revisions(p);
    all.insert(all.end(), part.begin(), part.end());
  }
  std::cout << render_table(corpus_report(all, corpus));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ne-revise: named-entity revision of ASR transcripts"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--mode", g.mode, "none, phonetic_random, full_context, context_summary or proposed");
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--workers", g.workers, "worker threads for provider calls");
  app.add_option("--cache-dir", g.cache_dir, "response cache directory");
  app.add_option("--out-dir", g.out_dir, "output directory");

  std::vector<std::string> words;
  std::size_t max_length = 4;
  auto* encode_cmd = app.add_subcommand("encode", "print Double Metaphone codes");
  encode_cmd->add_option("words", words, "words to encode")->required();
  encode_cmd->add_option("--max-code-length", max_length, "code length cap")->check(CLI::PositiveNumber);

  std::string text_path;
  auto* segment_cmd = app.add_subcommand("segment", "split text into sentences");
  segment_cmd->add_option("file", text_path, "text file, '-' or nothing for stdin");

  std::vector<std::string> context_paths;
  std::vector<std::string> corpus_paths;
  auto* index_cmd = app.add_subcommand("index", "dump the context entity index");
  index_cmd->add_option("--context", context_paths, "context JSONL files")->required();
  index_cmd->add_option("--max-code-length", max_length)->check(CLI::PositiveNumber);

  FilterOptions filter;
  std::string match_mode = "any_token";
  auto* filter_cmd = app.add_subcommand("filter", "select similar-sounding context entities");
  filter_cmd->add_option("--corpus", corpus_paths, "utterance JSONL files")->required();
  filter_cmd->add_option("--context", context_paths, "context JSONL files")->required();
  filter_cmd->add_option("--max-matches", filter.max_matches_per_entity, "per entity, 0 = unlimited");
  filter_cmd->add_option("--match-mode", match_mode)->check(CLI::IsMember({"any_token", "concatenated"}));
  filter_cmd->add_option("--max-code-length", max_length)->check(CLI::PositiveNumber);

  auto* revise_cmd = app.add_subcommand("revise", "revise a corpus, printing results as JSONL");

  std::string revisions;
  std::string compare;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score a revisions file, JSON to stdout");
  evaluate_cmd->add_option("--corpus", corpus_paths, "utterance JSONL files")->required();
  evaluate_cmd->add_option("--revisions", revisions, "revisions JSONL")->required();
  evaluate_cmd->add_option("--compare", compare, "second revisions file for the length t-test");

  auto* run_cmd = app.add_subcommand("run", "ingest, index, filter, revise, evaluate, write outputs");

  std::vector<double> grid{0.5, 0.6, 0.7, 0.8, 0.85, 0.9, 0.95};
  auto* tune_cmd = app.add_subcommand("tune-threshold", "grid-search the confidence threshold");
  tune_cmd->add_option("--grid", grid, "thresholds")->delimiter(',');

  std::vector<std::string> revision_paths;
  auto* report_cmd = app.add_subcommand("report", "Method | LLM/mode | NE | NNE table over revision files");
  report_cmd->add_option("--corpus", corpus_paths, "utterance JSONL files")->required();
  report_cmd->add_option("--revisions", revision_paths, "one or more revisions files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*encode_cmd) return cmd_encode(words, max_length);
    if (*segment_cmd) return cmd_segment(text_path);
    if (*index_cmd) return cmd_index(context_paths, max_length);
    if (*filter_cmd) {
      filter.match_mode = match_mode == "concatenated" ? MatchMode::kConcatenated : MatchMode::kAnyToken;
      return cmd_filter(corpus_paths, context_paths, filter, max_length);
    }
    if (*revise_cmd) return cmd_revise(g);
    if (*evaluate_cmd) return cmd_evaluate(corpus_paths, revisions, compare);
    if (*run_cmd) return cmd_run(g);
    if (*tune_cmd) return cmd_tune(g, grid);
    if (*report_cmd) return cmd_report(corpus_paths, revision_paths);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ProviderUnavailable& e) {
    std::cerr << "provider unavailable: " << e.what() << '\n';
    return kExitProvider;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
