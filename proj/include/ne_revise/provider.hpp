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
#include <chrono>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>

#include <json.hpp>
#include <openssl/evp.h>

#include "ne_revise/error.hpp"
#include "ne_revise/text.hpp"

namespace ne_revise {

struct ProviderConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  double temperature = 0.0;
  int max_output_tokens = 1024;
  double timeout_seconds = 60.0;
  int retries = 2;
  double backoff_seconds = 1.0;      // first retry delay, doubled per attempt
  double requests_per_second = 0.0;  // 0 disables rate limiting
  std::string cache_dir;             // empty disables the response cache
  std::string script;                // scripted provider: id -> response JSONL

  void validate() const {
    if (retries < 0) throw ConfigError("provider.retries must be >= 0");
    if (!(timeout_seconds > 0.0)) throw ConfigError("provider.timeout_seconds must be > 0");
    if (max_output_tokens <= 0) throw ConfigError("provider.max_output_tokens must be > 0");
    if (backoff_seconds < 0.0) throw ConfigError("provider.backoff_seconds must be >= 0");
    if (requests_per_second < 0.0) throw ConfigError("provider.requests_per_second must be >= 0");
  }
};

struct CompletionRequest {
  std::string key;  // utterance id, or "summary:<doc id>"
  std::string prompt;
};

/// A single-turn chat completion: one user message in, one text out.
/// Implementations must be callable from several threads at once.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
  virtual std::string model() const = 0;
};

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

inline std::string summary_key(std::string_view doc_id) { return "summary:" + std::string(doc_id); }

/// Offline provider that answers from a script of key -> raw response.
/// Unknown keys get an empty response, which the parser treats as a
/// format error.
class ScriptedProvider : public Provider {
 public:
  explicit ScriptedProvider(std::unordered_map<std::string, std::string> script,
                            std::string model = "scripted")
      : script_(std::move(script)), model_(std::move(model)) {}

  // JSONL records {"id": ..., "response": ...}.
  static std::unique_ptr<ScriptedProvider> from_file(const std::string& path,
                                                     std::string model = "scripted") {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open script '" + path + "'");
    std::unordered_map<std::string, std::string> script;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const std::string where = path + ":" + std::to_string(line_no);
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j["id"].is_string() ||
          !j.contains("response") || !j["response"].is_string()) {
        throw SchemaError(where, "script lines need string 'id' and 'response'");
      }
      script[j["id"].get<std::string>()] = j["response"].get<std::string>();
    }
    return std::make_unique<ScriptedProvider>(std::move(script), std::move(model));
  }

  std::string complete(const CompletionRequest& request) override {
    auto it = script_.find(request.key);
    return it == script_.end() ? std::string() : it->second;
  }
  std::string model() const override { return model_; }

 private:
  std::unordered_map<std::string, std::string> script_;
  std::string model_;
};

// Counts requests that reach the wrapped provider.
class CountingProvider : public Provider {
 public:
  explicit CountingProvider(std::shared_ptr<Provider> inner) : inner_(std::move(inner)) {}
  std::string complete(const CompletionRequest& request) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return inner_->complete(request);
  }
  std::string model() const override { return inner_->model(); }
  std::size_t calls() const { return calls_.load(std::memory_order_relaxed); }

 private:
  std::shared_ptr<Provider> inner_;
  std::atomic<std::size_t> calls_{0};
};

/// Retries ProviderUnavailable with exponential backoff: `retries` extra
/// attempts, so retries = 2 means at most 3 calls.
class RetryingProvider : public Provider {
 public:
  using Sleeper = std::function<void(std::chrono::duration<double>)>;

  RetryingProvider(std::shared_ptr<Provider> inner, int retries, double backoff_seconds,
                   Sleeper sleep = [](std::chrono::duration<double> d) { std::this_thread::sleep_for(d); })
      : inner_(std::move(inner)),
        retries_(std::max(retries, 0)),
        backoff_(backoff_seconds),
        sleep_(std::move(sleep)) {}

  std::string complete(const CompletionRequest& request) override {
    double delay = backoff_;
    for (int attempt = 0;; ++attempt) {
      try {
        return inner_->complete(request);
      } catch (const ProviderUnavailable& e) {
        if (attempt >= retries_) {
          throw ProviderUnavailable(std::string(e.what()) + " (after " + std::to_string(attempt + 1) +
                                    " attempts)");
        }
      }
      if (delay > 0.0) sleep_(std::chrono::duration<double>(delay));
      delay *= 2.0;
    }
  }
  std::string model() const override { return inner_->model(); }

 private:
  std::shared_ptr<Provider> inner_;
  int retries_;
  double backoff_;
  Sleeper sleep_;
};

/// Token bucket shared by all workers. A rate of 0 never blocks.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit RateLimiter(double per_second, double burst = 1.0)
      : rate_(per_second), burst_(std::max(burst, 1.0)), tokens_(burst_), last_(Clock::now()) {}

  void acquire() {
    if (rate_ <= 0.0) return;
    std::unique_lock lock(mutex_);
    for (;;) {
      const auto now = Clock::now();
      tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
      last_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
      lock.unlock();
      std::this_thread::sleep_for(wait);
      lock.lock();
    }
  }

 private:
  double rate_;
  double burst_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mutex_;
};

class RateLimitedProvider : public Provider {
 public:
  RateLimitedProvider(std::shared_ptr<Provider> inner, double per_second)
      : inner_(std::move(inner)), limiter_(per_second) {}
  std::string complete(const CompletionRequest& request) override {
    limiter_.acquire();
    return inner_->complete(request);
  }
  std::string model() const override { return inner_->model(); }

 private:
  std::shared_ptr<Provider> inner_;
  RateLimiter limiter_;
};

/// On-disk response cache keyed by sha256(model, prompt).
///
/// Entries live at <dir>/<first two hex digits>/<hash>.json. Writers go
/// through a unique temp file and an atomic rename, so concurrent writers
/// of the same key leave one complete entry behind. Unreadable entries
/// count as misses.
class CachingProvider : public Provider {
 public:
  CachingProvider(std::shared_ptr<Provider> inner, std::filesystem::path dir)
      : inner_(std::move(inner)), dir_(std::move(dir)) {}

  static std::string cache_key(std::string_view model, std::string_view prompt) {
    std::string material(model);
    material.push_back('\0');
    material.append(prompt);
    return sha256_hex(material);
  }

  std::filesystem::path entry_path(std::string_view prompt) const {
    const std::string key = cache_key(inner_->model(), prompt);
    return dir_ / key.substr(0, 2) / (key + ".json");
  }

  std::string complete(const CompletionRequest& request) override {
    const auto path = entry_path(request.prompt);
    if (auto cached = read(path)) {
      hits_.fetch_add(1, std::memory_order_relaxed);
      return *cached;
    }
    std::string response = inner_->complete(request);
    write(path, request.prompt, response);
    return response;
  }
  std::string model() const override { return inner_->model(); }
  std::size_t hits() const { return hits_.load(std::memory_order_relaxed); }

 private:
  std::optional<std::string> read(const std::filesystem::path& path) const {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto j = nlohmann::json::parse(buffer.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("response") || !j["response"].is_string()) {
      return std::nullopt;
    }
    return j["response"].get<std::string>();
  }

  void write(const std::filesystem::path& path, std::string_view prompt,
             const std::string& response) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create cache directory " + path.parent_path().string());
    nlohmann::ordered_json j;
    j["model"] = inner_->model();
    j["prompt_sha256"] = sha256_hex(prompt);
    j["response"] = response;
    const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
    auto tmp = path;
    tmp += ".tmp." + std::to_string(tid) + "." + std::to_string(serial_.fetch_add(1));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << j.dump(2) << '\n';
      if (!out) throw Error("cannot write cache entry " + tmp.string());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
      std::filesystem::remove(tmp, ec);
      throw Error("cannot publish cache entry " + path.string());
    }
  }

  std::shared_ptr<Provider> inner_;
  std::filesystem::path dir_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> serial_{0};
};

// The wrapper stack used by the pipeline, outermost first:
// cache -> call counter -> retry -> rate limit -> transport.
struct ProviderStack {
  std::shared_ptr<Provider> top;
  std::shared_ptr<CountingProvider> counter;
  std::shared_ptr<CachingProvider> cache;  // null when caching is off
};

inline ProviderStack wrap_provider(std::shared_ptr<Provider> transport, const ProviderConfig& config) {
  std::shared_ptr<Provider> p = std::move(transport);
  if (config.requests_per_second > 0.0) {
    p = std::make_shared<RateLimitedProvider>(p, config.requests_per_second);
  }
  p = std::make_shared<RetryingProvider>(p, config.retries, config.backoff_seconds);
  ProviderStack stack;
  stack.counter = std::make_shared<CountingProvider>(p);
  stack.top = stack.counter;
  if (!config.cache_dir.empty()) {
    stack.cache = std::make_shared<CachingProvider>(stack.top, config.cache_dir);
    stack.top = stack.cache;
  }
  return stack;
}

}  // namespace ne_revise
