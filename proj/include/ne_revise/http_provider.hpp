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

// Requires cpp-httplib; link the ne_revise_http target for https support.

#include <cstdlib>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "ne_revise/error.hpp"
#include "ne_revise/provider.hpp"

namespace ne_revise {

inline constexpr const char* kApiKeyVariable = "NE_REVISE_API_KEY";

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // starts with '/'
};

inline Endpoint split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("endpoint needs a scheme: '" + url + "'");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

/// Chat-completion request body: one user message, no system prompt.
inline nlohmann::ordered_json chat_request_body(const ProviderConfig& config, const std::string& prompt) {
  nlohmann::ordered_json body;
  body["model"] = config.model;
  body["messages"] = nlohmann::ordered_json::array(
      {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = config.temperature;
  body["max_tokens"] = config.max_output_tokens;
  return body;
}

// Pulls choices[0].message.content out of a response body.
inline std::string chat_response_text(const std::string& body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ProviderUnavailable("response is not JSON");
  const auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) {
    throw ProviderUnavailable("response has no choices");
  }
  const auto& message = (*choices)[0].value("message", nlohmann::json::object());
  const auto content = message.find("content");
  if (content == message.end() || !content->is_string()) {
    throw ProviderUnavailable("response choice has no text content");
  }
  return content->get<std::string>();
}

/// Provider talking to an OpenAI-style /chat/completions endpoint. The
/// bearer token comes from NE_REVISE_API_KEY when set.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(ProviderConfig config) : config_(std::move(config)) {
    config_.validate();
    endpoint_ = split_endpoint(config_.endpoint);
    if (const char* key = std::getenv(kApiKeyVariable); key && *key) api_key_ = key;
  }

  std::string complete(const CompletionRequest& request) override {
    httplib::Client client(endpoint_.base);
    const auto seconds = std::chrono::duration<double>(config_.timeout_seconds);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(seconds);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    const std::string body = chat_request_body(config_, request.prompt).dump();
    auto result = client.Post(endpoint_.path, headers, body, "application/json");
    if (!result) {
      throw ProviderUnavailable("request to " + endpoint_.base + " failed: " +
                                httplib::to_string(result.error()));
    }
    if (result->status != 200) {
      throw ProviderUnavailable("endpoint returned HTTP " + std::to_string(result->status));
    }
    return chat_response_text(result->body);
  }

  std::string model() const override { return config_.model; }

 private:
  ProviderConfig config_;
  Endpoint endpoint_;
  std::string api_key_;
};

}  // namespace ne_revise
