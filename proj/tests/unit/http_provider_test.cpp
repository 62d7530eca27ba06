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

#include <cstdlib>
#include <string>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "ne_revise/http_provider.hpp"

namespace ne_revise {
namespace {

// A local chat-completions endpoint for the duration of one test.
class FakeEndpoint {
 public:
  FakeEndpoint() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      last_body = req.body;
      last_auth = req.get_header_value("Authorization");
      if (status != 200) {
        res.status = status;
        res.set_content("{\"error\":\"nope\"}", "application/json");
        return;
      }
      res.set_content(reply, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  ProviderConfig config() const {
    ProviderConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    c.model = "test-model";
    c.timeout_seconds = 5;
    c.max_output_tokens = 77;
    return c;
  }

  int status = 200;
  std::string reply = R"({"choices":[{"index":0,"message":{"role":"assistant","content":"<<@ hi @>>"}}]})";
  std::string last_body;
  std::string last_auth;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpProvider, SendsChatCompletionRequest) {
  FakeEndpoint endpoint;
  ::setenv(kApiKeyVariable, "sk-test", 1);
  HttpProvider provider(endpoint.config());
  ::unsetenv(kApiKeyVariable);
  EXPECT_EQ(provider.complete({"u1", "the prompt"}), "<<@ hi @>>");
  const auto body = nlohmann::json::parse(endpoint.last_body);
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "the prompt");
  EXPECT_EQ(body["temperature"], 0.0);
  EXPECT_EQ(body["max_tokens"], 77);
  EXPECT_EQ(endpoint.last_auth, "Bearer sk-test");
}

TEST(HttpProvider, NoKeyNoAuthorizationHeader) {
  FakeEndpoint endpoint;
  ::unsetenv(kApiKeyVariable);
  HttpProvider provider(endpoint.config());
  provider.complete({"u1", "p"});
  EXPECT_EQ(endpoint.last_auth, "");
}

TEST(HttpProvider, ServerErrorsAreProviderUnavailable) {
  FakeEndpoint endpoint;
  endpoint.status = 503;
  HttpProvider provider(endpoint.config());
  EXPECT_THROW(provider.complete({"u1", "p"}), ProviderUnavailable);
}

TEST(HttpProvider, MalformedBodiesAreProviderUnavailable) {
  FakeEndpoint endpoint;
  HttpProvider provider(endpoint.config());
  for (const char* reply : {"not json", "{}", R"({"choices":[]})", R"({"choices":[{"message":{}}]})"}) {
    endpoint.reply = reply;
    EXPECT_THROW(provider.complete({"u1", "p"}), ProviderUnavailable) << reply;
  }
}

TEST(HttpProvider, UnreachableEndpointIsProviderUnavailable) {
  ProviderConfig c;
  c.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  c.timeout_seconds = 2;
  HttpProvider provider(c);
  EXPECT_THROW(provider.complete({"u1", "p"}), ProviderUnavailable);
}

TEST(HttpProvider, RetryWrapperRetriesHttpFailures) {
  FakeEndpoint endpoint;
  endpoint.status = 500;
  auto http = std::make_shared<HttpProvider>(endpoint.config());
  RetryingProvider retrying(http, 2, 0.0);
  EXPECT_THROW(retrying.complete({"u1", "p"}), ProviderUnavailable);
}

TEST(SplitEndpoint, SeparatesBaseAndPath) {
  const Endpoint e = split_endpoint("https://api.example.com:8443/v1/chat/completions");
  EXPECT_EQ(e.base, "https://api.example.com:8443");
  EXPECT_EQ(e.path, "/v1/chat/completions");
  EXPECT_EQ(split_endpoint("http://localhost").path, "/");
  EXPECT_THROW(split_endpoint("localhost/v1"), ConfigError);
}

}  // namespace
}  // namespace ne_revise
