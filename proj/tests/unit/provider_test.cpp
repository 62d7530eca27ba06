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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "ne_revise/provider.hpp"
#include "ne_revise/revision.hpp"
#include "support/fakes.hpp"

namespace ne_revise {
namespace {

using testing::TempDir;

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ScriptedProvider, AnswersFromScriptFile) {
  TempDir dir("script");
  const auto path = dir.path() / "script.jsonl";
  std::ofstream(path) << R"({"id":"u1","response":"<<@ hi @>>"})" << "\n\n"
                      << R"({"id":"summary:d1","response":"short"})" << "\n";
  auto p = ScriptedProvider::from_file(path.string());
  EXPECT_EQ(p->complete({"u1", "anything"}), "<<@ hi @>>");
  EXPECT_EQ(p->complete({summary_key("d1"), "x"}), "short");
  EXPECT_EQ(p->complete({"unknown", "x"}), "");
  EXPECT_EQ(p->model(), "scripted");
}

TEST(ScriptedProvider, RejectsMalformedScripts) {
  TempDir dir("script");
  const auto path = dir.path() / "bad.jsonl";
  std::ofstream(path) << R"({"id":"u1"})" << "\n";
  EXPECT_THROW(ScriptedProvider::from_file(path.string()), SchemaError);
  EXPECT_THROW(ScriptedProvider::from_file((dir.path() / "missing").string()), ValidationError);
}

TEST(RetryingProvider, GivesUpAfterRetriesPlusOneAttempts) {
  auto down = std::make_shared<testing::FailingProvider>();
  std::vector<double> sleeps;
  RetryingProvider retrying(down, 2, 0.5, [&](std::chrono::duration<double> d) { sleeps.push_back(d.count()); });
  EXPECT_THROW(retrying.complete({"k", "p"}), ProviderUnavailable);
  EXPECT_EQ(down->calls(), 3u);
  EXPECT_EQ(sleeps, (std::vector<double>{0.5, 1.0}));
}

TEST(RetryingProvider, RecoversFromTransientFailures) {
  auto flaky = std::make_shared<testing::FlakyProvider>(2, "ok");
  RetryingProvider retrying(flaky, 2, 0.0);
  EXPECT_EQ(retrying.complete({"k", "p"}), "ok");
  EXPECT_EQ(flaky->calls(), 3u);
}

TEST(RetryingProvider, ZeroRetriesMeansOneAttempt) {
  auto down = std::make_shared<testing::FailingProvider>();
  RetryingProvider retrying(down, 0, 0.0);
  EXPECT_THROW(retrying.complete({"k", "p"}), ProviderUnavailable);
  EXPECT_EQ(down->calls(), 1u);
}

TEST(CachingProvider, SecondCallIsServedFromDisk) {
  TempDir dir("cache");
  auto echo = std::make_shared<testing::EchoProvider>();
  {
    CachingProvider cache(echo, dir.path());
    const std::string prompt = "Speech recognition prediction: hello seitz\n";
    const std::string first = cache.complete({"u1", prompt});
    EXPECT_EQ(cache.complete({"u1", prompt}), first);
    EXPECT_EQ(echo->calls(), 1u);
    EXPECT_EQ(cache.hits(), 1u);
    EXPECT_TRUE(std::filesystem::exists(cache.entry_path(prompt)));
  }
  // A fresh instance over the same directory is warm.
  CachingProvider again(echo, dir.path());
  again.complete({"other-key", "Speech recognition prediction: hello seitz\n"});
  EXPECT_EQ(echo->calls(), 1u);
}

TEST(CachingProvider, KeyDependsOnModelAndPrompt) {
  EXPECT_NE(CachingProvider::cache_key("m1", "p"), CachingProvider::cache_key("m2", "p"));
  EXPECT_NE(CachingProvider::cache_key("m", "p1"), CachingProvider::cache_key("m", "p2"));
  EXPECT_NE(CachingProvider::cache_key("ab", "c"), CachingProvider::cache_key("a", "bc"));
}

TEST(CachingProvider, CorruptEntryIsAMiss) {
  TempDir dir("cache");
  auto echo = std::make_shared<testing::EchoProvider>();
  CachingProvider cache(echo, dir.path());
  const auto path = cache.entry_path("p");
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path) << "{truncated";
  cache.complete({"k", "p"});
  EXPECT_EQ(echo->calls(), 1u);
  cache.complete({"k", "p"});
  EXPECT_EQ(echo->calls(), 1u);
}

TEST(CachingProvider, ConcurrentWritersLeaveOneValidEntry) {
  TempDir dir("cache");
  auto echo = std::make_shared<testing::EchoProvider>();
  CachingProvider cache(echo, dir.path());
  const std::string prompt = "Speech recognition prediction: same prompt\n";
  const std::string expected = echo->complete({"k", prompt});
  const auto results = parallel_map(64, 8, [&](std::size_t) { return cache.complete({"k", prompt}); });
  for (const std::string& r : results) EXPECT_EQ(r, expected);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir.path())) {
    if (e.is_regular_file()) {
      ++files;
      EXPECT_EQ(e.path().extension(), ".json");
    }
  }
  EXPECT_EQ(files, 1u);
}

TEST(RateLimiter, SpacesCallsAtTheConfiguredRate) {
  RateLimiter limiter(50.0);  // one token up front, then every 20 ms
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 6; ++i) limiter.acquire();
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GE(elapsed, 0.09);
}

TEST(RateLimiter, ZeroRateNeverBlocks) {
  RateLimiter limiter(0.0);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 1000; ++i) limiter.acquire();
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 0.5);
}

TEST(ProviderStack, CountsOnlyCacheMisses) {
  TempDir dir("stack");
  ProviderConfig config;
  config.cache_dir = dir.path().string();
  config.backoff_seconds = 0.0;
  auto echo = std::make_shared<testing::EchoProvider>();
  ProviderStack stack = wrap_provider(echo, config);
  stack.top->complete({"a", "prompt a"});
  stack.top->complete({"a", "prompt a"});
  stack.top->complete({"b", "prompt b"});
  EXPECT_EQ(stack.counter->calls(), 2u);
  EXPECT_EQ(stack.cache->hits(), 1u);
}

TEST(ProviderConfig, Validation) {
  ProviderConfig c;
  EXPECT_NO_THROW(c.validate());
  c.retries = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.timeout_seconds = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ParallelMap, PreservesOrderAndPropagatesErrors) {
  const auto squares = parallel_map(1000, 4, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < squares.size(); ++i) ASSERT_EQ(squares[i], i * i);
  EXPECT_TRUE(parallel_map(0, 4, [](std::size_t i) { return i; }).empty());
  EXPECT_THROW(parallel_map(100, 3,
                            [](std::size_t i) -> int {
                              if (i == 37) throw ValidationError("boom");
                              return 0;
                            }),
               ValidationError);
}

}  // namespace
}  // namespace ne_revise
