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

#include <stdexcept>
#include <string>
#include <utility>

namespace ne_revise {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input, bad configuration, or a violated precondition. The CLI maps
// this family to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MultiWordInput : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Errors raised while ingesting an interchange record carry the record id.
class RecordError : public ValidationError {
 public:
  RecordError(std::string record_id, const std::string& what)
      : ValidationError("record '" + record_id + "': " + what),
        record_id_(std::move(record_id)) {}

  const std::string& record_id() const noexcept { return record_id_; }

 private:
  std::string record_id_;
};

class SchemaError : public RecordError {
 public:
  using RecordError::RecordError;
};

class UnknownEntityType : public RecordError {
 public:
  using RecordError::RecordError;
};

class SpanOutOfBounds : public RecordError {
 public:
  using RecordError::RecordError;
};

class DanglingSentenceRef : public RecordError {
 public:
  using RecordError::RecordError;
};

class MissingReference : public RecordError {
 public:
  using RecordError::RecordError;
};

class MaskLengthMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InsufficientSamples : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// The LLM endpoint could not produce a response (after retries, if any).
// Exit code 2 at the CLI.
class ProviderUnavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace ne_revise
