// Copyright 2026 The Frameprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exception hierarchy shared by all frameprobe modules. Every failure that
// callers are expected to handle derives from frameprobe::Error; the CLI maps
// any Error to exit code 1.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace frameprobe {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- frame text / tree errors ----

struct EmptyInput : Error {
  EmptyInput() : Error("empty frame text") {}
};

struct MalformedBracketToken : Error {
  std::size_t index;
  std::string token;
  MalformedBracketToken(std::size_t idx, std::string tok)
      : Error("malformed bracket token '" + tok + "' at token index " +
              std::to_string(idx)),
        index(idx),
        token(std::move(tok)) {}
};

struct NotSchemaValid : Error {
  std::size_t index;  // first offending token index; seq.size() for an
                      // unclosed sequence
  explicit NotSchemaValid(std::size_t idx, const std::string& what = "")
      : Error("sequence is not schema-valid at token index " +
              std::to_string(idx) + (what.empty() ? "" : ": " + what)),
        index(idx) {}
};

// ---- oracle errors ----

struct MarkerMismatch : Error {
  using Error::Error;
};

// ---- perturbation errors ----

struct TypeNotApplicable : Error {
  using Error::Error;
};

struct EmptyCorpus : Error {
  EmptyCorpus() : Error("corpus contains no frames") {}
};

// ---- confidence errors ----

struct ProbLengthMismatch : Error {
  using Error::Error;
};

struct SingleClassCorpus : Error {
  SingleClassCorpus() : Error("training corpus contains a single class") {}
};

struct DegenerateFeatures : Error {
  DegenerateFeatures() : Error("all active features are constant") {}
};

struct MaskMismatch : Error {
  using Error::Error;
};

// ---- corpus / I/O errors ----

struct MissingBucketKey : Error {
  using Error::Error;
};

struct UnreadableFile : Error {
  explicit UnreadableFile(const std::string& path)
      : Error("cannot read file: " + path) {}
};

struct EmptyDataset : Error {
  explicit EmptyDataset(const std::string& path)
      : Error("dataset file has no content lines: " + path) {}
};

}  // namespace frameprobe
