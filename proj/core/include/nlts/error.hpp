// Copyright 2026 The nlts Authors
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
#include <string_view>

namespace nlts {

enum class ErrorCode {
  kParse,             // malformed input text
  kFormat,            // well-formed but semantically invalid file layout
  kEmptyInput,
  kInvalidArgument,   // violated precondition
  kTooShort,          // series shorter than the operation needs
  kDegenerate,        // constant channel, zero harmonic, one-box partition...
  kInsufficientData,  // not enough neighbors, pairs or replacement events
  kSingular,          // rank-deficient regression or projection
  kDivergence,        // non-finite or overflowing state
  kNoScalingRegion,
  kNoStableRegion,
  kTrainingDivergence,
  kShapeMismatch,
  kUnknownName,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code distinguishes failure
/// classes so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace nlts
