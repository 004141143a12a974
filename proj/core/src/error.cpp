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

#include "nlts/error.hpp"

namespace nlts {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kEmptyInput: return "empty-input";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kTooShort: return "too-short";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kSingular: return "singular";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kNoScalingRegion: return "no-scaling-region";
    case ErrorCode::kNoStableRegion: return "no-stable-region";
    case ErrorCode::kTrainingDivergence: return "training-divergence";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kUnknownName: return "unknown-name";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace nlts
