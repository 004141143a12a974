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

#include <cstddef>
#include <optional>
#include <span>

namespace nlts {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Ordinary least-squares line through (x, y); needs at least two points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Inclusive index range [first, last] into the point arrays.
struct IndexWindow {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const { return last - first + 1; }
};

struct ScalingRule {
  std::size_t min_points = 3;
  /// Allowed spread of local slopes relative to their mean magnitude.
  double relative_tolerance = 0.10;
  /// When no window passes the relative test, accept windows whose local
  /// slopes spread by at most this much in absolute terms (0 disables).
  double absolute_floor = 0.0;
};

/// Longest run of consecutive points whose local slopes vary by less than
/// the rule allows; ties go to the earliest window.
std::optional<IndexWindow> find_scaling_window(std::span<const double> x, std::span<const double> y,
                                               const ScalingRule& rule);

}  // namespace nlts
