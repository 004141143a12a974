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
#include <utility>
#include <vector>

#include "nlts/embedding.hpp"

namespace nlts {

enum class PairNormalization {
  kAllOrdered,   // 1 / M^2, as in the classical definition with i != j
  kExcludeSelf,  // 1 / (M (M - 1))
};

struct CorrelationCurve {
  std::vector<double> epsilons;
  std::vector<double> values;  // C(eps) in [0, 1], non-decreasing
  std::size_t pair_count = 0;  // admissible ordered pairs
  std::size_t points = 0;      // M
};

struct DimensionEstimate {
  double value = 0.0;
  std::pair<double, double> fit_range{0.0, 0.0};
  std::vector<std::pair<double, double>> slope_points;  // (log2 eps, log2 numerator)
  double std_error = 0.0;
};

/// Geometric grid of `count` radii spanning [lo, hi].
std::vector<double> geometric_grid(double lo, double hi, std::size_t count);

/// Largest pairwise distance bound: diagonal of the bounding box.
double attractor_diameter(const DelayEmbedding& emb);

/// 24 radii over [1e-3, 1] x diameter.
std::vector<double> default_epsilon_grid(const DelayEmbedding& emb);

CorrelationCurve correlation_integral(const DelayEmbedding& emb, std::span<const double> epsilons,
                                      std::size_t theiler,
                                      PairNormalization norm = PairNormalization::kAllOrdered);

/// Slope of log2 C against log2 eps. Without an explicit range the longest
/// window whose local slopes vary by under 10% is used.
DimensionEstimate correlation_dimension(const CorrelationCurve& curve,
                                        std::optional<std::pair<double, double>> fit_range = std::nullopt);

/// Renyi dimension D_q from box counting with boxes anchored at the
/// bounding-box minimum corner. q = 1 uses the information sum.
DimensionEstimate generalized_dimension(const DelayEmbedding& emb, double q, std::span<const double> epsilons,
                                        std::optional<std::pair<double, double>> fit_range = std::nullopt);

/// Kaplan-Yorke dimension of a spectrum sorted in descending order.
double kaplan_yorke(std::span<const double> exponents);

}  // namespace nlts
