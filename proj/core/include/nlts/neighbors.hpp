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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nlts/embedding.hpp"

namespace nlts {

struct Neighbor {
  std::size_t row;
  double distance;
};

/// Euclidean nearest-neighbor search over the rows of a DelayEmbedding.
///
/// Backed by a k-d tree; results are identical to a brute-force scan: sorted
/// by (distance, row). Row queries exclude the query row and every row whose
/// sample time lies within `theiler` samples of it. The embedding must
/// outlive the index.
class NeighborIndex {
 public:
  using RowFilter = std::function<bool(std::size_t)>;

  NeighborIndex(const DelayEmbedding& embedding, std::size_t theiler);

  const DelayEmbedding& embedding() const noexcept { return *emb_; }
  std::size_t theiler() const noexcept { return theiler_; }

  /// k nearest admissible rows; throws kInsufficientData when fewer exist.
  std::vector<Neighbor> knn(std::size_t row, std::size_t k, const RowFilter& accept = {}) const;

  /// k nearest rows to an arbitrary point. With `reference_time` the Theiler
  /// exclusion is applied around that sample time.
  std::vector<Neighbor> knn_point(std::span<const double> point, std::size_t k, const RowFilter& accept = {},
                                  std::optional<std::size_t> reference_time = std::nullopt) const;

  /// All admissible rows within `radius` (inclusive), sorted by distance.
  std::vector<Neighbor> within(std::size_t row, double radius, const RowFilter& accept = {}) const;
  std::vector<Neighbor> within_point(std::span<const double> point, double radius, const RowFilter& accept = {},
                                     std::optional<std::size_t> reference_time = std::nullopt) const;

 private:
  struct Node {
    std::size_t begin, end;  // range in order_
    std::size_t split_dim = 0;
    double split_value = 0.0;
    int left = -1, right = -1;
    std::vector<double> lo, hi;  // bounding box
  };

  int build(std::size_t begin, std::size_t end);
  bool admissible(std::size_t row, std::optional<std::size_t> reference_time, const RowFilter& accept) const;
  double box_distance2(const Node& node, std::span<const double> point) const;

  const DelayEmbedding* emb_;
  std::size_t theiler_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// Default Theiler window tau * (m - 1) + 1.
std::size_t default_theiler(const DelayEmbedding& emb);

}  // namespace nlts
