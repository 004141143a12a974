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

#include "nlts/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nlts/error.hpp"

namespace nlts {

namespace {

constexpr std::size_t kLeafSize = 12;

double distance2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

bool closer(double d2a, std::size_t ra, double d2b, std::size_t rb) {
  return d2a < d2b || (d2a == d2b && ra < rb);
}

}  // namespace

std::size_t default_theiler(const DelayEmbedding& emb) { return emb.tau() * (emb.m() - 1) + 1; }

NeighborIndex::NeighborIndex(const DelayEmbedding& embedding, std::size_t theiler)
    : emb_(&embedding), theiler_(theiler), order_(embedding.rows()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * embedding.rows() / kLeafSize + 2);
  if (!order_.empty()) build(0, order_.size());
}

int NeighborIndex::build(std::size_t begin, std::size_t end) {
  const std::size_t dim = emb_->dim();
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo.assign(dim, std::numeric_limits<double>::infinity());
  node.hi.assign(dim, -std::numeric_limits<double>::infinity());
  for (std::size_t i = begin; i < end; ++i) {
    const auto p = emb_->row(order_[i]);
    for (std::size_t d = 0; d < dim; ++d) {
      node.lo[d] = std::min(node.lo[d], p[d]);
      node.hi[d] = std::max(node.hi[d], p[d]);
    }
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  std::size_t split = 0;
  double spread = -1.0;
  for (std::size_t d = 0; d < dim; ++d) {
    if (node.hi[d] - node.lo[d] > spread) {
      spread = node.hi[d] - node.lo[d];
      split = d;
    }
  }
  if (spread <= 0.0) return id;  // all points identical: keep as one leaf

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                     const double va = emb_->at(a, split), vb = emb_->at(b, split);
                     return va < vb || (va == vb && a < b);
                   });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].split_dim = split;
  nodes_[static_cast<std::size_t>(id)].split_value = emb_->at(order_[mid], split);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

bool NeighborIndex::admissible(std::size_t row, std::optional<std::size_t> reference_time,
                               const RowFilter& accept) const {
  if (reference_time) {
    const std::size_t t = emb_->time(row);
    const std::size_t gap = t > *reference_time ? t - *reference_time : *reference_time - t;
    if (gap <= theiler_) return false;
  }
  return !accept || accept(row);
}

double NeighborIndex::box_distance2(const Node& node, std::span<const double> point) const {
  double s = 0.0;
  for (std::size_t d = 0; d < point.size(); ++d) {
    double e = 0.0;
    if (point[d] < node.lo[d]) {
      e = node.lo[d] - point[d];
    } else if (point[d] > node.hi[d]) {
      e = point[d] - node.hi[d];
    }
    s += e * e;
  }
  return s;
}

std::vector<Neighbor> NeighborIndex::knn_point(std::span<const double> point, std::size_t k,
                                               const RowFilter& accept,
                                               std::optional<std::size_t> reference_time) const {
  require(k >= 1, ErrorCode::kInvalidArgument, "knn: k must be at least 1");
  require(point.size() == emb_->dim(), ErrorCode::kShapeMismatch, "knn: query dimension mismatch");
  // best holds (d2, row) sorted ascending, at most k entries
  std::vector<std::pair<double, std::size_t>> best;
  best.reserve(k + 1);
  auto worst = [&]() {
    return best.size() < k ? std::numeric_limits<double>::infinity() : best.back().first;
  };
  std::vector<int> stack;
  if (!nodes_.empty()) stack.push_back(0);
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (box_distance2(node, point) > worst()) continue;
    if (node.left < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t r = order_[i];
        const double d2 = distance2(point, emb_->row(r));
        if (best.size() == k && !closer(d2, r, best.back().first, best.back().second)) continue;
        if (!admissible(r, reference_time, accept)) continue;
        auto pos = std::upper_bound(best.begin(), best.end(), std::make_pair(d2, r));
        best.insert(pos, {d2, r});
        if (best.size() > k) best.pop_back();
      }
      continue;
    }
    // visit the nearer child first
    const bool go_left = point[node.split_dim] < node.split_value;
    stack.push_back(go_left ? node.right : node.left);
    stack.push_back(go_left ? node.left : node.right);
  }
  if (best.size() < k) {
    fail(ErrorCode::kInsufficientData, "knn: only " + std::to_string(best.size()) +
                                           " admissible neighbors, " + std::to_string(k) + " requested");
  }
  std::vector<Neighbor> out;
  out.reserve(k);
  for (const auto& [d2, r] : best) out.push_back({r, std::sqrt(d2)});
  return out;
}

std::vector<Neighbor> NeighborIndex::knn(std::size_t row, std::size_t k, const RowFilter& accept) const {
  require(row < emb_->rows(), ErrorCode::kInvalidArgument, "knn: row out of range");
  return knn_point(emb_->row(row), k, accept, emb_->time(row));
}

std::vector<Neighbor> NeighborIndex::within_point(std::span<const double> point, double radius,
                                                  const RowFilter& accept,
                                                  std::optional<std::size_t> reference_time) const {
  require(point.size() == emb_->dim(), ErrorCode::kShapeMismatch, "within: query dimension mismatch");
  const double r2 = radius * radius;
  std::vector<std::pair<double, std::size_t>> hits;
  std::vector<int> stack;
  if (!nodes_.empty()) stack.push_back(0);
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (box_distance2(node, point) > r2) continue;
    if (node.left < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t r = order_[i];
        const double d2 = distance2(point, emb_->row(r));
        if (d2 <= r2 && admissible(r, reference_time, accept)) hits.emplace_back(d2, r);
      }
      continue;
    }
    stack.push_back(node.left);
    stack.push_back(node.right);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<Neighbor> out;
  out.reserve(hits.size());
  for (const auto& [d2, r] : hits) out.push_back({r, std::sqrt(d2)});
  return out;
}

std::vector<Neighbor> NeighborIndex::within(std::size_t row, double radius, const RowFilter& accept) const {
  require(row < emb_->rows(), ErrorCode::kInvalidArgument, "within: row out of range");
  return within_point(emb_->row(row), radius, accept, emb_->time(row));
}

}  // namespace nlts
