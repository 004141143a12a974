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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "nlts/embedding.hpp"
#include "nlts/neighbors.hpp"
#include "nlts/random.hpp"

using namespace nlts;
using nlts::testing::error_code_of;

namespace {

// Brute-force scan: admissible rows sorted by (distance, row).
std::vector<Neighbor> brute_knn(const DelayEmbedding& e, std::size_t row, std::size_t k, std::size_t theiler) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t r = 0; r < e.rows(); ++r) {
    const long dt = static_cast<long>(e.time(r)) - static_cast<long>(e.time(row));
    if (static_cast<std::size_t>(std::labs(dt)) <= theiler) continue;
    double d2 = 0.0;
    for (std::size_t c = 0; c < e.dim(); ++c) d2 += (e.at(r, c) - e.at(row, c)) * (e.at(r, c) - e.at(row, c));
    all.emplace_back(d2, r);
  }
  std::sort(all.begin(), all.end());
  std::vector<Neighbor> out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back({all[i].second, std::sqrt(all[i].first)});
  return out;
}

DelayEmbedding noisy_embedding(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  double x = 0.1;
  for (auto& y : v) {
    x = 0.7 * x + rng.uniform(-1, 1);
    y = x;
  }
  return embed(TimeSeries::scalar(v), m, 1);
}

}  // namespace

TEST_SUITE("neighbors") {
  TEST_CASE("points on a line") {
    const DelayEmbedding e = embed(TimeSeries::scalar({0, 1, 3}), 1, 1);
    const NeighborIndex idx(e, 0);
    const auto one = idx.knn(0, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].row == 1);
    CHECK(one[0].distance == 1.0);
    const auto two = idx.knn(1, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0].row == 0);
    CHECK(two[0].distance == 1.0);
    CHECK(two[1].row == 2);
    CHECK(two[1].distance == 2.0);
  }

  TEST_CASE("equal distances break ties by row") {
    const DelayEmbedding e = embed(TimeSeries::scalar({1, 0, 1, 2, 1}), 1, 1);
    const NeighborIndex idx(e, 0);
    const auto n = idx.knn(1, 4);
    REQUIRE(n.size() == 4);
    CHECK(n[0].row == 0);
    CHECK(n[1].row == 2);
    CHECK(n[2].row == 4);
    CHECK(n[3].row == 3);
  }

  TEST_CASE("theiler window removes temporal neighbors") {
    const DelayEmbedding e = embed(TimeSeries::scalar({0, 0.1, 0.2, 5, 0.05}), 1, 1);
    const NeighborIndex idx(e, 2);
    const auto n = idx.knn(0, 1);
    REQUIRE(n.size() == 1);
    CHECK(n[0].row == 4);
    CHECK(idx.knn(0, 2)[1].row == 3);
    CHECK(error_code_of([&] { idx.knn(0, 3); }) == ErrorCode::kInsufficientData);
  }

  TEST_CASE("default theiler window") {
    const DelayEmbedding e = embed(TimeSeries::scalar(std::vector<double>(50, 1.0)), 3, 4);
    CHECK(default_theiler(e) == 9);
  }

  TEST_CASE("k-d tree agrees with a brute-force scan") {
    for (std::size_t m : {1, 2, 3, 5}) {
      const DelayEmbedding e = noisy_embedding(3000, m, 40 + m);
      for (std::size_t theiler : {0, 3}) {
        const NeighborIndex idx(e, theiler);
        for (std::size_t row = 0; row < e.rows(); row += 97) {
          const auto got = idx.knn(row, 7);
          const auto want = brute_knn(e, row, 7, theiler);
          REQUIRE(got.size() == want.size());
          for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].row == want[i].row);
            CHECK(got[i].distance == doctest::Approx(want[i].distance).epsilon(1e-14));
            if (i > 0) CHECK(got[i].distance >= got[i - 1].distance);
          }
        }
      }
    }
  }

  TEST_CASE("radius search agrees with a brute-force scan") {
    const DelayEmbedding e = noisy_embedding(2000, 2, 9);
    const NeighborIndex idx(e, 1);
    for (std::size_t row = 0; row < e.rows(); row += 131) {
      const auto got = idx.within(row, 0.15);
      auto want = brute_knn(e, row, e.rows(), 1);
      want.erase(std::remove_if(want.begin(), want.end(), [](const Neighbor& n) { return n.distance > 0.15; }),
                 want.end());
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].row == want[i].row);
    }
  }

  TEST_CASE("row filter restricts candidates") {
    const DelayEmbedding e = noisy_embedding(500, 2, 1);
    const NeighborIndex idx(e, 0);
    const auto n = idx.knn(250, 5, [](std::size_t r) { return r % 2 == 0; });
    for (const auto& nb : n) CHECK(nb.row % 2 == 0);
  }

  TEST_CASE("query dimension must match") {
    const DelayEmbedding e = noisy_embedding(100, 2, 1);
    const NeighborIndex idx(e, 0);
    const std::vector<double> q{0.0};
    CHECK(error_code_of([&] { idx.knn_point(q, 1); }) == ErrorCode::kShapeMismatch);
  }
}
