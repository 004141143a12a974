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
#include "nlts/invariants.hpp"
#include "nlts/neighbors.hpp"
#include "nlts/random.hpp"
#include "nlts/refsys.hpp"

using namespace nlts;
using nlts::testing::error_code_of;

namespace {

DelayEmbedding circle(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.uniform(0.0, 2.0 * M_PI);
    pts.push_back(std::cos(a));
    pts.push_back(std::sin(a));
  }
  return embed_states(TimeSeries("circle", 1.0, 2, pts));
}

DelayEmbedding square(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> pts(2 * n);
  for (auto& v : pts) v = rng.uniform();
  return embed_states(TimeSeries("square", 1.0, 2, pts));
}

// Direct double loop over ordered pairs with |i - j| > theiler, divided by M^2.
std::vector<double> brute_correlation(const DelayEmbedding& e, std::span<const double> eps, std::size_t theiler) {
  std::vector<std::size_t> counts(eps.size(), 0);
  const std::size_t m = e.rows();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + theiler + 1; j < m; ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < e.dim(); ++c) d2 += (e.at(i, c) - e.at(j, c)) * (e.at(i, c) - e.at(j, c));
      const double d = std::sqrt(d2);
      const auto first = std::lower_bound(eps.begin(), eps.end(), d) - eps.begin();
      if (static_cast<std::size_t>(first) < eps.size()) ++counts[static_cast<std::size_t>(first)];
    }
  }
  std::vector<double> c(eps.size());
  std::size_t acc = 0;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    acc += counts[k];
    c[k] = 2.0 * static_cast<double>(acc) / (static_cast<double>(m) * static_cast<double>(m));
  }
  return c;
}

}  // namespace

TEST_SUITE("invariants") {
  TEST_CASE("two points at distance one") {
    const DelayEmbedding e = embed(TimeSeries::scalar({0, 1}), 1, 1);
    const std::vector<double> eps{0.5, 0.999, 1.0, 2.0};
    const CorrelationCurve c = correlation_integral(e, eps, 0);
    CHECK(c.values[0] == 0.0);
    CHECK(c.values[1] == 0.0);
    CHECK(c.values[2] == 0.5);
    CHECK(c.values[3] == 0.5);
  }

  TEST_CASE("identical points fill every radius") {
    const DelayEmbedding e = embed(TimeSeries::scalar(std::vector<double>(10, 2.0)), 1, 1);
    const std::vector<double> eps{1e-6, 1.0};
    const CorrelationCurve c = correlation_integral(e, eps, 0);
    for (double v : c.values) CHECK(v == doctest::Approx(90.0 / 100.0).epsilon(1e-15));
  }

  TEST_CASE("no admissible pairs") {
    const DelayEmbedding e = embed(TimeSeries::scalar({0, 1, 2}), 1, 1);
    const std::vector<double> eps{1.0};
    CHECK(error_code_of([&] { correlation_integral(e, eps, 5); }) == ErrorCode::kInsufficientData);
  }

  TEST_CASE("curve is monotone and saturates at the admissible pair fraction") {
    const DelayEmbedding e = circle(400, 3);
    const auto eps = geometric_grid(1e-3, 3.0, 30);
    for (std::size_t theiler : {0, 4}) {
      const CorrelationCurve c = correlation_integral(e, eps, theiler);
      for (std::size_t i = 1; i < c.values.size(); ++i) CHECK(c.values[i] >= c.values[i - 1]);
      const double m = static_cast<double>(e.rows());
      const double excluded = m + 2.0 * static_cast<double>(theiler) * m -
                              static_cast<double>(theiler) * static_cast<double>(theiler + 1);
      CHECK(c.values.back() == doctest::Approx((m * m - excluded) / (m * m)).epsilon(1e-15));
      CHECK(static_cast<double>(c.pair_count) == m * m - excluded);
    }
  }

  TEST_CASE("normalization alternatives") {
    const DelayEmbedding e = circle(100, 1);
    const std::vector<double> eps{5.0};
    CHECK(correlation_integral(e, eps, 0, PairNormalization::kExcludeSelf).values[0] == doctest::Approx(1.0));
    CHECK(correlation_integral(e, eps, 0, PairNormalization::kAllOrdered).values[0] == doctest::Approx(0.99));
  }

  TEST_CASE("circle slope is one against the brute-force pair count") {
    const DelayEmbedding e = circle(1000, 21);
    const auto eps = geometric_grid(0.01, 0.3, 16);
    const CorrelationCurve c = correlation_integral(e, eps, 0);
    const auto oracle = brute_correlation(e, eps, 0);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK(c.values[i] == doctest::Approx(oracle[i]).epsilon(1e-14));
    const DimensionEstimate d = correlation_dimension(c, std::make_pair(0.01, 0.3));
    CHECK(d.value == doctest::Approx(1.0).epsilon(0.05));
    const DimensionEstimate automatic = correlation_dimension(c);
    CHECK(automatic.value == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("exact power law has slope two") {
    CorrelationCurve c;
    c.epsilons = geometric_grid(1e-3, 1e-1, 12);
    for (double e : c.epsilons) c.values.push_back(e * e);
    c.points = 100;
    c.pair_count = 9900;
    CHECK(std::abs(correlation_dimension(c).value - 2.0) < 1e-12);
  }

  TEST_CASE("no scaling window on a kinked curve") {
    CorrelationCurve c;
    c.epsilons = geometric_grid(1e-3, 1.0, 6);
    const double vals[] = {1e-9, 1e-9, 1e-3, 1e-3, 0.5, 0.5};
    c.values.assign(std::begin(vals), std::end(vals));
    CHECK(error_code_of([&] { correlation_dimension(c); }) == ErrorCode::kNoScalingRegion);
  }

  TEST_CASE("Henon correlation dimension against the brute-force oracle") {
    const TimeSeries s = generate(catalog("henon"), 20000);
    const DelayEmbedding e = embed(TimeSeries::scalar(s.channel(0)), 2, 1);
    const auto eps = default_epsilon_grid(e);
    const std::size_t theiler = default_theiler(e);
    const CorrelationCurve c = correlation_integral(e, eps, theiler);
    const auto oracle = brute_correlation(e, eps, theiler);
    for (std::size_t i = 0; i < eps.size(); ++i) CHECK(c.values[i] == doctest::Approx(oracle[i]).epsilon(1e-14));
    CHECK(correlation_dimension(c).value == doctest::Approx(1.21).epsilon(0.06 / 1.21));
  }

  TEST_CASE("box-counting dimensions") {
    const DelayEmbedding sq = square(10000, 4);
    const auto eps = geometric_grid(0.02, 0.5, 10);
    CHECK(generalized_dimension(sq, 0.0, eps).value == doctest::Approx(2.0).epsilon(0.05));
    const DelayEmbedding ci = circle(10000, 5);
    const auto eps_c = geometric_grid(0.01, 0.5, 12);
    CHECK(generalized_dimension(ci, 1.0, eps_c).value == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("box counting on a single point is degenerate") {
    const DelayEmbedding e = embed(TimeSeries::scalar(std::vector<double>(20, 1.0)), 2, 1);
    const auto eps = geometric_grid(0.1, 1.0, 5);
    CHECK(error_code_of([&] { generalized_dimension(e, 0.0, eps); }) == ErrorCode::kDegenerate);
  }

  TEST_CASE("D_q does not increase with q") {
    const TimeSeries s = generate(catalog("henon"), 20000);
    const DelayEmbedding e = embed_states(s);
    const auto eps = geometric_grid(0.005, 0.2, 12);
    const auto window = std::make_pair(0.005, 0.2);
    const DimensionEstimate d0 = generalized_dimension(e, 0.0, eps, window);
    const DimensionEstimate d1 = generalized_dimension(e, 1.0, eps, window);
    const DimensionEstimate d2 = generalized_dimension(e, 2.0, eps, window);
    CHECK(d1.value <= d0.value + d0.std_error + d1.std_error);
    CHECK(d2.value <= d1.value + d1.std_error + d2.std_error);
  }

  TEST_CASE("Kaplan-Yorke examples") {
    const double a[] = {0.0, -1.0};
    CHECK(kaplan_yorke(a) == 1.0);
    const double b[] = {-0.5, -1.0};
    CHECK(kaplan_yorke(b) == 0.0);
    const double lorenz[] = {0.905, 0.0, -14.57};
    CHECK(kaplan_yorke(lorenz) == doctest::Approx(2.0 + 0.905 / 14.57).epsilon(1e-14));
    const double pos[] = {0.2, 0.1};
    CHECK(kaplan_yorke(pos) == 2.0);
  }

  TEST_CASE("Kaplan-Yorke input checks") {
    const double z[] = {0.5, 0.0};
    CHECK(kaplan_yorke(z) == 2.0);
    const double unsorted[] = {-1.0, 0.5};
    CHECK(error_code_of([&] { kaplan_yorke(unsorted); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("Kaplan-Yorke is scale covariant") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> l(4);
      for (auto& v : l) v = rng.uniform(-2.0, 1.0);
      std::sort(l.begin(), l.end(), std::greater<>());
      if (std::any_of(l.begin(), l.end(), [](double v) { return std::abs(v) < 1e-6; })) continue;
      const double c = rng.uniform(0.1, 10.0);
      std::vector<double> scaled(l);
      for (auto& v : scaled) v *= c;
      double base = 0.0;
      try {
        base = kaplan_yorke(l);
      } catch (const Error&) {
        continue;
      }
      CHECK(kaplan_yorke(scaled) == doctest::Approx(base).epsilon(1e-12));
    }
  }
}
