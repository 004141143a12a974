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

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "nlts/embedding.hpp"
#include "nlts/neighbors.hpp"
#include "nlts/predict.hpp"
#include "nlts/random.hpp"
#include "nlts/refsys.hpp"
#include "nlts/regressor.hpp"

using namespace nlts;
using Eigen::VectorXd;
using nlts::testing::error_code_of;

namespace {

DelayEmbedding points_2d(std::vector<double> flat) {
  const std::size_t rows = flat.size() / 2;
  std::vector<std::size_t> times(rows);
  for (std::size_t i = 0; i < rows; ++i) times[i] = i + 1;
  return DelayEmbedding(2, 1, 1, 1.0, std::move(flat), std::move(times));
}

// Positive random walk so that every populated cell is nonzero.
DelayEmbedding positive_series(std::size_t n) {
  Rng rng(3);
  std::vector<double> v(n);
  for (auto& x : v) x = 1.0 + rng.uniform();
  return embed(TimeSeries::scalar(v), 1, 1);
}

std::size_t count(const TableauMask& m) { return static_cast<std::size_t>(m.count()); }

}  // namespace

TEST_SUITE("predict") {
  TEST_CASE("printed tableau layouts") {
    const std::size_t r = 2, k = 2;  // 5 grid rows, 5 columns, current points in column 2
    const TableauMask global = layout_mask(TableauLayout::kGlobal, r, k);
    CHECK(count(global) == 3);
    for (Eigen::Index c = 2; c < 5; ++c) CHECK(global(2, c));
    const TableauMask next = layout_mask(TableauLayout::kLocalNext, r, k);
    CHECK(count(next) == 4);
    for (Eigen::Index row : {0, 1, 3, 4}) CHECK(next(row, 1));
    CHECK_FALSE(next(2, 1));
    const TableauMask with_current = layout_mask(TableauLayout::kLocalWithCurrent, r, k);
    CHECK(count(with_current) == 9);
    for (Eigen::Index row = 0; row < 5; ++row) CHECK(with_current(row, 2));
    const TableauMask full = layout_mask(TableauLayout::kFull, r, k);
    CHECK(count(full) == 25 - 2);
    CHECK_FALSE(full(2, 0));
    CHECK_FALSE(full(2, 1));
  }

  TEST_CASE("global layout fills only the center row") {
    const DelayEmbedding e = positive_series(60);
    const NeighborIndex idx(e, 0);
    const NeighborhoodTableau t = build_tableau(e, idx, 30, 2, 2, TableauLayout::kGlobal);
    CHECK(t.rows() == 5);
    CHECK(t.cols() == 5);
    CHECK(t.nonzero_cells() == 3);
    for (std::size_t row = 0; row < t.rows(); ++row) {
      if (row == 2) continue;
      for (std::size_t c = 0; c < t.cols(); ++c) CHECK(t.cell(row, c)[0] == 0.0);
    }
    CHECK(t.cell(2, 2)[0] == e.at(30, 0));
    CHECK(t.cell(2, 4)[0] == e.at(28, 0));
  }

  TEST_CASE("local-next layout with r = 1 holds two successor values") {
    const DelayEmbedding e = positive_series(60);
    const NeighborIndex idx(e, 0);
    const NeighborhoodTableau t = build_tableau(e, idx, 30, 1, 1, TableauLayout::kLocalNext);
    CHECK(t.nonzero_cells() == 2);
    REQUIRE(t.neighbors.size() == 2);
    // nearest neighbor above the center, second below
    CHECK(t.cell(0, 0)[0] == e.at(t.neighbors[0].row + 1, 0));
    CHECK(t.cell(2, 0)[0] == e.at(t.neighbors[1].row + 1, 0));
  }

  TEST_CASE("tableau neighbor shortage reports the achievable radius") {
    const DelayEmbedding e = positive_series(6);
    const NeighborIndex idx(e, 0);
    try {
      build_tableau(e, idx, 3, 3, 1, TableauLayout::kFull);
      FAIL("expected an error");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::kInsufficientData);
      CHECK(std::string(err.what()).find("largest achievable r is 1") != std::string::npos);
    }
  }

  TEST_CASE("synthetic masks are validated") {
    const DelayEmbedding e = positive_series(60);
    const NeighborIndex idx(e, 0);
    TableauMask ok = TableauMask::Constant(3, 3, false);
    ok(0, 2) = true;
    CHECK(build_tableau(e, idx, 30, 1, 1, TableauLayout::kSynthetic, ok).nonzero_cells() == 1);
    TableauMask peek = ok;
    peek(1, 0) = true;
    CHECK(error_code_of([&] { build_tableau(e, idx, 30, 1, 1, TableauLayout::kSynthetic, peek); }) ==
          ErrorCode::kInvalidArgument);
    const TableauMask printed = layout_mask(TableauLayout::kLocalNext, 1, 1);
    CHECK(error_code_of([&] { build_tableau(e, idx, 30, 1, 1, TableauLayout::kSynthetic, printed); }) ==
          ErrorCode::kInvalidArgument);
    CHECK(error_code_of([&] { build_tableau(e, idx, 30, 1, 1, TableauLayout::kSynthetic); }) ==
          ErrorCode::kInvalidArgument);
  }

  TEST_CASE("feature examples") {
    const TimeSeries s = TimeSeries::scalar({1, 2, 3, 7});
    const DelayEmbedding e = embed(s, 1, 1);
    FeatureContext ctx{&s, &e, nullptr, nullptr, ""};
    const auto m1 = parse_feature_list("m1(0,1)");
    const FeatureVector a = preprocess_features(ctx, 3, m1);
    REQUIRE(a.values.size() == 2);
    CHECK(a.values[0] == 7.0);
    CHECK(a.values[1] == 3.0);

    const TimeSeries s2 = TimeSeries::scalar({9, 4, 6});
    const DelayEmbedding e2 = embed(s2, 1, 1);
    FeatureContext ctx2{&s2, &e2, nullptr, nullptr, ""};
    const auto m2 = parse_feature_list("m2(2)");
    CHECK(preprocess_features(ctx2, 2, m2).values[0] == 5.0);
    const auto m2b = parse_feature_list("m2(1,2)");
    const FeatureVector b = preprocess_features(ctx2, 2, m2b);
    CHECK(b.values[0] == 6.0);
    CHECK(b.values[1] == 5.0);
    const auto m4 = parse_feature_list("m4(2)");
    CHECK(preprocess_features(ctx2, 2, m4).values[0] == doctest::Approx((2 * 6.0 + 4.0) / 3.0));

    ErrorHistory history{{"net", {0.5, 0.1, 0.25}}};
    FeatureContext ctx3{&s2, &e2, nullptr, &history, "net"};
    const auto m5 = parse_feature_list("m5(1)");
    const FeatureVector c = preprocess_features(ctx3, 2, m5);
    CHECK(c.values[0] == 0.25);
    CHECK(c.warnings.empty());
    const auto m5far = parse_feature_list("m5(9)");
    const FeatureVector d = preprocess_features(ctx3, 2, m5far);
    CHECK(d.values[0] == 0.0);
    CHECK(d.warnings.size() == 1);
    CHECK(error_code_of([&] { preprocess_features(ctx2, 2, m5); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("neighbor-mean feature") {
    const TimeSeries s = TimeSeries::scalar({0.0, 10.0, 0.1, 20.0, 5.0, 0.05});
    const DelayEmbedding e = embed(s, 1, 1);
    const NeighborIndex idx(e, 0);
    FeatureContext ctx{&s, &e, &idx, nullptr, ""};
    const auto m3 = parse_feature_list("m3(2)");
    CHECK(preprocess_features(ctx, 5, m3).values[0] == doctest::Approx(15.0));
  }

  TEST_CASE("feature parsing") {
    CHECK(FeatureSpec::parse("m3(4)").label() == "m3(4)");
    CHECK(parse_feature_list("m1(0,1); m2(3) m4(2)").size() == 3);
    CHECK(error_code_of([] { FeatureSpec::parse("m6(1)"); }) == ErrorCode::kParse);
    CHECK(error_code_of([] { FeatureSpec::parse("m2(0)"); }) == ErrorCode::kParse);
    CHECK(error_code_of([] { FeatureSpec::parse("m1(a)"); }) == ErrorCode::kParse);
    const auto specs = parse_feature_list("m1(0,3) m2(5)");
    CHECK(feature_lookback(specs) == 4);
  }

  TEST_CASE("E_psi examples") {
    // rows 0..5 on a line; successors of the two nearest neighbors of row 5
    const DelayEmbedding e = embed(TimeSeries::scalar({0.0, 1.0, 0.2, 2.0, 0.4, 0.1}), 1, 1);
    const NeighborIndex idx(e, 0);
    PredictorModel exact;
    exact.kind = RegressorKind::kLinear;
    exact.inputs = 1;
    exact.linear = VectorXd::Zero(2);
    // the neighbors of 0.1 are rows 0 (0.0) and 2 (0.2); successors 1.0 and 2.0 = 1 + 5x
    exact.linear << 5.0, 1.0;
    const FeatureFn f = embedding_features(e);
    CHECK(e_psi(exact, f, e, idx, 5, 2) == doctest::Approx(0.0).epsilon(1e-12));
    PredictorModel mean;
    mean.kind = RegressorKind::kMean;
    mean.inputs = 1;
    mean.mean = 1.3;
    // successors 1.0 and 2.0 against 1.3: residuals 0.3 and 0.7
    CHECK(e_psi(mean, f, e, idx, 5, 2) == doctest::Approx(0.09 + 0.49));
    mean.mean = 1.6;
    // residuals 0.6 and 0.4
    CHECK(e_psi(mean, f, e, idx, 5, 2) == doctest::Approx(0.36 + 0.16));
    CHECK(error_code_of([&] { e_psi(mean, f, e, idx, 5, 10); }) == ErrorCode::kInsufficientData);
  }

  TEST_CASE("E_psi from two residuals") {
    const DelayEmbedding e = embed(TimeSeries::scalar({0.0, 1.0, 0.2, 1.7, 0.1}), 1, 1);
    const NeighborIndex idx(e, 0);
    PredictorModel mean;
    mean.kind = RegressorKind::kMean;
    mean.inputs = 1;
    mean.mean = 1.3;
    // successors 1.0 and 1.7: residuals 0.3 and 0.4
    CHECK(e_psi(mean, embedding_features(e), e, idx, 4, 2) == doctest::Approx(0.25).epsilon(1e-12));
  }

  TEST_CASE("select_prediction examples") {
    const Candidate three[] = {{10.0, 0.5}, {20.0, 0.2}, {30.0, 0.9}};
    const Selection a = select_prediction(three);
    CHECK(a.index == 1);
    CHECK(a.forecast == 20.0);
    CHECK_FALSE(a.gated);
    const Candidate one[] = {{4.0, 0.3}};
    const Selection b = select_prediction(one, 0.2);
    CHECK(b.gated);
    CHECK(b.forecast == 0.0);
    const Candidate tie[] = {{1.0, 0.2}, {2.0, 0.2}};
    CHECK(select_prediction(tie).index == 0);
    CHECK(error_code_of([] { select_prediction(std::span<const Candidate>{}); }) == ErrorCode::kInvalidArgument);
  }

  TEST_CASE("select_prediction argmin is scale invariant") {
    Rng rng(10);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<Candidate> c(6);
      for (auto& x : c) x = {rng.normal(), rng.uniform(0.01, 1.0)};
      const double k = rng.uniform(0.01, 100.0);
      std::vector<Candidate> scaled(c);
      for (auto& x : scaled) x.error *= k;
      CHECK(select_prediction(c).index == select_prediction(scaled).index);
    }
    // the gate uses absolute units
    const Candidate one[] = {{1.0, 0.1}};
    const Candidate ten[] = {{1.0, 1.0}};
    CHECK_FALSE(select_prediction(one, 0.5).gated);
    CHECK(select_prediction(ten, 0.5).gated);
  }

  TEST_CASE("local stability examples") {
    const DelayEmbedding e = embed(TimeSeries::scalar({0.0, 1.0, 0.0, 1.5, 0.0, 1.25, 0.0}), 1, 1);
    const std::size_t region[] = {0, 2, 4};
    const LocalStability s = local_stability(e, region);
    CHECK(s.lambda_d == doctest::Approx(2.0));
    CHECK(s.j2 == 3);
    const DelayEmbedding flat = embed(TimeSeries::scalar({0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0}), 1, 1);
    const std::size_t five[] = {0, 2, 4, 6, 8};
    const LocalStability f = local_stability(flat, five);
    CHECK(std::isinf(f.lambda_d));
    CHECK(f.j2 == 5);
    const std::size_t single[] = {0};
    CHECK(error_code_of([&] { local_stability(e, single); }) == ErrorCode::kInsufficientData);
  }

  TEST_CASE("composite J examples") {
    CHECK(composite_J(3.0, 7.0, 2.0) == 7.0);
    CHECK(composite_J(1.0, 7.0, 2.0) == 0.0);
    CHECK(composite_J(2.0, 7.0, 2.0) == 7.0);
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
      const double j2 = std::floor(rng.uniform(0, 50));
      const double v = composite_J(rng.uniform(0, 5), j2, rng.uniform(0, 5));
      CHECK((v == 0.0 || v == j2));
    }
  }

  TEST_CASE("local_predict examples") {
    const DelayEmbedding e = points_2d({0, 0, 1, 2, 0.1, 0, 3, 4});
    const NeighborIndex idx(e, 0);
    const std::vector<double> q{0.0, 0.0};
    const VectorXd two = local_predict_point(e, idx, q, 2);
    CHECK(two[0] == 2.0);
    CHECK(two[1] == 3.0);
    const VectorXd one = local_predict_point(e, idx, q, 1);
    CHECK(one[0] == 1.0);
    CHECK(one[1] == 2.0);
  }

  TEST_CASE("identical neighbors return their common successor") {
    const DelayEmbedding e = points_2d({0.5, 0.5, 0.3, 0.7, 0.5, 0.5, 0.3, 0.7, 0.5, 0.5, 0.3, 0.7, 9, 9});
    const NeighborIndex idx(e, 0);
    const std::vector<double> q{0.5, 0.5};
    const VectorXd v = local_predict_point(e, idx, q, 3);
    CHECK(v[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(0.7).epsilon(1e-15));
  }

  TEST_CASE("local prediction beats persistence on Henon") {
    const TimeSeries s = generate(catalog("henon"), 5000);
    const DelayEmbedding e = embed(TimeSeries::scalar(s.channel(0)), 2, 1);
    const NeighborIndex idx(e, 0);
    double sq = 0.0, sq_p = 0.0;
    const std::size_t first = e.rows() - 501;
    for (std::size_t r = first; r + 1 < e.rows(); ++r) {
      const auto known = [first](std::size_t c) { return c + 1 < first; };
      const double f = local_predict(e, idx, r, 4, known)[0];
      sq += (f - e.at(r + 1, 0)) * (f - e.at(r + 1, 0));
      sq_p += (e.at(r, 0) - e.at(r + 1, 0)) * (e.at(r, 0) - e.at(r + 1, 0));
    }
    CHECK(std::sqrt(sq) < 0.5 * std::sqrt(sq_p));
  }

  TEST_CASE("confidence value") {
    CHECK(confidence_value(0.7, 0.5) == 2.0);
    CHECK(confidence_value(-0.7, 0.5) == -2.0);
    CHECK(error_code_of([] { confidence_value(1.0, 0.0); }) == ErrorCode::kDegenerate);
  }

  TEST_CASE("sign change and confidence features are causal") {
    const TimeSeries s = TimeSeries::scalar(nlts::testing::sine(400, 23.7));
    const FeatureSeries sc = sign_change_feature(s);
    CHECK(std::isnan(sc.values[0]));
    CHECK(sc.values[1] == 1.0);
    const FeatureSeries full = confidence_feature(s, 2, 1, 3);
    const std::vector<double> x = s.channel(0);
    std::vector<double> head(x.begin(), x.begin() + 300);
    const FeatureSeries partial = confidence_feature(TimeSeries::scalar(head), 2, 1, 3);
    for (std::size_t t = 0; t < 300; ++t) {
      if (std::isnan(partial.values[t])) {
        CHECK(std::isnan(full.values[t]));
      } else {
        CHECK(partial.values[t] == full.values[t]);
      }
    }
  }

  TEST_CASE("stepwise with a single configuration") {
    const std::vector<FeatureSeries> catalog{{"y", {0.0, 0.01, 0.02, 0.5, 0.03, 0.04, 0.05}}};
    StepwiseParams p;
    p.m_max = 1;
    const StepwiseResult r = stepwise_reconstruct(catalog, p);
    CHECK(r.best.m == 1);
    CHECK(r.best.features == std::vector<std::size_t>{0});
    CHECK(r.evaluated.size() == 1);
  }

  TEST_CASE("stepwise picks the stable configuration with more neighbors") {
    // Feature a: the last value 0 has neighbors at rows 0, 2, 4 whose successors 1, 2, 3 spread by 2,
    // so lambda_D = 0.5 and J2 = 3. Feature b: the last value 0.05 has neighbors at rows 0, 1, 2, 4, 5
    // whose successors 0.01, 0.02, 0.5, 0.04, 0.05 spread by 0.49, so lambda_D = 1/0.49 and J2 = 5.
    const std::vector<FeatureSeries> catalog{{"a", {0.0, 1.0, 0.0, 2.0, 0.0, 3.0, 0.0}},
                                             {"b", {0.0, 0.01, 0.02, 0.5, 0.03, 0.04, 0.05}}};
    StepwiseParams p;
    p.m_max = 1;
    p.lambda_min = 1.0;
    const StepwiseResult r = stepwise_reconstruct(catalog, p);
    REQUIRE(r.evaluated.size() == 2);
    CHECK(r.evaluated[0].j == 0.0);
    CHECK(r.evaluated[0].stability.lambda_d == doctest::Approx(0.5));
    CHECK(r.evaluated[0].stability.j2 == 3);
    CHECK(r.evaluated[1].j == 5.0);
    CHECK(r.evaluated[1].stability.lambda_d == doctest::Approx(1.0 / 0.49));
    CHECK(r.best.features == std::vector<std::size_t>{1});
    CHECK(r.forecast[0] == doctest::Approx((0.01 + 0.02 + 0.5 + 0.04 + 0.05) / 5.0));
    p.lambda_min = 0.0;
    CHECK(stepwise_reconstruct(catalog, p).best.features == std::vector<std::size_t>{1});
    p.lambda_min = 3.0;
    CHECK(error_code_of([&] { stepwise_reconstruct(catalog, p); }) == ErrorCode::kNoStableRegion);
  }

  TEST_CASE("stepwise gate") {
    const std::vector<FeatureSeries> catalog{{"b", {0.0, 0.01, 0.02, 0.5, 0.03, 0.04, 0.05}}};
    StepwiseParams p;
    p.m_max = 1;
    p.gate = 1e-6;
    CHECK(stepwise_reconstruct(catalog, p).gated);
  }
}
