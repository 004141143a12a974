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

#include "helpers.hpp"
#include "nlts/embedding.hpp"
#include "nlts/invariants.hpp"
#include "nlts/lyapunov.hpp"
#include "nlts/neighbors.hpp"
#include "nlts/random.hpp"
#include "nlts/refsys.hpp"

using namespace nlts;
using nlts::testing::error_code_of;

namespace {

const TimeSeries& henon_series() {
  static const TimeSeries s = generate(catalog("henon"), 20000);
  return s;
}

DelayEmbedding henon_embedding() { return embed(TimeSeries::scalar(henon_series().channel(0)), 2, 1); }

DelayEmbedding limit_cycle() { return embed(TimeSeries::scalar(nlts::testing::sine(8000, 10.0 * M_PI)), 2, 3); }

}  // namespace

TEST_SUITE("lyapunov") {
  TEST_CASE("linear map spectrum is analytic") {
    Eigen::MatrixXd a(2, 2);
    a << 2.0, 0.0, 0.0, 0.5;
    BenettinExactParams p;
    p.steps = 200;
    p.transient = 10;
    p.x0 = Eigen::VectorXd::Ones(2);
    const LyapunovSpectrum s = benettin_spectrum(linear_map(a), p);
    REQUIRE(s.exponents.size() == 2);
    CHECK(std::abs(s.exponents[0] - std::log(2.0)) < 1e-10);
    CHECK(std::abs(s.exponents[1] + std::log(2.0)) < 1e-10);
  }

  TEST_CASE("constant-Jacobian maps give eigen-log-moduli for any renormalization interval") {
    Eigen::MatrixXd a(3, 3);
    a << 1.2, 0.3, 0.0, 0.0, 0.7, 0.1, 0.0, 0.0, 0.3;
    Eigen::EigenSolver<Eigen::MatrixXd> es(a);
    std::vector<double> expect;
    for (Eigen::Index i = 0; i < 3; ++i) expect.push_back(std::log(std::abs(es.eigenvalues()[i])));
    std::sort(expect.begin(), expect.end(), std::greater<>());
    for (std::size_t interval : {1, 5, 10}) {
      BenettinExactParams p;
      p.steps = 2000;
      p.transient = 200;
      p.renorm_interval = interval;
      p.x0 = Eigen::VectorXd::Ones(3);
      const LyapunovSpectrum s = benettin_spectrum(linear_map(a), p);
      for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(s.exponents[i] - expect[i]) < 1e-8);
    }
  }

  TEST_CASE("Henon exact spectrum") {
    BenettinExactParams p;
    p.steps = 100000;
    const LyapunovSpectrum s = benettin_spectrum(catalog("henon"), p);
    CHECK(s.exponents[0] == doctest::Approx(0.419).epsilon(0.01 / 0.419));
    CHECK(std::abs(s.exponents[0] + s.exponents[1] - std::log(0.3)) < 1e-6);
    CHECK(s.method == "benettin-exact");
  }

  TEST_CASE("sampling a flow more coarsely scales per-sample exponents") {
    Eigen::MatrixXd b(2, 2);
    b << 0.05, 0.0, 0.0, -0.2;
    BenettinExactParams p;
    p.steps = 4000;
    p.transient = 10;
    p.x0 = Eigen::VectorXd::Ones(2);
    p.dt = 0.01;
    const LyapunovSpectrum fine = benettin_spectrum(linear_flow(b), p);
    p.dt = 0.05;
    const LyapunovSpectrum coarse = benettin_spectrum(linear_flow(b), p);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(coarse.exponents[i] == doctest::Approx(5.0 * fine.exponents[i]).epsilon(0.02));
    }
    CHECK(fine.per_time()[0] == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(fine.per_time()[1] == doctest::Approx(-0.2).epsilon(1e-6));
  }

  TEST_CASE("orthonormalize agrees with a Householder QR") {
    Rng rng(31);
    Eigen::MatrixXd v(5, 3);
    for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = rng.normal();
    const Eigen::MatrixXd original = v;
    const Eigen::VectorXd norms = orthonormalize(v);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(original);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(norms[i] == doctest::Approx(std::abs(r(i, i))).epsilon(1e-12));
    CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(3, 2);
    CHECK(error_code_of([&] { orthonormalize(zero); }) == ErrorCode::kDivergence);
  }

  TEST_CASE("data-driven estimators on Henon") {
    const DelayEmbedding e = henon_embedding();
    const NeighborIndex idx(e, default_theiler(e));
    const WolfResult w = wolf_lambda1(e, idx);
    CHECK(w.lambda1 == doctest::Approx(0.419).epsilon(0.06 / 0.419));
    CHECK(w.replacements >= 10);
    const DivergenceCurve ro = rosenstein_curve(e, idx);
    CHECK(ro.slope == doctest::Approx(0.42).epsilon(0.06 / 0.42));
    KantzParams kp;
    kp.eps0 = 0.02 * attractor_diameter(e);
    const DivergenceCurve ka = kantz_curve(e, idx, kp);
    CHECK(ka.slope == doctest::Approx(0.42).epsilon(0.06 / 0.42));
    CHECK(std::abs(ro.slope - ka.slope) <= std::max(0.005, 0.3 * std::max(ro.slope, ka.slope)));
    BenettinDataParams bp;
    const LyapunovSpectrum bd = benettin_spectrum(e, idx, bp);
    CHECK(bd.exponents[0] == doctest::Approx(0.419).epsilon(0.06 / 0.419));
    CHECK(bd.method == "benettin-data");
  }

  TEST_CASE("Wolf in bits") {
    const DelayEmbedding e = henon_embedding();
    const NeighborIndex idx(e, default_theiler(e));
    WolfParams p;
    const double nats = wolf_lambda1(e, idx, p).lambda1;
    p.base = LogBase::kBinary;
    CHECK(wolf_lambda1(e, idx, p).lambda1 == doctest::Approx(nats / std::log(2.0)).epsilon(1e-12));
  }

  TEST_CASE("limit cycle has no divergence") {
    const DelayEmbedding e = limit_cycle();
    const NeighborIndex idx(e, default_theiler(e));
    CHECK(std::abs(rosenstein_curve(e, idx).slope) < 0.005);
    KantzParams kp;
    kp.eps0 = 0.05;
    CHECK(std::abs(kantz_curve(e, idx, kp).slope) < 0.005);
    CHECK(std::abs(wolf_lambda1(e, idx).lambda1) < 0.005);
  }

  TEST_CASE("Wolf needs enough replacements") {
    const std::vector<double> x = henon_series().channel(0);
    const DelayEmbedding small = embed(TimeSeries::scalar(std::vector<double>(x.begin(), x.begin() + 40)), 2, 1);
    const NeighborIndex sidx(small, 2);
    WolfParams p;
    p.min_replacements = 1000;
    CHECK(error_code_of([&] { wolf_lambda1(small, sidx, p); }) == ErrorCode::kInsufficientData);
  }

  TEST_CASE("Kantz radius below the closest pair") {
    const DelayEmbedding e = henon_embedding();
    const NeighborIndex idx(e, default_theiler(e));
    KantzParams kp;
    kp.eps0 = 1e-12;
    try {
      kantz_curve(e, idx, kp);
      FAIL("expected an error");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::kInsufficientData);
      CHECK(std::string(err.what()).find("eps0") != std::string::npos);
    }
  }

  TEST_CASE("horizon longer than the data") {
    const DelayEmbedding e = embed(TimeSeries::scalar(nlts::testing::sine(30, 7.1)), 2, 1);
    const NeighborIndex idx(e, 1);
    RosensteinParams p;
    p.horizon = 100;
    CHECK(error_code_of([&] { rosenstein_curve(e, idx, p); }) == ErrorCode::kTooShort);
  }

  TEST_CASE("rank-deficient neighborhoods are singular") {
    const DelayEmbedding e = embed(TimeSeries::scalar(nlts::testing::sine(3000, 41.7)), 3, 2);
    const NeighborIndex idx(e, default_theiler(e));
    BenettinDataParams p;
    p.steps = 100;
    try {
      benettin_spectrum(e, idx, p);
      FAIL("expected a singular regression");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::kSingular);
      CHECK(std::string(err.what()).find("row") != std::string::npos);
    }
  }

  TEST_CASE("manual fit window") {
    DivergenceCurve c;
    for (std::size_t h = 0; h <= 10; ++h) {
      c.horizons.push_back(h);
      c.values.push_back(h < 5 ? 0.5 * static_cast<double>(h) : 2.0);
    }
    CurveFitOptions o;
    o.window = std::make_pair(std::size_t{0}, std::size_t{4});
    fit_divergence_slope(c, o);
    CHECK(c.slope == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("spectrum checks") {
    LyapunovSpectrum flow;
    flow.exponents = {0.9, 0.0, -14.5};
    const SpectrumChecks a = spectrum_checks(flow, SystemKind::kFlow);
    CHECK(a.zero_exponent_required);
    CHECK(a.has_zero_exponent);
    CHECK(a.dissipative);
    CHECK(a.entropy_bound == doctest::Approx(0.9));
    LyapunovSpectrum map;
    map.exponents = {0.419, -1.623};
    const SpectrumChecks b = spectrum_checks(map, SystemKind::kMap);
    CHECK_FALSE(b.zero_exponent_required);
    CHECK(b.sum < 0.0);
    CHECK(b.dissipative);
    LyapunovSpectrum expanding;
    expanding.exponents = {0.1, 0.1, 0.1};
    CHECK_FALSE(spectrum_checks(expanding, SystemKind::kFlow).dissipative);
  }
}
