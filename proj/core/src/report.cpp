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

#include "nlts/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace nlts {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

std::string format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double round_significant(double v, int digits) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
  return std::strtod(buf, nullptr);
}

json rounded(const json& j, int digits) {
  switch (j.type()) {
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) return nullptr;
      return round_significant(v, digits);
    }
    case json::value_t::array: {
      json out = json::array();
      for (const auto& e : j) out.push_back(rounded(e, digits));
      return out;
    }
    case json::value_t::object: {
      json out = json::object();
      for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = rounded(it.value(), digits);
      return out;
    }
    default:
      return j;
  }
}

json to_json(std::span<const MutualInformationPoint> profile) {
  json taus = json::array(), mis = json::array();
  for (const auto& p : profile) {
    taus.push_back(p.tau);
    mis.push_back(p.mi);
  }
  return {{"tau", taus}, {"mi", mis}};
}

json to_json(const CorrelationCurve& curve) {
  return {{"epsilons", curve.epsilons}, {"values", curve.values}, {"pair_count", curve.pair_count},
          {"points", curve.points}};
}

json to_json(const DimensionEstimate& estimate) {
  json pts = json::array();
  for (const auto& [x, y] : estimate.slope_points) pts.push_back({x, y});
  return {{"value", estimate.value},
          {"std_error", estimate.std_error},
          {"fit_range", {estimate.fit_range.first, estimate.fit_range.second}},
          {"points", pts}};
}

json to_json(const LyapunovSpectrum& spectrum) {
  return {{"method", spectrum.method},
          {"exponents", spectrum.exponents},
          {"exponents_per_time", spectrum.per_time()},
          {"dt", spectrum.dt},
          {"steps", spectrum.horizon}};
}

json to_json(const DivergenceCurve& curve) {
  return {{"horizons", curve.horizons},
          {"values", curve.values},
          {"slope", curve.slope},
          {"slope_stderr", curve.slope_stderr},
          {"fit_window", {curve.fit_window.first, curve.fit_window.second}}};
}

json to_json(const WolfResult& result) {
  return {{"lambda1", result.lambda1},
          {"replacements", result.replacements},
          {"segments", result.segments},
          {"steps", result.steps}};
}

json to_json(const SpectrumChecks& checks) {
  return {{"zero_exponent_required", checks.zero_exponent_required},
          {"has_zero_exponent", checks.has_zero_exponent},
          {"dissipative", checks.dissipative},
          {"sum", checks.sum},
          {"entropy_bound", checks.entropy_bound}};
}

json to_json(const LocalStability& stability) {
  return {{"lambda_D", stability.lambda_d},
          {"lambda_D_infinite", std::isinf(stability.lambda_d)},
          {"J1", stability.j1},
          {"J2", stability.j2}};
}

json to_json(const StepwiseResult& result) {
  auto names = [&](const std::vector<std::size_t>& idx) {
    json out = json::array();
    for (std::size_t i : idx) out.push_back(result.feature_names[i]);
    return out;
  };
  json evaluated = json::array();
  for (const auto& cfg : result.evaluated) {
    evaluated.push_back({{"m", cfg.m}, {"tau", cfg.tau}, {"features", names(cfg.features)},
                         {"stability", to_json(cfg.stability)}, {"J", cfg.j}});
  }
  return {{"config", {{"m", result.best.m}, {"tau", result.best.tau}, {"features", names(result.best.features)}}},
          {"lambda_D", result.best.stability.lambda_d},
          {"lambda_D_infinite", std::isinf(result.best.stability.lambda_d)},
          {"J", result.best.j},
          {"forecast", vec(result.forecast)},
          {"gated", result.gated},
          {"e_psi", result.e_psi},
          {"evaluated", evaluated}};
}

json to_json(const SymmetryDescriptors& d) {
  return {{"translate", vec(d.translate)}, {"scale", d.scale}, {"rotate", d.rotate}};
}

json to_json(const SymmetryReport& report) {
  return {{"delta_translate", vec(report.delta_translate)},
          {"delta_scale", report.delta_scale},
          {"delta_rotate", report.delta_rotate},
          {"closeness", report.closeness},
          {"self_closeness", report.self_closeness}};
}

std::string mi_profile_to_csv(std::span<const MutualInformationPoint> profile) {
  std::string out = "tau,mi\n";
  for (const auto& p : profile) out += std::to_string(p.tau) + "," + format(p.mi) + "\n";
  return out;
}

std::string correlation_curve_to_csv(const CorrelationCurve& curve) {
  std::string out = "epsilon,c\n";
  for (std::size_t i = 0; i < curve.epsilons.size(); ++i) {
    out += format(curve.epsilons[i]) + "," + format(curve.values[i]) + "\n";
  }
  return out;
}

std::string divergence_curve_to_csv(const DivergenceCurve& curve) {
  std::string out = "step,log_divergence\n";
  for (std::size_t i = 0; i < curve.horizons.size(); ++i) {
    out += std::to_string(curve.horizons[i]) + "," + format(curve.values[i]) + "\n";
  }
  return out;
}

}  // namespace nlts
