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

#include "nlts/linfit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlts/error.hpp"

namespace nlts {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::kShapeMismatch, "fit_line: x and y differ in length");
  const std::size_t n = x.size();
  require(n >= 2, ErrorCode::kInsufficientData, "fit_line: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorCode::kDegenerate, "fit_line: all x values coincide");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (n > 2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      sse += r * r;
    }
    fit.slope_stderr = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  }
  return fit;
}

namespace {

std::optional<IndexWindow> scan(const std::vector<double>& slopes, std::size_t min_points, double rel,
                                 double abs_floor) {
  std::optional<IndexWindow> best;
  const std::size_t npts = slopes.size() + 1;
  if (npts < min_points || min_points < 2) return best;
  for (std::size_t a = 0; a + min_points <= npts; ++a) {
    double lo = slopes[a], hi = slopes[a], sum = 0.0;
    for (std::size_t b = a + 1; b < npts; ++b) {
      const double s = slopes[b - 1];
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      sum += s;
      const double mean = sum / static_cast<double>(b - a);
      const bool ok = rel > 0.0 ? (hi - lo) <= rel * std::abs(mean) : (hi - lo) <= abs_floor;
      if (!ok) {
        if (rel > 0.0) continue;  // the mean may still grow; the spread cannot shrink
        break;
      }
      const std::size_t len = b - a + 1;
      if (len >= min_points && (!best || len > best->size())) best = IndexWindow{a, b};
    }
  }
  return best;
}

}  // namespace

std::optional<IndexWindow> find_scaling_window(std::span<const double> x, std::span<const double> y,
                                               const ScalingRule& rule) {
  require(x.size() == y.size(), ErrorCode::kShapeMismatch, "scaling window: x and y differ in length");
  if (x.size() < 2) return std::nullopt;
  std::vector<double> slopes(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) slopes[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  auto best = scan(slopes, rule.min_points, rule.relative_tolerance, 0.0);
  if (!best && rule.absolute_floor > 0.0) best = scan(slopes, rule.min_points, 0.0, rule.absolute_floor);
  return best;
}

}  // namespace nlts
