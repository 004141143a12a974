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

#include "nlts/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "nlts/error.hpp"
#include "nlts/linfit.hpp"

namespace nlts {

std::vector<double> geometric_grid(double lo, double hi, std::size_t count) {
  require(lo > 0.0 && hi > lo && count >= 2, ErrorCode::kInvalidArgument,
          "geometric grid needs 0 < lo < hi and at least 2 points");
  std::vector<double> grid(count);
  const double ratio = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo * std::exp(ratio * static_cast<double>(i));
  grid.back() = hi;
  return grid;
}

double attractor_diameter(const DelayEmbedding& emb) {
  double s = 0.0;
  for (std::size_t d = 0; d < emb.dim(); ++d) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t r = 0; r < emb.rows(); ++r) {
      lo = std::min(lo, emb.at(r, d));
      hi = std::max(hi, emb.at(r, d));
    }
    s += (hi - lo) * (hi - lo);
  }
  return std::sqrt(s);
}

std::vector<double> default_epsilon_grid(const DelayEmbedding& emb) {
  const double diameter = attractor_diameter(emb);
  require(diameter > 0.0, ErrorCode::kDegenerate, "all embedded points coincide");
  return geometric_grid(1e-3 * diameter, diameter, 24);
}

CorrelationCurve correlation_integral(const DelayEmbedding& emb, std::span<const double> epsilons,
                                      std::size_t theiler, PairNormalization norm) {
  require(!epsilons.empty(), ErrorCode::kInvalidArgument, "empty epsilon grid");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    require(epsilons[i] > 0.0 && (i == 0 || epsilons[i] > epsilons[i - 1]), ErrorCode::kInvalidArgument,
            "epsilon grid must be positive and strictly increasing");
  }
  std::vector<double> eps2(epsilons.size());
  for (std::size_t i = 0; i < eps2.size(); ++i) eps2[i] = epsilons[i] * epsilons[i];

  const std::size_t m = emb.rows();
  const std::size_t dim = emb.dim();
  const double* pts = emb.points().data();
  // Integer counts keep the sum exact and independent of traversal order.
  std::vector<std::uint64_t> counts(epsilons.size() + 1, 0);
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = pts + i * dim;
    const std::size_t ti = emb.time(i);
    for (std::size_t j = i + 1; j < m; ++j) {
      const std::size_t tj = emb.time(j);
      if ((tj > ti ? tj - ti : ti - tj) <= theiler) continue;
      const double* b = pts + j * dim;
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = a[k] - b[k];
        d2 += d * d;
      }
      ++pairs;
      const auto it = std::lower_bound(eps2.begin(), eps2.end(), d2);
      ++counts[static_cast<std::size_t>(it - eps2.begin())];
    }
  }
  require(pairs >= 1, ErrorCode::kInsufficientData, "no admissible point pairs (Theiler window too wide?)");

  const double md = static_cast<double>(m);
  const double denom = norm == PairNormalization::kAllOrdered ? md * md : md * (md - 1.0);
  CorrelationCurve curve;
  curve.epsilons.assign(epsilons.begin(), epsilons.end());
  curve.values.resize(epsilons.size());
  curve.pair_count = static_cast<std::size_t>(2 * pairs);
  curve.points = m;
  std::uint64_t cumulative = 0;
  for (std::size_t e = 0; e < epsilons.size(); ++e) {
    cumulative += counts[e];
    curve.values[e] = 2.0 * static_cast<double>(cumulative) / denom;
  }
  return curve;
}

namespace {

DimensionEstimate fit_dimension(const std::vector<double>& log_eps, const std::vector<double>& log_num,
                                const std::vector<double>& eps,
                                std::optional<std::pair<double, double>> fit_range, const char* what) {
  std::vector<double> x, y, e;
  for (std::size_t i = 0; i < log_eps.size(); ++i) {
    if (fit_range && (eps[i] < fit_range->first || eps[i] > fit_range->second)) continue;
    x.push_back(log_eps[i]);
    y.push_back(log_num[i]);
    e.push_back(eps[i]);
  }
  std::size_t first = 0, last = 0;
  if (fit_range) {
    if (x.size() < 3) {
      fail(ErrorCode::kNoScalingRegion, std::string(what) + ": fewer than 3 usable grid points in the fit range");
    }
    last = x.size() - 1;
  } else {
    const auto window = find_scaling_window(x, y, ScalingRule{3, 0.10, 0.0});
    if (!window) {
      fail(ErrorCode::kNoScalingRegion,
           std::string(what) + ": no scaling window with < 10% slope variation; supply a fit range");
    }
    first = window->first;
    last = window->last;
  }
  const std::span<const double> xs(x.data() + first, last - first + 1);
  const std::span<const double> ys(y.data() + first, last - first + 1);
  const LineFit fit = fit_line(xs, ys);
  DimensionEstimate est;
  est.value = fit.slope;
  est.std_error = fit.slope_stderr;
  est.fit_range = {e[first], e[last]};
  for (std::size_t i = first; i <= last; ++i) est.slope_points.emplace_back(x[i], y[i]);
  return est;
}

}  // namespace

DimensionEstimate correlation_dimension(const CorrelationCurve& curve,
                                        std::optional<std::pair<double, double>> fit_range) {
  std::vector<double> log_eps, log_c, eps;
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    const double c = curve.values[i];
    if (c > 0.0 && c < 1.0) {
      log_eps.push_back(std::log2(curve.epsilons[i]));
      log_c.push_back(std::log2(c));
      eps.push_back(curve.epsilons[i]);
    }
  }
  return fit_dimension(log_eps, log_c, eps, fit_range, "correlation dimension");
}

DimensionEstimate generalized_dimension(const DelayEmbedding& emb, double q, std::span<const double> epsilons,
                                        std::optional<std::pair<double, double>> fit_range) {
  const std::size_t m = emb.rows();
  const std::size_t dim = emb.dim();
  require(m >= 2, ErrorCode::kInsufficientData, "box counting needs at least 2 points");
  std::vector<double> origin(dim, std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t d = 0; d < dim; ++d) origin[d] = std::min(origin[d], emb.at(r, d));
  }

  std::vector<double> log_eps, numer, eps_used;
  std::vector<std::int64_t> keys(m * dim);
  std::vector<std::size_t> order(m);
  bool any_split = false;
  for (const double eps : epsilons) {
    require(eps > 0.0, ErrorCode::kInvalidArgument, "box size must be positive");
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t d = 0; d < dim; ++d) {
        keys[r * dim + d] = static_cast<std::int64_t>(std::floor((emb.at(r, d) - origin[d]) / eps));
      }
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(keys.begin() + static_cast<std::ptrdiff_t>(a * dim),
                                          keys.begin() + static_cast<std::ptrdiff_t>((a + 1) * dim),
                                          keys.begin() + static_cast<std::ptrdiff_t>(b * dim),
                                          keys.begin() + static_cast<std::ptrdiff_t>((b + 1) * dim));
    });
    std::vector<std::size_t> box_counts;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= m; ++i) {
      const bool same = i < m && std::equal(keys.begin() + static_cast<std::ptrdiff_t>(order[i] * dim),
                                             keys.begin() + static_cast<std::ptrdiff_t>((order[i] + 1) * dim),
                                             keys.begin() + static_cast<std::ptrdiff_t>(order[i - 1] * dim));
      if (same) {
        ++run;
      } else {
        box_counts.push_back(run);
        run = 1;
      }
    }
    if (box_counts.size() > 1) any_split = true;
    // Skip scales where everything shares one box or every point sits alone.
    if (box_counts.size() <= 1 || box_counts.size() >= m) continue;
    const double inv = 1.0 / static_cast<double>(m);
    double value = 0.0;
    if (std::abs(q - 1.0) < 1e-12) {
      for (const std::size_t c : box_counts) {
        const double p = static_cast<double>(c) * inv;
        value += p * std::log2(p);
      }
    } else {
      double sum = 0.0;
      for (const std::size_t c : box_counts) sum += std::pow(static_cast<double>(c) * inv, q);
      value = std::log2(sum) / (q - 1.0);
    }
    log_eps.push_back(std::log2(eps));
    numer.push_back(value);
    eps_used.push_back(eps);
  }
  require(any_split, ErrorCode::kDegenerate, "all mass falls in one box at every scale");
  return fit_dimension(log_eps, numer, eps_used, fit_range, "generalized dimension");
}

double kaplan_yorke(std::span<const double> exponents) {
  require(!exponents.empty(), ErrorCode::kInvalidArgument, "Kaplan-Yorke dimension needs at least one exponent");
  for (std::size_t i = 1; i < exponents.size(); ++i) {
    require(exponents[i] <= exponents[i - 1], ErrorCode::kInvalidArgument,
            "exponents must be sorted in descending order");
  }
  if (exponents[0] < 0.0) return 0.0;
  double partial = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (partial + exponents[i] < 0.0) break;
    partial += exponents[i];
    k = i + 1;
  }
  if (k == exponents.size()) return static_cast<double>(k);
  const double next = exponents[k];
  require(next != 0.0, ErrorCode::kDegenerate, "Kaplan-Yorke ratio undefined: next exponent is zero");
  return static_cast<double>(k) + partial / std::abs(next);
}

}  // namespace nlts
