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

#include "nlts/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "nlts/error.hpp"
#include "nlts/invariants.hpp"
#include "nlts/linfit.hpp"

namespace nlts {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<double> LyapunovSpectrum::per_time() const {
  std::vector<double> out(exponents);
  for (double& v : out) v /= dt;
  return out;
}

namespace {

double separation(const DelayEmbedding& emb, std::size_t a, std::size_t b) { return euclidean(emb.row(a), emb.row(b)); }

double cosine(const DelayEmbedding& emb, std::size_t origin, std::size_t a, std::size_t b) {
  const auto o = emb.row(origin), pa = emb.row(a), pb = emb.row(b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < o.size(); ++k) {
    const double u = pa[k] - o[k], v = pb[k] - o[k];
    dot += u * v;
    na += u * u;
    nb += v * v;
  }
  if (na == 0.0 || nb == 0.0) return -1.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace

WolfResult wolf_lambda1(const DelayEmbedding& emb, const NeighborIndex& idx, const WolfParams& params) {
  require(params.evolve_steps >= 1, ErrorCode::kInvalidArgument, "wolf: evolve_steps must be at least 1");
  const std::size_t rows = emb.rows();
  const std::size_t evolve = params.evolve_steps;
  const double max_len = params.max_len > 0.0 ? params.max_len : 0.1 * attractor_diameter(emb);
  const double log_scale = params.base == LogBase::kBinary ? 1.0 / std::log(2.0) : 1.0;

  auto usable = [&](std::size_t fiducial) {
    return [&, fiducial](std::size_t r) {
      return r + evolve < rows && separation(emb, r, fiducial) > params.min_len;
    };
  };
  auto nearest = [&](std::size_t fiducial) -> std::optional<std::size_t> {
    try {
      return idx.knn(fiducial, 1, usable(fiducial)).front().row;
    } catch (const Error&) {
      return std::nullopt;
    }
  };

  // Replacement: nearest candidate whose direction matches the evolved
  // separation; plain nearest when none qualifies.
  auto replace = [&](std::size_t fiducial, std::size_t evolved) -> std::optional<std::size_t> {
    std::vector<Neighbor> pool;
    try {
      pool = idx.knn(fiducial, params.candidates, usable(fiducial));
    } catch (const Error&) {
      const auto fallback = nearest(fiducial);
      if (!fallback) return std::nullopt;
      pool = {{*fallback, separation(emb, *fallback, fiducial)}};
    }
    for (const auto& cand : pool) {
      if (cand.distance <= max_len && cosine(emb, fiducial, evolved, cand.row) >= params.angle_tol) return cand.row;
    }
    return pool.front().row;
  };

  WolfResult result;
  std::size_t fiducial = 0;
  auto neighbor = nearest(fiducial);
  require(neighbor.has_value(), ErrorCode::kInsufficientData, "wolf: no admissible neighbor for the first point");
  double sum = 0.0;
  while (fiducial + evolve < rows) {
    const std::size_t j = *neighbor;
    const double before = separation(emb, fiducial, j);
    const std::size_t next_f = fiducial + evolve, next_j = j + evolve;
    const double after = separation(emb, next_f, next_j);
    if (before > 0.0 && after > 0.0) {
      sum += std::log(after / before);
      result.steps += evolve;
      ++result.segments;
    }
    fiducial = next_f;
    if (fiducial + evolve >= rows) break;
    const bool grown = params.replace_on_growth && after > before;
    if (after > max_len || grown || after == 0.0 || next_j + evolve >= rows) {
      neighbor = replace(fiducial, next_j);
      if (!neighbor) break;
      ++result.replacements;
    } else {
      neighbor = next_j;
    }
  }
  if (result.replacements < params.min_replacements) {
    fail(ErrorCode::kInsufficientData, "wolf: only " + std::to_string(result.replacements) +
                                           " neighbor replacements; at least " +
                                           std::to_string(params.min_replacements) + " required");
  }
  require(result.steps > 0, ErrorCode::kInsufficientData, "wolf: no usable evolution segments");
  result.lambda1 = log_scale * sum / static_cast<double>(result.steps);
  return result;
}

void fit_divergence_slope(DivergenceCurve& curve, const CurveFitOptions& options) {
  std::vector<double> x(curve.horizons.begin(), curve.horizons.end());
  const std::vector<double>& y = curve.values;
  std::size_t first = 0, last = 0;
  if (options.window) {
    const auto [lo, hi] = *options.window;
    require(lo < hi && hi < x.size(), ErrorCode::kInvalidArgument, "manual fit window outside the curve");
    first = lo;
    last = hi;
  } else {
    const auto window =
        find_scaling_window(x, y, ScalingRule{options.min_points, options.relative_tolerance, options.absolute_floor});
    if (!window) {
      fail(ErrorCode::kNoScalingRegion, "no linear region found in the divergence curve; set a manual window");
    }
    first = window->first;
    last = window->last;
  }
  const LineFit fit = fit_line(std::span<const double>(x.data() + first, last - first + 1),
                               std::span<const double>(y.data() + first, last - first + 1));
  curve.slope = fit.slope;
  curve.slope_stderr = fit.slope_stderr;
  curve.fit_window = {curve.horizons[first], curve.horizons[last]};
}

DivergenceCurve rosenstein_curve(const DelayEmbedding& emb, const NeighborIndex& idx,
                                 const RosensteinParams& params) {
  const std::size_t rows = emb.rows();
  const std::size_t h = params.horizon;
  require(h >= 1, ErrorCode::kInvalidArgument, "rosenstein: horizon must be at least 1");
  require(h < rows, ErrorCode::kTooShort, "rosenstein: horizon exceeds the data length");
  const std::size_t stride = std::max<std::size_t>(1, params.reference_stride);

  std::vector<double> sums(h + 1, 0.0);
  std::vector<std::size_t> counts(h + 1, 0);
  for (std::size_t j = 0; j + h < rows; j += stride) {
    std::vector<Neighbor> nn;
    try {
      nn = idx.knn(j, 1, [&](std::size_t r) { return r + h < rows && separation(emb, r, j) > 0.0; });
    } catch (const Error&) {
      continue;
    }
    const std::size_t jn = nn.front().row;
    for (std::size_t i = 0; i <= h; ++i) {
      const double d = separation(emb, j + i, jn + i);
      if (d > 0.0) {
        sums[i] += std::log(d);
        ++counts[i];
      }
    }
  }
  DivergenceCurve curve;
  for (std::size_t i = 0; i <= h; ++i) {
    if (counts[i] == 0) continue;
    curve.horizons.push_back(i);
    curve.values.push_back(sums[i] / static_cast<double>(counts[i]));
  }
  require(curve.horizons.size() >= 2, ErrorCode::kInsufficientData,
          "rosenstein: no reference point has a neighbor with the full horizon");
  fit_divergence_slope(curve, params.fit);
  return curve;
}

DivergenceCurve kantz_curve(const DelayEmbedding& emb, const NeighborIndex& idx, const KantzParams& params) {
  const std::size_t rows = emb.rows();
  const std::size_t h = params.horizon;
  require(params.eps0 > 0.0, ErrorCode::kInvalidArgument, "kantz: eps0 must be positive");
  require(h >= 1, ErrorCode::kInvalidArgument, "kantz: horizon must be at least 1");
  require(h < rows, ErrorCode::kTooShort, "kantz: horizon exceeds the data length");
  const std::size_t stride = std::max<std::size_t>(1, params.reference_stride);

  std::vector<double> sums(h + 1, 0.0);
  std::vector<std::size_t> counts(h + 1, 0);
  std::size_t populated = 0;
  std::vector<double> spread(h + 1);
  for (std::size_t j = 0; j + h < rows; j += stride) {
    const auto hood = idx.within(j, params.eps0, [&](std::size_t r) { return r + h < rows; });
    if (hood.empty()) continue;
    ++populated;
    std::fill(spread.begin(), spread.end(), 0.0);
    for (const auto& nb : hood) {
      for (std::size_t i = 0; i <= h; ++i) spread[i] += separation(emb, j + i, nb.row + i);
    }
    for (std::size_t i = 0; i <= h; ++i) {
      const double mean = spread[i] / static_cast<double>(hood.size());
      if (mean > 0.0) {
        sums[i] += std::log(mean);
        ++counts[i];
      }
    }
  }
  if (populated == 0) {
    fail(ErrorCode::kInsufficientData,
         "kantz: no reference point has a neighbor within eps0; try a larger eps0");
  }
  DivergenceCurve curve;
  for (std::size_t i = 0; i <= h; ++i) {
    if (counts[i] == 0) continue;
    curve.horizons.push_back(i);
    curve.values.push_back(sums[i] / static_cast<double>(counts[i]));
  }
  require(curve.horizons.size() >= 2, ErrorCode::kInsufficientData, "kantz: divergence curve is empty");
  fit_divergence_slope(curve, params.fit);
  return curve;
}

VectorXd orthonormalize(MatrixXd& vectors) {
  const Eigen::Index n = vectors.cols();
  VectorXd norms(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      vectors.col(i) -= vectors.col(j).dot(vectors.col(i)) * vectors.col(j);
    }
    const double norm = vectors.col(i).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      fail(ErrorCode::kDivergence, "tangent vector " + std::to_string(i + 1) + " collapsed or diverged");
    }
    vectors.col(i) /= norm;
    norms[i] = norm;
  }
  return norms;
}

namespace {

/// Shared propagate / re-orthonormalize / accumulate loop. `advance(k, Q)`
/// maps the tangent frame through step k.
LyapunovSpectrum run_benettin(std::size_t dim, const BenettinParams& params, const std::string& method, double dt,
                              const std::function<void(std::size_t, MatrixXd&)>& advance) {
  const std::size_t n_exp = params.n_exp == 0 ? dim : params.n_exp;
  require(n_exp >= 1 && n_exp <= dim, ErrorCode::kInvalidArgument,
          "benettin: n_exp must be between 1 and the state dimension");
  require(params.steps >= 1, ErrorCode::kInvalidArgument, "benettin: steps must be positive");
  const std::size_t interval = std::max<std::size_t>(1, params.renorm_interval);

  MatrixXd frame = MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n_exp));
  VectorXd sigma = VectorXd::Zero(static_cast<Eigen::Index>(n_exp));
  for (std::size_t k = 0; k < params.steps; ++k) {
    advance(k, frame);
    if ((k + 1) % interval == 0 || k + 1 == params.steps) {
      if (!frame.allFinite()) fail(ErrorCode::kDivergence, "benettin: tangent growth overflowed at step " + std::to_string(k));
      sigma += orthonormalize(frame).array().log().matrix();
    }
  }
  LyapunovSpectrum spectrum;
  spectrum.method = method;
  spectrum.horizon = params.steps;
  spectrum.dt = dt;
  spectrum.exponents.resize(n_exp);
  for (std::size_t i = 0; i < n_exp; ++i) {
    spectrum.exponents[i] = sigma[static_cast<Eigen::Index>(i)] / static_cast<double>(params.steps);
    require(std::isfinite(spectrum.exponents[i]), ErrorCode::kDivergence, "benettin: non-finite exponent");
  }
  std::sort(spectrum.exponents.begin(), spectrum.exponents.end(), std::greater<>());
  return spectrum;
}

}  // namespace

LyapunovSpectrum benettin_spectrum(const DelayEmbedding& emb, const NeighborIndex& idx,
                                   const BenettinDataParams& params) {
  const std::size_t dim = emb.dim();
  const std::size_t rows = emb.rows();
  const std::size_t n_exp = params.n_exp == 0 ? dim : params.n_exp;
  const std::size_t k = params.k_neighbors == 0 ? 2 * dim + 1 : params.k_neighbors;
  require(k >= n_exp + 1, ErrorCode::kInvalidArgument, "benettin: k_neighbors must be at least n_exp + 1");
  require(k >= dim, ErrorCode::kInvalidArgument, "benettin: k_neighbors must be at least the state dimension");
  require(params.start_row + params.steps < rows, ErrorCode::kTooShort,
          "benettin: start_row + steps exceeds the embedding length");

  const auto d = static_cast<Eigen::Index>(dim);
  MatrixXd disp(static_cast<Eigen::Index>(k), d), image(static_cast<Eigen::Index>(k), d);
  auto advance = [&](std::size_t step, MatrixXd& frame) {
    const std::size_t r = params.start_row + step;
    const auto hood = idx.knn(r, k, [&](std::size_t c) { return c + 1 < rows; });
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t c = hood[i].row;
      for (Eigen::Index col = 0; col < d; ++col) {
        disp(static_cast<Eigen::Index>(i), col) = emb.at(c, static_cast<std::size_t>(col)) - emb.at(r, static_cast<std::size_t>(col));
        image(static_cast<Eigen::Index>(i), col) =
            emb.at(c + 1, static_cast<std::size_t>(col)) - emb.at(r + 1, static_cast<std::size_t>(col));
      }
    }
    // image = disp * J^T  =>  J^T = disp^+ image
    Eigen::ColPivHouseholderQR<MatrixXd> qr(disp);
    qr.setThreshold(1e-10);
    if (qr.rank() < d) {
      fail(ErrorCode::kSingular, "benettin: neighborhood of row " + std::to_string(r) +
                                     " is rank-deficient (rank " + std::to_string(qr.rank()) + ")");
    }
    const MatrixXd jt = qr.solve(image);
    frame = jt.transpose() * frame;
  };
  BenettinParams base = params;
  base.n_exp = n_exp;
  return run_benettin(dim, base, "benettin-data", emb.source_dt(), advance);
}

LyapunovSpectrum benettin_spectrum(const ReferenceSystem& sys, const BenettinExactParams& params) {
  const std::size_t dim = sys.dimension;
  VectorXd x = params.x0.value_or(sys.default_state);
  require(static_cast<std::size_t>(x.size()) == dim, ErrorCode::kShapeMismatch, "benettin: x0 has wrong dimension");
  const bool flow = sys.kind == SystemKind::kFlow;
  const double dt = flow ? params.dt.value_or(sys.default_dt) : 1.0;
  require(dt > 0.0, ErrorCode::kInvalidArgument, "benettin: dt must be positive");

  double t = 0.0;
  // Variational RK4: (x, Q) with dQ/dt = J(x, t) Q.
  auto flow_step = [&](MatrixXd& frame) {
    auto rhs = [&](const VectorXd& xs, const MatrixXd& q, double ts, VectorXd& dx, MatrixXd& dq) {
      dx = sys.evaluate(xs, ts);
      dq = sys.jacobian(xs, ts) * q;
    };
    VectorXd k1x, k2x, k3x, k4x;
    MatrixXd k1q, k2q, k3q, k4q;
    rhs(x, frame, t, k1x, k1q);
    rhs(x + 0.5 * dt * k1x, frame + 0.5 * dt * k1q, t + 0.5 * dt, k2x, k2q);
    rhs(x + 0.5 * dt * k2x, frame + 0.5 * dt * k2q, t + 0.5 * dt, k3x, k3q);
    rhs(x + dt * k3x, frame + dt * k3q, t + dt, k4x, k4q);
    x += (dt / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    frame += (dt / 6.0) * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    t += dt;
  };
  auto map_step = [&](MatrixXd& frame) {
    frame = sys.jacobian(x, t) * frame;
    x = sys.evaluate(x, t);
    t += 1.0;
  };
  auto step = [&](MatrixXd& frame) {
    if (flow) {
      flow_step(frame);
    } else {
      map_step(frame);
    }
    if (!x.allFinite()) fail(ErrorCode::kDivergence, "benettin: trajectory of " + sys.name + " diverged");
  };

  const std::size_t n_exp = params.n_exp == 0 ? dim : params.n_exp;
  // Transient: settle the orbit and align the frame without accumulating.
  MatrixXd warm = MatrixXd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n_exp));
  for (std::size_t k = 0; k < params.transient; ++k) {
    step(warm);
    orthonormalize(warm);
  }
  bool first = true;
  auto advance = [&](std::size_t, MatrixXd& frame) {
    if (first) {
      frame = warm;
      first = false;
    }
    step(frame);
  };
  return run_benettin(dim, params, "benettin-exact", dt, advance);
}

SpectrumChecks spectrum_checks(const LyapunovSpectrum& spectrum, SystemKind kind, double zero_tolerance) {
  SpectrumChecks checks;
  checks.zero_exponent_required = kind == SystemKind::kFlow;
  for (const double v : spectrum.exponents) {
    checks.sum += v;
    if (std::abs(v) < zero_tolerance) checks.has_zero_exponent = true;
    if (v > 0.0) checks.entropy_bound += v;
  }
  checks.dissipative = checks.sum < 0.0;
  return checks;
}

}  // namespace nlts
