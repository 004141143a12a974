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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nlts/embedding.hpp"
#include "nlts/neighbors.hpp"
#include "nlts/refsys.hpp"

namespace nlts {

/// Exponents in descending order, per sample; `dt` converts to per time unit.
struct LyapunovSpectrum {
  std::vector<double> exponents;
  std::string method;
  std::size_t horizon = 0;
  double dt = 1.0;

  std::vector<double> per_time() const;
};

/// Mean log-divergence against step offset, with the fitted slope.
struct DivergenceCurve {
  std::vector<std::size_t> horizons;
  std::vector<double> values;
  double slope = 0.0;
  double slope_stderr = 0.0;
  std::pair<std::size_t, std::size_t> fit_window{0, 0};
};

enum class LogBase { kNatural, kBinary };

struct WolfParams {
  std::size_t evolve_steps = 1;
  /// Replacement threshold on the evolved separation; <= 0 selects 10% of
  /// the attractor diameter.
  double max_len = 0.0;
  /// Candidates closer than this are ignored (noise floor).
  double min_len = 0.0;
  /// Minimum cosine between the old and the new separation direction.
  double angle_tol = 0.8;
  /// Replace the neighbor whenever the separation grew over a segment, not
  /// only when it exceeded max_len.
  bool replace_on_growth = true;
  /// Candidate pool examined for the direction constraint.
  std::size_t candidates = 16;
  LogBase base = LogBase::kNatural;
  std::size_t min_replacements = 10;
};

struct WolfResult {
  double lambda1 = 0.0;  // per sample
  std::size_t replacements = 0;
  std::size_t segments = 0;
  std::size_t steps = 0;
};

WolfResult wolf_lambda1(const DelayEmbedding& emb, const NeighborIndex& idx, const WolfParams& params = {});

struct CurveFitOptions {
  /// Manual fit window (inclusive step offsets); automatic when empty.
  std::optional<std::pair<std::size_t, std::size_t>> window;
  std::size_t min_points = 5;
  double relative_tolerance = 0.10;
  /// Fallback spread accepted for flat curves (per sample).
  double absolute_floor = 1e-3;
};

struct RosensteinParams {
  std::size_t horizon = 20;
  std::size_t reference_stride = 1;
  CurveFitOptions fit;
};

DivergenceCurve rosenstein_curve(const DelayEmbedding& emb, const NeighborIndex& idx,
                                 const RosensteinParams& params = {});

struct KantzParams {
  double eps0 = 0.0;
  std::size_t horizon = 20;
  std::size_t reference_stride = 1;
  CurveFitOptions fit;
};

DivergenceCurve kantz_curve(const DelayEmbedding& emb, const NeighborIndex& idx, const KantzParams& params);

/// Fits the slope of an existing curve under the same window rule.
void fit_divergence_slope(DivergenceCurve& curve, const CurveFitOptions& options);

struct BenettinParams {
  std::size_t n_exp = 0;  // 0: full state dimension
  std::size_t steps = 10000;
  std::size_t renorm_interval = 1;
};

struct BenettinDataParams : BenettinParams {
  std::size_t k_neighbors = 0;  // 0: 2 * dim + 1
  std::size_t start_row = 0;
};

struct BenettinExactParams : BenettinParams {
  std::optional<Eigen::VectorXd> x0;
  std::optional<double> dt;  // flows: sampling step
  std::size_t transient = 1000;
};

/// Spectrum from Jacobians estimated by local least squares on neighbor
/// displacements.
LyapunovSpectrum benettin_spectrum(const DelayEmbedding& emb, const NeighborIndex& idx,
                                   const BenettinDataParams& params);

/// Spectrum from the analytic Jacobian of a reference system.
LyapunovSpectrum benettin_spectrum(const ReferenceSystem& sys, const BenettinExactParams& params);

/// In-place modified Gram-Schmidt on the columns; returns the norms removed
/// (the diagonal of R in Q R).
Eigen::VectorXd orthonormalize(Eigen::MatrixXd& vectors);

struct SpectrumChecks {
  bool zero_exponent_required = false;
  bool has_zero_exponent = false;
  bool dissipative = false;
  double sum = 0.0;
  /// Upper bound on the Kolmogorov-Sinai entropy: sum of positive exponents.
  double entropy_bound = 0.0;
};

SpectrumChecks spectrum_checks(const LyapunovSpectrum& spectrum, SystemKind kind, double zero_tolerance = 0.005);

}  // namespace nlts
