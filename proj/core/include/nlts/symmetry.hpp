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
#include <vector>

#include <Eigen/Dense>

namespace nlts {

/// Closed loop of m points in n dimensions; row m-1 is adjacent to row 0.
class Contour {
 public:
  /// Requires m >= 3, n >= 2 and finite entries.
  explicit Contour(Eigen::MatrixXd points);

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }
  const Eigen::MatrixXd& points() const { return points_; }

 private:
  Eigen::MatrixXd points_;
};

/// Row k holds harmonic k of every dimension: s(k, d) = sum_p x(p, d)
/// exp(-2 pi i k p / m). The inverse carries the 1/m factor.
struct ContourSpectrum {
  Eigen::MatrixXcd coeffs;

  std::size_t size() const { return static_cast<std::size_t>(coeffs.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(coeffs.cols()); }
};

ContourSpectrum dft_contour(const Contour& contour);
/// Real part of the inverse transform.
Eigen::MatrixXd idft_contour(const ContourSpectrum& spectrum);

struct SymmetryDescriptors {
  Eigen::VectorXd translate;    // zeroth harmonic, m times the centroid
  double scale = 0.0;           // length of the first harmonic
  std::vector<double> rotate;   // n - 1 angles in [0, 2 pi)
};

/// Angle k (planes (k, k+1), 0-based) is the direction of the real part of
/// the first harmonic within that plane, measured from axis k. Throws
/// kDegenerate when the first harmonic vanishes.
SymmetryDescriptors descriptors(const ContourSpectrum& spectrum);

/// Identity except the block [[cos(-a), sin(-a)], [-sin(-a), cos(-a)]] on
/// rows/columns (k, k+1), 0-based; multiplies spectra from the right.
Eigen::MatrixXd plane_rotation(std::size_t n, std::size_t k, double angle);

struct NormalizeOptions {
  /// Keep harmonics 1..K and their conjugate partners, zero the others.
  std::optional<std::size_t> smoothing;
};

/// Zero translation, unit first harmonic, and a canonical orientation: the
/// real part of harmonic 1 on axis 0, its imaginary part in the plane of
/// axes (0, 1), then harmonic 2 in the span of axes 0..2, and so on until
/// the orientation is fixed.
ContourSpectrum normalize(const ContourSpectrum& spectrum, const NormalizeOptions& options = {});

/// Harmonic-discounted inner product over elements 1..floor(m/2)+1, element
/// k being harmonic k-1.
double closeness(const ContourSpectrum& a, const ContourSpectrum& b);

struct SymmetryReport {
  Eigen::VectorXd delta_translate;  // b - a
  double delta_scale = 0.0;         // b - a
  std::vector<double> delta_rotate; // b - a, wrapped to (-pi, pi]
  double closeness = 0.0;           // normalized spectra of a and b
  double self_closeness = 0.0;      // normalized a with itself
};

SymmetryReport symmetry_between(const Contour& a, const Contour& b, const NormalizeOptions& options = {});

/// Interleaved real/imaginary columns, one row per harmonic.
std::string spectrum_to_csv(const ContourSpectrum& spectrum);

}  // namespace nlts
