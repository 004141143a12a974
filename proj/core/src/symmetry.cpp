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

#include "nlts/symmetry.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <string>

#include "nlts/error.hpp"

namespace nlts {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using cplx = std::complex<double>;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx twiddle(std::size_t k, std::size_t p, std::size_t m, double sign) {
  const double angle = sign * kTwoPi * static_cast<double>((k * p) % m) / static_cast<double>(m);
  return std::polar(1.0, angle);
}

double wrap_positive(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_centered(double a) {
  double r = wrap_positive(a);
  if (r > std::numbers::pi) r -= kTwoPi;
  return r;
}

/// One coordinate of the canonical-orientation sequence: harmonic 1 real,
/// harmonic 1 imaginary, harmonic 2 real, ...
double component(const MatrixXcd& s, std::size_t stage, Index d) {
  const auto harmonic = static_cast<Index>(1 + stage / 2);
  return stage % 2 == 0 ? s(harmonic, d).real() : s(harmonic, d).imag();
}

void set_component(MatrixXcd& s, std::size_t stage, Index d, double v) {
  const auto harmonic = static_cast<Index>(1 + stage / 2);
  if (stage % 2 == 0) {
    s(harmonic, d).real(v);
  } else {
    s(harmonic, d).imag(v);
  }
}

}  // namespace

Contour::Contour(MatrixXd points) : points_(std::move(points)) {
  require(points_.rows() >= 3, ErrorCode::kInvalidArgument, "contour needs at least 3 points");
  require(points_.cols() >= 2, ErrorCode::kInvalidArgument, "contour needs at least 2 dimensions");
  require(points_.allFinite(), ErrorCode::kInvalidArgument, "contour has non-finite coordinates");
}

ContourSpectrum dft_contour(const Contour& contour) {
  const std::size_t m = contour.size(), n = contour.dim();
  ContourSpectrum s;
  s.coeffs = MatrixXcd::Zero(static_cast<Index>(m), static_cast<Index>(n));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t p = 0; p < m; ++p) {
      const cplx w = twiddle(k, p, m, -1.0);
      for (std::size_t d = 0; d < n; ++d) {
        s.coeffs(static_cast<Index>(k), static_cast<Index>(d)) += contour.points()(static_cast<Index>(p), static_cast<Index>(d)) * w;
      }
    }
  }
  return s;
}

MatrixXd idft_contour(const ContourSpectrum& spectrum) {
  const std::size_t m = spectrum.size(), n = spectrum.dim();
  require(m >= 1, ErrorCode::kInvalidArgument, "empty spectrum");
  MatrixXcd x = MatrixXcd::Zero(static_cast<Index>(m), static_cast<Index>(n));
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t k = 0; k < m; ++k) {
      const cplx w = twiddle(k, p, m, 1.0);
      for (std::size_t d = 0; d < n; ++d) {
        x(static_cast<Index>(p), static_cast<Index>(d)) += spectrum.coeffs(static_cast<Index>(k), static_cast<Index>(d)) * w;
      }
    }
  }
  return x.real() / static_cast<double>(m);
}

SymmetryDescriptors descriptors(const ContourSpectrum& spectrum) {
  const Index m = spectrum.coeffs.rows(), n = spectrum.coeffs.cols();
  require(m >= 3 && n >= 2, ErrorCode::kInvalidArgument, "spectrum needs m >= 3 and n >= 2");
  SymmetryDescriptors out;
  out.translate = spectrum.coeffs.row(0).real().transpose();
  out.scale = spectrum.coeffs.row(1).norm();
  if (!(out.scale > 1e-12 * spectrum.coeffs.bottomRows(m - 1).norm())) fail(ErrorCode::kDegenerate, "first harmonic is zero; rotation is undefined");
  for (Index k = 0; k + 1 < n; ++k) {
    out.rotate.push_back(
        wrap_positive(std::atan2(spectrum.coeffs(1, k + 1).real(), spectrum.coeffs(1, k).real())));
  }
  return out;
}

MatrixXd plane_rotation(std::size_t n, std::size_t k, double angle) {
  require(n >= 2 && k + 1 < n, ErrorCode::kInvalidArgument,
          "plane index must be below n - 1 (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
  MatrixXd r = MatrixXd::Identity(static_cast<Index>(n), static_cast<Index>(n));
  const auto i = static_cast<Index>(k);
  r(i, i) = std::cos(-angle);
  r(i, i + 1) = std::sin(-angle);
  r(i + 1, i) = -std::sin(-angle);
  r(i + 1, i + 1) = std::cos(-angle);
  return r;
}

ContourSpectrum normalize(const ContourSpectrum& spectrum, const NormalizeOptions& options) {
  const Index m = spectrum.coeffs.rows(), n = spectrum.coeffs.cols();
  require(m >= 3 && n >= 2, ErrorCode::kInvalidArgument, "spectrum needs m >= 3 and n >= 2");
  MatrixXcd s = spectrum.coeffs;
  if (options.smoothing) {
    const auto keep = static_cast<Index>(*options.smoothing);
    require(keep >= 1, ErrorCode::kInvalidArgument, "smoothing must keep at least one harmonic");
    for (Index k = 1; k < m; ++k) {
      if (k > keep && k < m - keep) s.row(k).setZero();
    }
  }
  s.row(0).setZero();
  const double scale = s.row(1).norm();
  if (!(scale > 1e-12 * s.norm())) fail(ErrorCode::kDegenerate, "first harmonic is zero; cannot normalize");
  s /= scale;

  // Stage j puts vector j of the orientation sequence into span(axes 0..j)
  // with a non-negative j-th coordinate, rotating planes from the last axis
  // down so earlier stages stay untouched.
  const std::size_t stages = static_cast<std::size_t>(n) - 1;
  const std::size_t available = 2 * static_cast<std::size_t>(m - 1);
  for (std::size_t stage = 0; stage < stages && stage < available; ++stage) {
    for (Index k = n - 2; k >= static_cast<Index>(stage); --k) {
      const double u = component(s, stage, k), v = component(s, stage, k + 1);
      const double angle = std::atan2(v, u);
      if (angle == 0.0) continue;
      s = s * plane_rotation(static_cast<std::size_t>(n), static_cast<std::size_t>(k), angle);
      set_component(s, stage, k, std::hypot(u, v));
      set_component(s, stage, k + 1, 0.0);
    }
  }
  return ContourSpectrum{s};
}

double closeness(const ContourSpectrum& a, const ContourSpectrum& b) {
  require(a.size() == b.size() && a.dim() == b.dim(), ErrorCode::kShapeMismatch,
          "closeness: spectra must have the same shape");
  const std::size_t elements = std::min(a.size(), a.size() / 2 + 1);
  double k_sum = 0.0;
  for (std::size_t k = 1; k <= elements; ++k) {
    const auto row = static_cast<Index>(k - 1);
    double dot = 0.0;
    for (Index d = 0; d < a.coeffs.cols(); ++d) {
      dot += a.coeffs(row, d).real() * b.coeffs(row, d).real() + a.coeffs(row, d).imag() * b.coeffs(row, d).imag();
    }
    k_sum += dot / static_cast<double>(k);
  }
  return k_sum;
}

SymmetryReport symmetry_between(const Contour& a, const Contour& b, const NormalizeOptions& options) {
  require(a.size() == b.size() && a.dim() == b.dim(), ErrorCode::kShapeMismatch,
          "symmetry: contours must have the same point count and dimension");
  const ContourSpectrum sa = dft_contour(a), sb = dft_contour(b);
  const SymmetryDescriptors da = descriptors(sa), db = descriptors(sb);
  SymmetryReport r;
  r.delta_translate = db.translate - da.translate;
  r.delta_scale = db.scale - da.scale;
  for (std::size_t k = 0; k < da.rotate.size(); ++k) r.delta_rotate.push_back(wrap_centered(db.rotate[k] - da.rotate[k]));
  const ContourSpectrum na = normalize(sa, options), nb = normalize(sb, options);
  r.closeness = closeness(na, nb);
  r.self_closeness = closeness(na, na);
  return r;
}

std::string spectrum_to_csv(const ContourSpectrum& spectrum) {
  std::string out = "harmonic";
  for (std::size_t d = 0; d < spectrum.dim(); ++d) {
    out += ",re" + std::to_string(d + 1) + ",im" + std::to_string(d + 1);
  }
  out += "\n";
  char buf[64];
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    out += std::to_string(k);
    for (std::size_t d = 0; d < spectrum.dim(); ++d) {
      const cplx v = spectrum.coeffs(static_cast<Index>(k), static_cast<Index>(d));
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", v.real(), v.imag());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace nlts
