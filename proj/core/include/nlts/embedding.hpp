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
#include <span>
#include <string>
#include <vector>

#include "nlts/series.hpp"

namespace nlts {

/// Delay-coordinate reconstruction of a (multi-channel) series.
///
/// Row r corresponds to sample t = times()[r] and holds, channel by channel,
/// the block (y_c(t), y_c(t - tau), ..., y_c(t - (m - 1) tau)); newest first.
class DelayEmbedding {
 public:
  DelayEmbedding(std::size_t m, std::size_t tau, std::size_t channels, double source_dt,
                 std::vector<double> points, std::vector<std::size_t> times);

  std::size_t m() const noexcept { return m_; }
  std::size_t tau() const noexcept { return tau_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t dim() const noexcept { return m_ * channels_; }
  std::size_t rows() const noexcept { return times_.size(); }
  double source_dt() const noexcept { return source_dt_; }

  std::span<const double> row(std::size_t r) const { return {points_.data() + r * dim(), dim()}; }
  double at(std::size_t r, std::size_t col) const { return points_[r * dim() + col]; }
  std::size_t time(std::size_t r) const { return times_[r]; }
  const std::vector<double>& points() const noexcept { return points_; }
  const std::vector<std::size_t>& times() const noexcept { return times_; }

  /// Column names z1..zm, prefixed with the channel when there are several.
  std::vector<std::string> column_names() const;

 private:
  std::size_t m_;
  std::size_t tau_;
  std::size_t channels_;
  double source_dt_;
  std::vector<double> points_;
  std::vector<std::size_t> times_;
};

DelayEmbedding embed(const TimeSeries& series, std::size_t m, std::size_t tau);

/// Builds an embedding directly from state vectors (e.g. a simulated
/// trajectory), one row per sample.
DelayEmbedding embed_states(const TimeSeries& states);

std::string embedding_to_csv(const DelayEmbedding& emb);

double euclidean(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Delay selection

struct MutualInformationPoint {
  std::size_t tau;
  double mi;  // nats
};

/// Default histogram resolution: ceil(N^(1/3)) clamped to [8, 64].
std::size_t default_mi_bins(std::size_t n);

std::vector<MutualInformationPoint> mutual_information_profile(const TimeSeries& series, std::size_t channel,
                                                               std::size_t tau_max, std::size_t bins);

struct DelayChoice {
  std::size_t tau = 0;
  /// False when the profile has no interior local minimum and the global
  /// arg-min was returned instead.
  bool interior_minimum = true;
};

DelayChoice select_delay(std::span<const MutualInformationPoint> profile);

}  // namespace nlts
