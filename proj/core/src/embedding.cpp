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

#include "nlts/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nlts/error.hpp"

namespace nlts {

DelayEmbedding::DelayEmbedding(std::size_t m, std::size_t tau, std::size_t channels, double source_dt,
                               std::vector<double> points, std::vector<std::size_t> times)
    : m_(m), tau_(tau), channels_(channels), source_dt_(source_dt), points_(std::move(points)),
      times_(std::move(times)) {
  require(m_ >= 1 && tau_ >= 1 && channels_ >= 1, ErrorCode::kInvalidArgument,
          "embedding needs m >= 1, tau >= 1, channels >= 1");
  require(!times_.empty(), ErrorCode::kTooShort, "embedding has no rows");
  require(points_.size() == times_.size() * dim(), ErrorCode::kShapeMismatch,
          "embedding buffer does not match rows x dim");
}

std::vector<std::string> DelayEmbedding::column_names() const {
  std::vector<std::string> names;
  names.reserve(dim());
  for (std::size_t c = 0; c < channels_; ++c) {
    for (std::size_t j = 0; j < m_; ++j) {
      std::string name = "z" + std::to_string(j + 1);
      if (channels_ > 1) name = "c" + std::to_string(c + 1) + "_" + name;
      names.push_back(std::move(name));
    }
  }
  return names;
}

DelayEmbedding embed(const TimeSeries& series, std::size_t m, std::size_t tau) {
  require(m >= 1, ErrorCode::kInvalidArgument, "embedding dimension must be at least 1");
  require(tau >= 1, ErrorCode::kInvalidArgument, "delay must be at least 1 sample");
  const std::size_t n = series.size();
  const std::size_t span = (m - 1) * tau;
  if (n <= span) {
    fail(ErrorCode::kTooShort, "series of length " + std::to_string(n) + " is too short for m=" +
                                   std::to_string(m) + ", tau=" + std::to_string(tau) + "; need at least " +
                                   std::to_string(span + 1) + " samples");
  }
  const std::size_t rows = n - span;
  const std::size_t channels = series.channels();
  const std::size_t dim = m * channels;
  std::vector<double> points(rows * dim);
  std::vector<std::size_t> times(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + span;
    times[r] = t;
    double* out = points.data() + r * dim;
    for (std::size_t c = 0; c < channels; ++c) {
      for (std::size_t j = 0; j < m; ++j) out[c * m + j] = series.value(t - j * tau, c);
    }
  }
  return DelayEmbedding(m, tau, channels, series.dt(), std::move(points), std::move(times));
}

DelayEmbedding embed_states(const TimeSeries& states) {
  std::vector<std::size_t> times(states.size());
  for (std::size_t t = 0; t < times.size(); ++t) times[t] = t;
  // m = 1 per channel: each row is the raw state vector
  return DelayEmbedding(1, 1, states.channels(), states.dt(), states.data(), std::move(times));
}

std::string embedding_to_csv(const DelayEmbedding& emb) {
  std::string out;
  const auto names = emb.column_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += names[i];
    out += (i + 1 == names.size()) ? '\n' : ',';
  }
  char buf[32];
  for (std::size_t r = 0; r < emb.rows(); ++r) {
    for (std::size_t c = 0; c < emb.dim(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", emb.at(r, c));
      out += buf;
      out += (c + 1 == emb.dim()) ? '\n' : ',';
    }
  }
  return out;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::size_t default_mi_bins(std::size_t n) {
  const auto bins = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(n))));
  return std::clamp<std::size_t>(bins, 8, 64);
}

std::vector<MutualInformationPoint> mutual_information_profile(const TimeSeries& series, std::size_t channel,
                                                               std::size_t tau_max, std::size_t bins) {
  require(channel < series.channels(), ErrorCode::kInvalidArgument, "channel index out of range");
  require(bins >= 2, ErrorCode::kInvalidArgument, "mutual information needs at least 2 bins");
  const std::size_t n = series.size();
  require(tau_max >= 1 && 2 * tau_max < n, ErrorCode::kInvalidArgument,
          "tau_max must satisfy 1 <= tau_max < N/2");

  const auto x = series.channel(channel);
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  require(hi > lo, ErrorCode::kDegenerate, "constant channel: histogram is degenerate");

  std::vector<std::size_t> bin(n);
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (std::size_t t = 0; t < n; ++t) {
    const auto b = static_cast<std::size_t>((x[t] - lo) * scale);
    bin[t] = std::min(b, bins - 1);
  }

  std::vector<MutualInformationPoint> profile;
  profile.reserve(tau_max);
  std::vector<double> joint(bins * bins), pa(bins), pb(bins);
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    std::fill(joint.begin(), joint.end(), 0.0);
    std::fill(pa.begin(), pa.end(), 0.0);
    std::fill(pb.begin(), pb.end(), 0.0);
    const std::size_t pairs = n - tau;
    for (std::size_t t = 0; t < pairs; ++t) {
      const std::size_t i = bin[t], j = bin[t + tau];
      joint[i * bins + j] += 1.0;
      pa[i] += 1.0;
      pb[j] += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(pairs);
    double mi = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
      for (std::size_t j = 0; j < bins; ++j) {
        const double c = joint[i * bins + j];
        if (c == 0.0) continue;
        // p_ij ln(p_ij / (p_i p_j)) with counts: c/P * ln(c P / (a b))
        mi += c * inv * std::log(c * static_cast<double>(pairs) / (pa[i] * pb[j]));
      }
    }
    profile.push_back({tau, std::max(mi, 0.0)});
  }
  return profile;
}

DelayChoice select_delay(std::span<const MutualInformationPoint> profile) {
  require(!profile.empty(), ErrorCode::kInvalidArgument, "empty mutual-information profile");
  // Walk runs of equal values; a run strictly below both flanking values is
  // a local minimum and its first entry is reported.
  std::size_t i = 1;
  while (i < profile.size()) {
    std::size_t j = i;
    while (j + 1 < profile.size() && profile[j + 1].mi == profile[i].mi) ++j;
    if (j + 1 < profile.size() && profile[i].mi < profile[i - 1].mi && profile[i].mi < profile[j + 1].mi) {
      return {profile[i].tau, true};
    }
    i = j + 1;
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < profile.size(); ++k) {
    if (profile[k].mi < profile[best].mi) best = k;
  }
  return {profile[best].tau, false};
}

}  // namespace nlts
