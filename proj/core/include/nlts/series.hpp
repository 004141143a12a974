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
#include <span>
#include <string>
#include <vector>

namespace nlts {

/// Uniformly sampled observable, one or more channels per sample.
///
/// Samples are stored row-major: value(t, c) lives at data()[t * channels + c].
/// Instances are immutable once constructed; every constructor validates
/// N >= 2, dt > 0 and finiteness of all samples.
class TimeSeries {
 public:
  TimeSeries(std::string name, double dt, std::size_t channels, std::vector<double> data);

  /// Convenience for a single-channel series.
  static TimeSeries scalar(std::vector<double> values, double dt = 1.0, std::string name = "y");

  const std::string& name() const noexcept { return name_; }
  double dt() const noexcept { return dt_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size() / channels_; }

  double value(std::size_t t, std::size_t channel = 0) const { return data_[t * channels_ + channel]; }
  std::span<const double> sample(std::size_t t) const {
    return {data_.data() + t * channels_, channels_};
  }
  std::vector<double> channel(std::size_t c) const;
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::string name_;
  double dt_;
  std::size_t channels_;
  std::vector<double> data_;
};

enum class HeaderMode { kAuto, kPresent, kAbsent };

struct CsvOptions {
  /// Field separator; std::nullopt accepts commas and/or runs of whitespace.
  std::optional<char> delimiter;
  HeaderMode header = HeaderMode::kAuto;
  /// First column holds sample times; dt is derived from it.
  bool time_column = false;
  /// Sampling step used when there is no time column.
  double dt = 1.0;
};

TimeSeries load_csv(const std::string& path, const CsvOptions& options = {});
TimeSeries parse_csv(const std::string& text, const CsvOptions& options = {}, const std::string& name = "series");

/// Writes values with 17 significant digits so a reload is bit-exact.
/// With `with_time` the first column is t * dt.
void write_csv(const TimeSeries& series, const std::string& path, bool with_time = false);
std::string to_csv(const TimeSeries& series, bool with_time = false);

/// Subtracts the least-squares polynomial of degree `order` (0 or 1) per channel.
TimeSeries detrend(const TimeSeries& series, int order);

/// Zero mean, unit population variance per channel.
TimeSeries standardize(const TimeSeries& series);

}  // namespace nlts
