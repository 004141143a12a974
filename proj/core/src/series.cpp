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

#include "nlts/series.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlts/error.hpp"

namespace nlts {

TimeSeries::TimeSeries(std::string name, double dt, std::size_t channels, std::vector<double> data)
    : name_(std::move(name)), dt_(dt), channels_(channels), data_(std::move(data)) {
  require(channels_ >= 1, ErrorCode::kInvalidArgument, "time series needs at least one channel");
  require(dt_ > 0.0 && std::isfinite(dt_), ErrorCode::kInvalidArgument, "sampling step must be positive");
  require(data_.size() % channels_ == 0, ErrorCode::kInvalidArgument,
          "sample buffer is not a multiple of the channel count");
  require(size() >= 2, ErrorCode::kTooShort, "time series needs at least 2 samples");
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      fail(ErrorCode::kInvalidArgument,
           "non-finite value at sample " + std::to_string(i / channels_) + ", channel " +
               std::to_string(i % channels_));
    }
  }
}

TimeSeries TimeSeries::scalar(std::vector<double> values, double dt, std::string name) {
  return TimeSeries(std::move(name), dt, 1, std::move(values));
}

std::vector<double> TimeSeries::channel(std::size_t c) const {
  std::vector<double> out(size());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = value(t, c);
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, std::optional<char> delimiter) {
  std::vector<std::string_view> fields;
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  };
  if (delimiter) {
    std::size_t start = 0;
    while (true) {
      const std::size_t pos = line.find(*delimiter, start);
      fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return fields;
  }
  // Auto mode: commas separate fields; otherwise whitespace runs do.
  if (line.find(',') != std::string_view::npos) return split_fields(line, ',');
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

bool parse_number(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

bool is_blank(std::string_view line) {
  for (char ch : line) {
    if (ch != ' ' && ch != '\t' && ch != '\r') return false;
  }
  return true;
}

}  // namespace

TimeSeries parse_csv(const std::string& text, const CsvOptions& options, const std::string& name) {
  std::vector<double> values;
  std::vector<double> times;
  std::size_t width = 0;
  std::size_t rows = 0;
  bool first = true;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto fields = split_fields(line, options.delimiter);
    if (first) {
      first = false;
      double probe = 0.0;
      const bool numeric = parse_number(fields.front(), probe);
      if (options.header == HeaderMode::kPresent ||
          (options.header == HeaderMode::kAuto && !numeric)) {
        continue;
      }
    }
    if (width == 0) {
      width = fields.size();
      require(width >= (options.time_column ? 2u : 1u), ErrorCode::kParse,
              "row " + std::to_string(line_no) + ": no value columns");
    } else if (fields.size() != width) {
      fail(ErrorCode::kParse, "row " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                                  " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_number(fields[c], v)) {
        fail(ErrorCode::kParse, "row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                    ": cannot parse '" + std::string(fields[c]) + "'");
      }
      if (options.time_column && c == 0) {
        times.push_back(v);
      } else {
        values.push_back(v);
      }
    }
    ++rows;
  }
  require(rows > 0, ErrorCode::kEmptyInput, "no data rows in input");

  double dt = options.dt;
  if (options.time_column) {
    require(rows >= 2, ErrorCode::kTooShort, "time column needs at least 2 rows");
    dt = (times.back() - times.front()) / static_cast<double>(rows - 1);
    require(dt > 0.0, ErrorCode::kFormat, "time column is not increasing");
    for (std::size_t i = 1; i < rows; ++i) {
      const double step = times[i] - times[i - 1];
      if (std::abs(step - dt) > 1e-9 * std::abs(dt)) {
        fail(ErrorCode::kFormat, "non-uniform time column at row " + std::to_string(i + 1) + ": step " +
                                     std::to_string(step) + " vs mean " + std::to_string(dt));
      }
    }
  }
  const std::size_t channels = options.time_column ? width - 1 : width;
  return TimeSeries(name, dt, channels, std::move(values));
}

TimeSeries load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kEmptyInput, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), options, path);
}

std::string to_csv(const TimeSeries& series, bool with_time) {
  std::string out;
  char buf[32];
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (with_time) {
      std::snprintf(buf, sizeof buf, "%.17g,", static_cast<double>(t) * series.dt());
      out += buf;
    }
    for (std::size_t c = 0; c < series.channels(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", series.value(t, c));
      out += buf;
      out += (c + 1 == series.channels()) ? '\n' : ',';
    }
  }
  return out;
}

void write_csv(const TimeSeries& series, const std::string& path, bool with_time) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::kInvalidArgument, "cannot write " + path);
  out << to_csv(series, with_time);
}

TimeSeries detrend(const TimeSeries& series, int order) {
  require(order == 0 || order == 1, ErrorCode::kInvalidArgument, "detrend order must be 0 or 1");
  const std::size_t n = series.size();
  require(n > static_cast<std::size_t>(order) + 1, ErrorCode::kTooShort,
          "detrend of order " + std::to_string(order) + " needs more than " + std::to_string(order + 1) +
              " samples");
  std::vector<double> out(series.data());
  const double tmean = 0.5 * static_cast<double>(n - 1);
  double stt = 0.0;
  for (std::size_t t = 0; t < n; ++t) stt += (t - tmean) * (t - tmean);
  for (std::size_t c = 0; c < series.channels(); ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < n; ++t) mean += series.value(t, c);
    mean /= static_cast<double>(n);
    double slope = 0.0;
    if (order == 1) {
      double sty = 0.0;
      for (std::size_t t = 0; t < n; ++t) sty += (t - tmean) * (series.value(t, c) - mean);
      slope = sty / stt;
    }
    for (std::size_t t = 0; t < n; ++t) {
      out[t * series.channels() + c] = series.value(t, c) - mean - slope * (t - tmean);
    }
  }
  return TimeSeries(series.name(), series.dt(), series.channels(), std::move(out));
}

TimeSeries standardize(const TimeSeries& series) {
  const std::size_t n = series.size();
  std::vector<double> out(series.data());
  for (std::size_t c = 0; c < series.channels(); ++c) {
    double mean = 0.0;
    for (std::size_t t = 0; t < n; ++t) mean += series.value(t, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t t = 0; t < n; ++t) var += (series.value(t, c) - mean) * (series.value(t, c) - mean);
    var /= static_cast<double>(n);
    require(var > 0.0, ErrorCode::kDegenerate, "channel " + std::to_string(c) + " has zero variance");
    const double sd = std::sqrt(var);
    for (std::size_t t = 0; t < n; ++t) out[t * series.channels() + c] = (series.value(t, c) - mean) / sd;
  }
  return TimeSeries(series.name(), series.dt(), series.channels(), std::move(out));
}

}  // namespace nlts
