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

#ifndef NLTS_TESTS_HELPERS_HPP_
#define NLTS_TESTS_HELPERS_HPP_

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "nlts/error.hpp"
#include "nlts/series.hpp"

namespace nlts::testing {

inline std::filesystem::path scratch_dir() {
  std::filesystem::path dir(NLTS_TEST_TMPDIR);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<double> sine(std::size_t n, double period, double amplitude = 1.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = amplitude * std::sin(2.0 * M_PI * static_cast<double>(i) / period);
  return v;
}

template <class F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected an nlts::Error");
}

}  // namespace nlts::testing

#endif  // NLTS_TESTS_HELPERS_HPP_
