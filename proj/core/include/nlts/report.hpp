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

#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "nlts/embedding.hpp"
#include "nlts/invariants.hpp"
#include "nlts/lyapunov.hpp"
#include "nlts/predict.hpp"
#include "nlts/symmetry.hpp"

namespace nlts {

/// Rounds to `digits` significant digits; non-finite values pass through.
double round_significant(double v, int digits = 12);

/// Copy of `j` with every floating-point number rounded and non-finite
/// numbers replaced by null.
nlohmann::json rounded(const nlohmann::json& j, int digits = 12);

nlohmann::json to_json(std::span<const MutualInformationPoint> profile);
nlohmann::json to_json(const CorrelationCurve& curve);
nlohmann::json to_json(const DimensionEstimate& estimate);
nlohmann::json to_json(const LyapunovSpectrum& spectrum);
nlohmann::json to_json(const DivergenceCurve& curve);
nlohmann::json to_json(const WolfResult& result);
nlohmann::json to_json(const SpectrumChecks& checks);
nlohmann::json to_json(const LocalStability& stability);
nlohmann::json to_json(const StepwiseResult& result);
nlohmann::json to_json(const SymmetryDescriptors& d);
nlohmann::json to_json(const SymmetryReport& report);

std::string mi_profile_to_csv(std::span<const MutualInformationPoint> profile);
std::string correlation_curve_to_csv(const CorrelationCurve& curve);
std::string divergence_curve_to_csv(const DivergenceCurve& curve);

}  // namespace nlts
