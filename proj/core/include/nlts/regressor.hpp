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
#include <cstdint>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "nlts/random.hpp"

namespace nlts {

enum class RegressorKind { kMean, kLinear, kNetwork };

std::string to_string(RegressorKind kind);
RegressorKind regressor_kind_from_string(const std::string& name);

struct NetworkConfig {
  std::size_t hidden = 4;  // at most 64
  std::size_t max_iterations = 500;
  std::size_t restarts = 3;
  std::uint64_t seed = kDefaultSeed;
  double initial_damping = 1e-3;
  /// Stop once the training MSE falls below this value.
  double target_mse = 1e-12;
};

/// Scalar-output regressor: constant mean, affine least squares, or a
/// one-hidden-layer logistic network with a linear output unit.
struct PredictorModel {
  RegressorKind kind = RegressorKind::kMean;
  std::size_t inputs = 0;
  double mean = 0.0;
  Eigen::VectorXd linear;  // inputs weights followed by the intercept
  Eigen::MatrixXd hidden_weights;  // hidden x inputs
  Eigen::VectorXd hidden_bias;
  Eigen::VectorXd output_weights;
  double output_bias = 0.0;
  double training_mse = 0.0;
  std::size_t iterations = 0;

  double predict(const Eigen::VectorXd& x) const;
};

/// Rows of `x` are samples. Throws kInsufficientData when there are too few
/// samples and kTrainingDivergence on a non-finite loss.
PredictorModel train_regressor(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, RegressorKind kind,
                               const NetworkConfig& config = {});

nlohmann::json to_json(const PredictorModel& model);

}  // namespace nlts
