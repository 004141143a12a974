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
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "nlts/embedding.hpp"

namespace nlts {

enum class TermKind { kPower, kSine, kExp };

/// One scalar function of time: t^p, sin(omega t + phase) or exp(alpha t).
struct BasisTerm {
  TermKind kind = TermKind::kPower;
  double rate = 1.0;   // power, angular frequency or growth rate
  double phase = 0.0;  // sine only

  static BasisTerm power(int p);
  static BasisTerm sine(double omega, double phase = 0.0);
  static BasisTerm exponential(double alpha);

  double operator()(double t) const;
  std::string label() const;
};

class TimeBasis {
 public:
  TimeBasis() = default;
  explicit TimeBasis(std::vector<BasisTerm> terms);

  /// Comma-separated list such as "t^2,t,sin(2;0),exp(-0.1)"; empty string
  /// gives the empty basis.
  static TimeBasis parse(const std::string& text);

  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<BasisTerm>& terms() const noexcept { return terms_; }
  Eigen::VectorXd evaluate(double t) const;
  /// Rows: times; columns: terms. Throws kDegenerate on non-finite values.
  Eigen::MatrixXd evaluate(const std::vector<double>& times) const;

 private:
  std::vector<BasisTerm> terms_;
};

/// Principal-component states of an embedding plus the map back to it.
struct StateSequence {
  Eigen::MatrixXd states;      // rows x n
  Eigen::VectorXd mean;        // embedding width
  Eigen::MatrixXd projection;  // width x n, orthonormal columns
  Eigen::VectorXd variances;   // per retained component
  std::vector<double> times;   // physical time of each row
};

StateSequence build_state_sequence(const DelayEmbedding& emb, std::size_t n);

enum class ModelMode { kDiscrete, kContinuous };

std::string to_string(ModelMode mode);

struct IdentifyOptions {
  ModelMode mode = ModelMode::kDiscrete;
  /// Continuous mode: moving-average window applied before differencing
  /// (1 disables smoothing).
  std::size_t smoothing_window = 1;
};

/// x(t+1) = B x(t) + psi phi(t)   or   dx/dt = A x + psi phi(t);
/// y = C x + offset.
struct ReducedModel {
  ModelMode mode = ModelMode::kDiscrete;
  double dt = 1.0;
  Eigen::MatrixXd dynamics;
  Eigen::MatrixXd psi;  // n x basis size
  TimeBasis basis;
  Eigen::MatrixXd output;
  Eigen::VectorXd output_offset;
  Eigen::VectorXd x0;
  double t0 = 0.0;
  Eigen::VectorXd residual_rms;  // per state coordinate
  std::vector<double> fit;       // per output channel

  std::size_t n() const { return static_cast<std::size_t>(dynamics.rows()); }
};

/// Least-squares fit on the state rows (uniformly spaced, at `times`); the
/// outputs matrix holds one observed row per state row. `fit` is scored by a
/// free run from the first state.
ReducedModel fit_model(const Eigen::MatrixXd& states, const std::vector<double>& times, const TimeBasis& basis,
                       const Eigen::MatrixXd& outputs, const IdentifyOptions& options = {});

/// Output rows y(t0), y(t0 + dt), ... ; `steps` rows in total, the first
/// produced by x0 itself.
Eigen::MatrixXd simulate(const ReducedModel& model, const Eigen::VectorXd& x0, std::size_t steps, double t0);

/// 100 (1 - |y - yhat| / |y - mean y|) per column.
std::vector<double> fit_percent(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yhat);

double spectral_radius(const Eigen::MatrixXd& m);

nlohmann::json to_json(const ReducedModel& model);
ReducedModel model_from_json(const nlohmann::json& j);

}  // namespace nlts
