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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlts/series.hpp"

namespace nlts {

enum class SystemKind { kFlow, kMap };

/// A dynamical system with an analytic Jacobian.
///
/// For flows `evaluate` returns dx/dt at (x, t); for maps it returns the
/// next state. `jacobian` is the derivative of `evaluate` with respect to x.
struct ReferenceSystem {
  std::string name;
  SystemKind kind = SystemKind::kFlow;
  std::size_t dimension = 0;
  std::vector<double> parameters;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> evaluate;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, double)> jacobian;
  Eigen::VectorXd default_state;
  double default_dt = 1.0;
};

/// Names accepted by catalog().
std::vector<std::string> catalog_names();

/// lorenz, rossler, henon, qflow (x'=-y-z, y'=x, z'=0.375(y-y^2)-0.23z),
/// forced_quadratic (forced quadratic oscillator) and coupled_logistic (coupled quadratic map).
ReferenceSystem catalog(const std::string& name);

ReferenceSystem linear_map(const Eigen::MatrixXd& a);
ReferenceSystem linear_flow(const Eigen::MatrixXd& a);

/// One classical Runge-Kutta step.
Eigen::VectorXd rk4_step(const ReferenceSystem& sys, const Eigen::VectorXd& x, double t, double dt);

/// Fixed-step RK4; returns steps + 1 states (row 0 is x0).
Eigen::MatrixXd integrate(const ReferenceSystem& sys, const Eigen::VectorXd& x0, double dt, std::size_t steps,
                          double t0 = 0.0);

/// Repeated map application; returns steps + 1 states (row 0 is x0).
Eigen::MatrixXd iterate(const ReferenceSystem& sys, const Eigen::VectorXd& x0, std::size_t steps);

struct GenerateOptions {
  std::optional<Eigen::VectorXd> x0;
  std::optional<double> dt;  // flows only; defaults to the system's dt
  std::size_t transient = 1000;
};

/// Trajectory of `samples` states recorded after discarding the transient.
TimeSeries generate(const ReferenceSystem& sys, std::size_t samples, const GenerateOptions& options = {});

/// Largest relative deviation between the analytic Jacobian and a central
/// finite-difference estimate over `states` random points near the
/// default state (seeded, deterministic).
double jacobian_check(const ReferenceSystem& sys, std::size_t states = 100, std::uint64_t seed = 7);

}  // namespace nlts
