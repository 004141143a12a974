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

#include "nlts/refsys.hpp"

#include <cmath>

#include "nlts/error.hpp"
#include "nlts/random.hpp"

namespace nlts {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ReferenceSystem lorenz(double sigma, double rho, double beta) {
  ReferenceSystem s;
  s.name = "lorenz";
  s.kind = SystemKind::kFlow;
  s.dimension = 3;
  s.parameters = {sigma, rho, beta};
  s.evaluate = [=](const VectorXd& x, double) {
    VectorXd f(3);
    f << sigma * (x[1] - x[0]), rho * x[0] - x[1] - x[0] * x[2], x[0] * x[1] - beta * x[2];
    return f;
  };
  s.jacobian = [=](const VectorXd& x, double) {
    MatrixXd j(3, 3);
    j << -sigma, sigma, 0.0,
         rho - x[2], -1.0, -x[0],
         x[1], x[0], -beta;
    return j;
  };
  s.default_state = VectorXd::Constant(3, 1.0);
  s.default_dt = 0.01;
  return s;
}

ReferenceSystem rossler(double a, double b, double c) {
  ReferenceSystem s;
  s.name = "rossler";
  s.kind = SystemKind::kFlow;
  s.dimension = 3;
  s.parameters = {a, b, c};
  s.evaluate = [=](const VectorXd& x, double) {
    VectorXd f(3);
    f << -(x[1] + x[2]), x[0] + a * x[1], b + x[2] * (x[0] - c);
    return f;
  };
  s.jacobian = [=](const VectorXd& x, double) {
    MatrixXd j(3, 3);
    j << 0.0, -1.0, -1.0,
         1.0, a, 0.0,
         x[2], 0.0, x[0] - c;
    return j;
  };
  s.default_state = VectorXd(3);
  s.default_state << 1.0, 1.0, 0.0;
  s.default_dt = 0.05;
  return s;
}

ReferenceSystem henon(double a, double b) {
  ReferenceSystem s;
  s.name = "henon";
  s.kind = SystemKind::kMap;
  s.dimension = 2;
  s.parameters = {a, b};
  s.evaluate = [=](const VectorXd& x, double) {
    VectorXd f(2);
    f << 1.0 - a * x[0] * x[0] + x[1], b * x[0];
    return f;
  };
  s.jacobian = [=](const VectorXd& x, double) {
    MatrixXd j(2, 2);
    j << -2.0 * a * x[0], 1.0,
         b, 0.0;
    return j;
  };
  s.default_state = VectorXd::Zero(2);
  return s;
}

ReferenceSystem qflow(double k, double damping) {
  ReferenceSystem s;
  s.name = "qflow";
  s.kind = SystemKind::kFlow;
  s.dimension = 3;
  s.parameters = {k, damping};
  s.evaluate = [=](const VectorXd& x, double) {
    VectorXd f(3);
    f << -x[1] - x[2], x[0], k * (x[1] - x[1] * x[1]) - damping * x[2];
    return f;
  };
  s.jacobian = [=](const VectorXd& x, double) {
    MatrixXd j(3, 3);
    j << 0.0, -1.0, -1.0,
         1.0, 0.0, 0.0,
         0.0, k * (1.0 - 2.0 * x[1]), -damping;
    return j;
  };
  // inside the attractor's basin; many nearby starts escape to infinity
  s.default_state = VectorXd::Constant(3, 0.1);
  s.default_dt = 0.1;
  return s;
}

ReferenceSystem forced_quadratic(double forcing, double omega) {
  ReferenceSystem s;
  s.name = "forced_quadratic";
  s.kind = SystemKind::kFlow;
  s.dimension = 2;
  s.parameters = {forcing, omega};
  s.evaluate = [=](const VectorXd& x, double t) {
    VectorXd f(2);
    f << x[1], -x[0] + x[0] * x[0] - forcing * std::sin(omega * t);
    return f;
  };
  s.jacobian = [=](const VectorXd& x, double) {
    MatrixXd j(2, 2);
    j << 0.0, 1.0,
         -1.0 + 2.0 * x[0], 0.0;
    return j;
  };
  s.default_state = VectorXd(2);
  s.default_state << 0.0, 0.042;
  s.default_dt = 0.1;
  return s;
}

ReferenceSystem coupled_logistic(double a, double b, double coupling) {
  ReferenceSystem s;
  s.name = "coupled_logistic";
  s.kind = SystemKind::kMap;
  s.dimension = 2;
  s.parameters = {a, b, coupling};
  s.evaluate = [=](const VectorXd& x, double) {
    VectorXd f(2);
    f << a * x[0] * (1.0 - x[1]), b * x[1] * (1.0 - x[0]) + coupling * (x[0] - x[1]);
    return f;
  };
  s.jacobian = [=](const VectorXd& x, double) {
    MatrixXd j(2, 2);
    j << a * (1.0 - x[1]), -a * x[0],
         -b * x[1] + coupling, b * (1.0 - x[0]) - coupling;
    return j;
  };
  s.default_state = VectorXd(2);
  s.default_state << 0.3, 0.4;
  return s;
}

void check_finite(const VectorXd& x, std::size_t step, const std::string& name) {
  if (!x.allFinite()) {
    fail(ErrorCode::kDivergence, name + ": state became non-finite at step " + std::to_string(step));
  }
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"lorenz", "rossler", "henon", "qflow", "forced_quadratic", "coupled_logistic"};
}

ReferenceSystem catalog(const std::string& name) {
  if (name == "lorenz") return lorenz(10.0, 28.0, 8.0 / 3.0);
  if (name == "rossler") return rossler(0.2, 0.2, 5.7);
  if (name == "henon") return henon(1.4, 0.3);
  if (name == "qflow") return qflow(0.375, 0.23);
  if (name == "forced_quadratic") return forced_quadratic(0.05, 2.0);
  if (name == "coupled_logistic") return coupled_logistic(1.25, 1.3, 0.1);
  fail(ErrorCode::kUnknownName, "unknown reference system '" + name + "'");
}

ReferenceSystem linear_map(const MatrixXd& a) {
  require(a.rows() == a.cols() && a.rows() > 0, ErrorCode::kInvalidArgument, "linear map needs a square matrix");
  ReferenceSystem s;
  s.name = "linear_map";
  s.kind = SystemKind::kMap;
  s.dimension = static_cast<std::size_t>(a.rows());
  s.evaluate = [a](const VectorXd& x, double) -> VectorXd { return a * x; };
  s.jacobian = [a](const VectorXd&, double) -> MatrixXd { return a; };
  s.default_state = VectorXd::Ones(a.rows());
  return s;
}

ReferenceSystem linear_flow(const MatrixXd& a) {
  ReferenceSystem s = linear_map(a);
  s.name = "linear_flow";
  s.kind = SystemKind::kFlow;
  s.default_dt = 0.01;
  return s;
}

VectorXd rk4_step(const ReferenceSystem& sys, const VectorXd& x, double t, double dt) {
  const VectorXd k1 = sys.evaluate(x, t);
  const VectorXd k2 = sys.evaluate(x + 0.5 * dt * k1, t + 0.5 * dt);
  const VectorXd k3 = sys.evaluate(x + 0.5 * dt * k2, t + 0.5 * dt);
  const VectorXd k4 = sys.evaluate(x + dt * k3, t + dt);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

MatrixXd integrate(const ReferenceSystem& sys, const VectorXd& x0, double dt, std::size_t steps, double t0) {
  require(sys.kind == SystemKind::kFlow, ErrorCode::kInvalidArgument, "integrate: " + sys.name + " is not a flow");
  require(dt > 0.0, ErrorCode::kInvalidArgument, "integrate: dt must be positive");
  require(static_cast<std::size_t>(x0.size()) == sys.dimension, ErrorCode::kShapeMismatch,
          "integrate: initial state has wrong dimension");
  MatrixXd out(static_cast<Eigen::Index>(steps + 1), x0.size());
  VectorXd x = x0;
  out.row(0) = x.transpose();
  for (std::size_t k = 1; k <= steps; ++k) {
    x = rk4_step(sys, x, t0 + static_cast<double>(k - 1) * dt, dt);
    check_finite(x, k, sys.name);
    out.row(static_cast<Eigen::Index>(k)) = x.transpose();
  }
  return out;
}

MatrixXd iterate(const ReferenceSystem& sys, const VectorXd& x0, std::size_t steps) {
  require(sys.kind == SystemKind::kMap, ErrorCode::kInvalidArgument, "iterate: " + sys.name + " is not a map");
  require(static_cast<std::size_t>(x0.size()) == sys.dimension, ErrorCode::kShapeMismatch,
          "iterate: initial state has wrong dimension");
  MatrixXd out(static_cast<Eigen::Index>(steps + 1), x0.size());
  VectorXd x = x0;
  out.row(0) = x.transpose();
  for (std::size_t k = 1; k <= steps; ++k) {
    x = sys.evaluate(x, static_cast<double>(k - 1));
    check_finite(x, k, sys.name);
    out.row(static_cast<Eigen::Index>(k)) = x.transpose();
  }
  return out;
}

TimeSeries generate(const ReferenceSystem& sys, std::size_t samples, const GenerateOptions& options) {
  require(samples >= 2, ErrorCode::kInvalidArgument, "generate: need at least 2 samples");
  const VectorXd x0 = options.x0.value_or(sys.default_state);
  const std::size_t total = options.transient + samples - 1;
  MatrixXd traj;
  double dt = 1.0;
  if (sys.kind == SystemKind::kFlow) {
    dt = options.dt.value_or(sys.default_dt);
    traj = integrate(sys, x0, dt, total);
  } else {
    traj = iterate(sys, x0, total);
  }
  std::vector<double> data;
  data.reserve(samples * sys.dimension);
  for (std::size_t k = options.transient; k <= total; ++k) {
    for (std::size_t d = 0; d < sys.dimension; ++d) {
      data.push_back(traj(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d)));
    }
  }
  return TimeSeries(sys.name, dt, sys.dimension, std::move(data));
}

double jacobian_check(const ReferenceSystem& sys, std::size_t states, std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<Eigen::Index>(sys.dimension);
  double worst = 0.0;
  for (std::size_t s = 0; s < states; ++s) {
    VectorXd x = sys.default_state;
    for (Eigen::Index i = 0; i < n; ++i) x[i] += rng.uniform(-1.0, 1.0);
    const double t = rng.uniform(0.0, 10.0);
    const MatrixXd analytic = sys.jacobian(x, t);
    MatrixXd numeric(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
      VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      numeric.col(j) = (sys.evaluate(xp, t) - sys.evaluate(xm, t)) / (2.0 * h);
    }
    const double scale = std::max(analytic.norm(), 1e-12);
    worst = std::max(worst, (analytic - numeric).norm() / scale);
  }
  return worst;
}

}  // namespace nlts
