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

#include "nlts/regressor.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "nlts/error.hpp"

namespace nlts {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(RegressorKind kind) {
  switch (kind) {
    case RegressorKind::kMean:
      return "mean";
    case RegressorKind::kLinear:
      return "linear";
    case RegressorKind::kNetwork:
      return "net";
  }
  return {};
}

RegressorKind regressor_kind_from_string(const std::string& name) {
  if (name == "mean") return RegressorKind::kMean;
  if (name == "linear") return RegressorKind::kLinear;
  if (name == "net") return RegressorKind::kNetwork;
  fail(ErrorCode::kUnknownName, "unknown regressor '" + name + "' (expected mean, linear or net)");
}

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct Net {
  Index inputs;
  Index hidden;

  Index size() const { return hidden * inputs + 2 * hidden + 1; }

  // Parameter layout: W (row-major), b, v, c.
  double output(const VectorXd& p, const VectorXd& x) const {
    double out = p[size() - 1];
    for (Index h = 0; h < hidden; ++h) {
      double a = p[hidden * inputs + h];
      for (Index i = 0; i < inputs; ++i) a += p[h * inputs + i] * x[i];
      out += p[hidden * inputs + hidden + h] * sigmoid(a);
    }
    return out;
  }

  // Residuals f(x_s) - y_s and their Jacobian with respect to p.
  void linearize(const VectorXd& p, const MatrixXd& xs, const VectorXd& ys, VectorXd& r, MatrixXd& jac) const {
    const Index n = xs.rows();
    r.resize(n);
    jac.setZero(n, size());
    for (Index s = 0; s < n; ++s) {
      double out = p[size() - 1];
      for (Index h = 0; h < hidden; ++h) {
        double a = p[hidden * inputs + h];
        for (Index i = 0; i < inputs; ++i) a += p[h * inputs + i] * xs(s, i);
        const double g = sigmoid(a);
        const double v = p[hidden * inputs + hidden + h];
        out += v * g;
        const double dg = v * g * (1.0 - g);
        for (Index i = 0; i < inputs; ++i) jac(s, h * inputs + i) = dg * xs(s, i);
        jac(s, hidden * inputs + h) = dg;
        jac(s, hidden * inputs + hidden + h) = g;
      }
      jac(s, size() - 1) = 1.0;
      r[s] = out - ys[s];
    }
  }

  double mse(const VectorXd& p, const MatrixXd& xs, const VectorXd& ys) const {
    double sum = 0.0;
    for (Index s = 0; s < xs.rows(); ++s) {
      const double e = output(p, xs.row(s).transpose()) - ys[s];
      sum += e * e;
    }
    return sum / static_cast<double>(xs.rows());
  }
};

}  // namespace

double PredictorModel::predict(const VectorXd& x) const {
  require(static_cast<std::size_t>(x.size()) == inputs, ErrorCode::kShapeMismatch,
          "regressor expects " + std::to_string(inputs) + " features, got " + std::to_string(x.size()));
  switch (kind) {
    case RegressorKind::kMean:
      return mean;
    case RegressorKind::kLinear:
      return linear.head(x.size()).dot(x) + linear[x.size()];
    case RegressorKind::kNetwork: {
      const VectorXd a = hidden_weights * x + hidden_bias;
      return output_weights.dot(a.unaryExpr(&sigmoid)) + output_bias;
    }
  }
  return 0.0;
}

PredictorModel train_regressor(const MatrixXd& x, const VectorXd& y, RegressorKind kind, const NetworkConfig& config) {
  require(x.rows() == y.size(), ErrorCode::kShapeMismatch, "train_regressor: one target per sample row");
  require(x.rows() >= 1, ErrorCode::kInsufficientData, "train_regressor: no samples");
  require(x.allFinite() && y.allFinite(), ErrorCode::kInvalidArgument, "train_regressor: non-finite training data");
  PredictorModel model;
  model.kind = kind;
  model.inputs = static_cast<std::size_t>(x.cols());
  const Index n = x.rows(), d = x.cols();

  if (kind == RegressorKind::kMean) {
    model.mean = y.mean();
    model.training_mse = (y.array() - model.mean).square().mean();
    return model;
  }
  if (kind == RegressorKind::kLinear) {
    if (n < d + 1) {
      fail(ErrorCode::kInsufficientData,
           "linear regressor needs at least " + std::to_string(d + 1) + " samples, have " + std::to_string(n));
    }
    MatrixXd design(n, d + 1);
    design << x, VectorXd::Ones(n);
    model.linear = design.colPivHouseholderQr().solve(y);
    model.training_mse = (design * model.linear - y).squaredNorm() / static_cast<double>(n);
    return model;
  }

  require(config.hidden >= 1 && config.hidden <= 64, ErrorCode::kInvalidArgument, "network: hidden units must be 1..64");
  require(config.restarts >= 1, ErrorCode::kInvalidArgument, "network: at least one restart");
  const Net net{d, static_cast<Index>(config.hidden)};
  require(n >= 1, ErrorCode::kInsufficientData, "network: no samples");

  VectorXd best;
  double best_mse = std::numeric_limits<double>::infinity();
  std::size_t best_iterations = 0;
  VectorXd r, r_trial;
  MatrixXd jac;
  for (std::size_t restart = 0; restart < config.restarts; ++restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::uint64_t word[2];
    seq.generate(reinterpret_cast<std::uint32_t*>(word), reinterpret_cast<std::uint32_t*>(word) + 4);
    Rng rng(word[0] ^ word[1]);
    VectorXd p(net.size());
    for (Index i = 0; i < p.size(); ++i) p[i] = rng.uniform(-1.0, 1.0);
    double damping = config.initial_damping;
    double loss = net.mse(p, x, y);
    if (!std::isfinite(loss)) fail(ErrorCode::kTrainingDivergence, "network: non-finite initial loss");
    std::size_t it = 0;
    for (; it < config.max_iterations && loss > config.target_mse; ++it) {
      net.linearize(p, x, y, r, jac);
      const MatrixXd jtj = jac.transpose() * jac;
      const VectorXd grad = jac.transpose() * r;
      bool improved = false;
      while (damping < 1e12) {
        MatrixXd lhs = jtj;
        lhs.diagonal().array() += damping;
        const VectorXd step = lhs.ldlt().solve(-grad);
        const VectorXd trial = p + step;
        const double trial_loss = net.mse(trial, x, y);
        if (std::isfinite(trial_loss) && trial_loss < loss) {
          p = trial;
          loss = trial_loss;
          damping = std::max(damping / 10.0, 1e-12);
          improved = true;
          break;
        }
        damping *= 10.0;
      }
      if (!improved) break;
    }
    if (!std::isfinite(loss)) fail(ErrorCode::kTrainingDivergence, "network: non-finite training loss");
    if (loss < best_mse) {
      best_mse = loss;
      best = p;
      best_iterations = it;
    }
  }
  const Index h = net.hidden;
  model.hidden_weights = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      best.data(), h, d);
  model.hidden_bias = best.segment(h * d, h);
  model.output_weights = best.segment(h * d + h, h);
  model.output_bias = best[net.size() - 1];
  model.training_mse = best_mse;
  model.iterations = best_iterations;
  return model;
}

nlohmann::json to_json(const PredictorModel& model) {
  nlohmann::json j;
  j["kind"] = to_string(model.kind);
  j["inputs"] = model.inputs;
  j["training_mse"] = model.training_mse;
  switch (model.kind) {
    case RegressorKind::kMean:
      j["mean"] = model.mean;
      break;
    case RegressorKind::kLinear:
      j["coefficients"] = std::vector<double>(model.linear.data(), model.linear.data() + model.linear.size());
      break;
    case RegressorKind::kNetwork: {
      auto w = nlohmann::json::array();
      for (Index r = 0; r < model.hidden_weights.rows(); ++r) {
        w.push_back(std::vector<double>(model.hidden_weights.cols()));
        for (Index c = 0; c < model.hidden_weights.cols(); ++c) w.back()[static_cast<std::size_t>(c)] = model.hidden_weights(r, c);
      }
      j["hidden_weights"] = w;
      j["hidden_bias"] = std::vector<double>(model.hidden_bias.data(), model.hidden_bias.data() + model.hidden_bias.size());
      j["output_weights"] =
          std::vector<double>(model.output_weights.data(), model.output_weights.data() + model.output_weights.size());
      j["output_bias"] = model.output_bias;
      j["iterations"] = model.iterations;
      break;
    }
  }
  return j;
}

}  // namespace nlts
