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

#include "nlts/identify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "nlts/error.hpp"

namespace nlts {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double parse_number(const std::string& s, const std::string& term) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kParse, "basis term '" + term + "': bad number '" + s + "'");
}

BasisTerm parse_term(const std::string& raw) {
  const std::string term = trim(raw);
  if (term == "1") return BasisTerm::power(0);
  if (term == "t") return BasisTerm::power(1);
  if (term.rfind("t^", 0) == 0) {
    const double p = parse_number(term.substr(2), term);
    if (p != std::floor(p) || p < 0 || p > 8) fail(ErrorCode::kParse, "basis term '" + term + "': power must be 0..8");
    return BasisTerm::power(static_cast<int>(p));
  }
  auto args = [&](const std::string& head) {
    if (term.size() < head.size() + 2 || term.back() != ')') fail(ErrorCode::kParse, "basis term '" + term + "': missing ')'");
    std::vector<double> out;
    std::string body = term.substr(head.size(), term.size() - head.size() - 1);
    std::size_t start = 0;
    while (true) {
      const auto sep = body.find(';', start);
      out.push_back(parse_number(trim(body.substr(start, sep - start)), term));
      if (sep == std::string::npos) break;
      start = sep + 1;
    }
    return out;
  };
  if (term.rfind("sin(", 0) == 0) {
    const auto a = args("sin(");
    if (a.size() > 2) fail(ErrorCode::kParse, "basis term '" + term + "': sin takes omega[;phase]");
    return BasisTerm::sine(a[0], a.size() == 2 ? a[1] : 0.0);
  }
  if (term.rfind("exp(", 0) == 0) {
    const auto a = args("exp(");
    if (a.size() != 1) fail(ErrorCode::kParse, "basis term '" + term + "': exp takes one rate");
    return BasisTerm::exponential(a[0]);
  }
  fail(ErrorCode::kParse, "unknown basis term '" + term + "'");
}

MatrixXd rows_to_matrix(const nlohmann::json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::kFormat, std::string("model field '") + what + "' must be an array of rows");
  const auto rows = static_cast<Index>(j.size());
  const auto cols = rows == 0 ? Index{0} : static_cast<Index>(j.at(0).size());
  MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Index>(row.size()) != cols) fail(ErrorCode::kFormat, std::string("ragged matrix '") + what + "'");
    for (Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

nlohmann::json matrix_to_rows(const MatrixXd& m) {
  auto out = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

nlohmann::json vector_to_json(const VectorXd& v) {
  auto out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

VectorXd vector_from_json(const nlohmann::json& j) {
  VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j.at(i).get<double>();
  return v;
}

}  // namespace

BasisTerm BasisTerm::power(int p) {
  require(p >= 0 && p <= 8, ErrorCode::kInvalidArgument, "power basis term must have 0 <= p <= 8");
  return {TermKind::kPower, static_cast<double>(p), 0.0};
}

BasisTerm BasisTerm::sine(double omega, double phase) { return {TermKind::kSine, omega, phase}; }

BasisTerm BasisTerm::exponential(double alpha) { return {TermKind::kExp, alpha, 0.0}; }

double BasisTerm::operator()(double t) const {
  switch (kind) {
    case TermKind::kPower:
      return std::pow(t, rate);
    case TermKind::kSine:
      return std::sin(rate * t + phase);
    case TermKind::kExp:
      return std::exp(rate * t);
  }
  return 0.0;
}

std::string BasisTerm::label() const {
  switch (kind) {
    case TermKind::kPower:
      if (rate == 0.0) return "1";
      if (rate == 1.0) return "t";
      return "t^" + format_number(rate);
    case TermKind::kSine:
      return "sin(" + format_number(rate) + ";" + format_number(phase) + ")";
    case TermKind::kExp:
      return "exp(" + format_number(rate) + ")";
  }
  return {};
}

TimeBasis::TimeBasis(std::vector<BasisTerm> terms) : terms_(std::move(terms)) {}

TimeBasis TimeBasis::parse(const std::string& text) {
  std::vector<BasisTerm> terms;
  if (trim(text).empty()) return TimeBasis{};
  std::size_t start = 0;
  while (true) {
    const auto sep = text.find(',', start);
    terms.push_back(parse_term(text.substr(start, sep - start)));
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  return TimeBasis{std::move(terms)};
}

VectorXd TimeBasis::evaluate(double t) const {
  VectorXd v(static_cast<Index>(terms_.size()));
  for (std::size_t j = 0; j < terms_.size(); ++j) v[static_cast<Index>(j)] = terms_[j](t);
  return v;
}

MatrixXd TimeBasis::evaluate(const std::vector<double>& times) const {
  MatrixXd out(static_cast<Index>(times.size()), static_cast<Index>(terms_.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      const double v = terms_[j](times[i]);
      if (!std::isfinite(v)) {
        fail(ErrorCode::kDegenerate, "basis term " + terms_[j].label() + " is not finite at t=" + format_number(times[i]));
      }
      out(static_cast<Index>(i), static_cast<Index>(j)) = v;
    }
  }
  return out;
}

std::string to_string(ModelMode mode) { return mode == ModelMode::kDiscrete ? "discrete" : "continuous"; }

StateSequence build_state_sequence(const DelayEmbedding& emb, std::size_t n) {
  const std::size_t width = emb.dim();
  const std::size_t rows = emb.rows();
  require(n >= 1 && n <= width, ErrorCode::kInvalidArgument,
          "state dimension must be between 1 and the embedding width " + std::to_string(width));
  require(rows > 10 * n, ErrorCode::kTooShort,
          "need more than " + std::to_string(10 * n) + " embedded rows for n=" + std::to_string(n));

  const auto w = static_cast<Index>(width);
  MatrixXd x(static_cast<Index>(rows), w);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < width; ++c) x(static_cast<Index>(r), static_cast<Index>(c)) = emb.at(r, c);
  }
  StateSequence seq;
  seq.mean = x.colwise().mean().transpose();
  x.rowwise() -= seq.mean.transpose();

  const MatrixXd cov = (x.transpose() * x) / static_cast<double>(rows);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  // Eigen sorts ascending; reverse to descending variance.
  const VectorXd values = eig.eigenvalues().reverse();
  MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
  const double top = std::max(values[0], 0.0);
  Index rank = 0;
  for (Index i = 0; i < w; ++i) {
    if (values[i] > 1e-12 * top && values[i] > 0.0) ++rank;
  }
  if (rank < static_cast<Index>(n)) {
    fail(ErrorCode::kSingular, "embedded data has rank " + std::to_string(rank) + " < requested dimension " +
                                   std::to_string(n));
  }
  const auto k = static_cast<Index>(n);
  seq.variances = values.head(k);
  if (n == width) {
    seq.projection = MatrixXd::Identity(w, w);
  } else {
    seq.projection = vectors.leftCols(k);
    for (Index c = 0; c < k; ++c) {
      Index arg = 0;
      seq.projection.col(c).cwiseAbs().maxCoeff(&arg);
      if (seq.projection(arg, c) < 0.0) seq.projection.col(c) *= -1.0;
    }
  }
  seq.states = x * seq.projection;
  seq.times.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) seq.times[r] = static_cast<double>(emb.time(r)) * emb.source_dt();
  return seq;
}

namespace {

MatrixXd moving_average(const MatrixXd& x, std::size_t window) {
  if (window <= 1) return x;
  const auto rows = x.rows();
  const auto half = static_cast<Index>(window / 2);
  MatrixXd out(rows, x.cols());
  for (Index r = 0; r < rows; ++r) {
    const Index lo = std::max<Index>(0, r - half), hi = std::min<Index>(rows - 1, r + half);
    out.row(r) = x.middleRows(lo, hi - lo + 1).colwise().mean();
  }
  return out;
}

MatrixXd differentiate(const MatrixXd& x, double dt) {
  const auto rows = x.rows();
  MatrixXd d(rows, x.cols());
  d.row(0) = (x.row(1) - x.row(0)) / dt;
  d.row(rows - 1) = (x.row(rows - 1) - x.row(rows - 2)) / dt;
  for (Index r = 1; r + 1 < rows; ++r) d.row(r) = (x.row(r + 1) - x.row(r - 1)) / (2.0 * dt);
  return d;
}

}  // namespace

ReducedModel fit_model(const MatrixXd& states, const std::vector<double>& times, const TimeBasis& basis,
                       const MatrixXd& outputs, const IdentifyOptions& options) {
  const Index rows = states.rows();
  const Index n = states.cols();
  const auto b = static_cast<Index>(basis.size());
  require(n >= 1, ErrorCode::kInvalidArgument, "fit_model: empty state");
  require(static_cast<Index>(times.size()) == rows && outputs.rows() == rows, ErrorCode::kShapeMismatch,
          "fit_model: states, times and outputs must have the same number of rows");
  require(rows >= 3, ErrorCode::kTooShort, "fit_model: need at least 3 state rows");
  const double dt = times[1] - times[0];
  require(dt > 0.0, ErrorCode::kInvalidArgument, "fit_model: times must increase");

  const bool discrete = options.mode == ModelMode::kDiscrete;
  const Index usable = discrete ? rows - 1 : rows;
  if (usable < n + b + 1) {
    fail(ErrorCode::kInsufficientData, "fit_model: need at least " + std::to_string(n + b + 1) +
                                           " transitions, have " + std::to_string(usable));
  }

  MatrixXd phi = basis.evaluate(times);
  VectorXd scale = VectorXd::Ones(b);
  for (Index j = 0; j < b; ++j) {
    scale[j] = phi.col(j).cwiseAbs().maxCoeff();
    if (!(scale[j] > 0.0)) {
      fail(ErrorCode::kSingular, "basis term " + basis.terms()[static_cast<std::size_t>(j)].label() +
                                     " vanishes on the data; remove it");
    }
    phi.col(j) /= scale[j];
  }

  MatrixXd regressors(usable, n + b), targets(usable, n);
  if (discrete) {
    regressors << states.topRows(usable), phi.topRows(usable);
    targets = states.bottomRows(usable);
  } else {
    const MatrixXd smooth = moving_average(states, options.smoothing_window);
    regressors << smooth, phi;
    targets = differentiate(smooth, dt);
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(regressors);
  if (qr.rank() < n + b) {
    fail(ErrorCode::kSingular, "regressor matrix is rank-deficient (rank " + std::to_string(qr.rank()) + " of " +
                                   std::to_string(n + b) + "); try removing basis terms");
  }
  const MatrixXd coef = qr.solve(targets);

  ReducedModel model;
  model.mode = options.mode;
  model.dt = dt;
  model.basis = basis;
  model.dynamics = coef.topRows(n).transpose();
  model.psi = (coef.bottomRows(b).array().colwise() / scale.array()).matrix().transpose();
  if (b == 0) model.psi = MatrixXd::Zero(n, 0);
  const MatrixXd residual = targets - regressors * coef;
  model.residual_rms = (residual.array().square().colwise().sum() / static_cast<double>(usable)).sqrt().transpose();

  MatrixXd design(rows, n + 1);
  design << states, VectorXd::Ones(rows);
  Eigen::ColPivHouseholderQR<MatrixXd> out_qr(design);
  if (out_qr.rank() < n + 1) fail(ErrorCode::kSingular, "output map: state matrix is rank-deficient");
  const MatrixXd out_coef = out_qr.solve(outputs);
  model.output = out_coef.topRows(n).transpose();
  model.output_offset = out_coef.row(n).transpose();

  model.x0 = states.row(0).transpose();
  model.t0 = times[0];
  model.fit = fit_percent(outputs, simulate(model, model.x0, static_cast<std::size_t>(rows), model.t0));
  return model;
}

MatrixXd simulate(const ReducedModel& model, const VectorXd& x0, std::size_t steps, double t0) {
  require(steps >= 1, ErrorCode::kInvalidArgument, "simulate: steps must be at least 1");
  const Index n = model.dynamics.rows();
  require(x0.size() == n, ErrorCode::kShapeMismatch, "simulate: x0 has wrong dimension");
  const bool has_basis = model.basis.size() > 0;
  auto drive = [&](double t) -> VectorXd {
    return has_basis ? VectorXd(model.psi * model.basis.evaluate(t)) : VectorXd(VectorXd::Zero(n));
  };
  auto rhs = [&](const VectorXd& x, double t) -> VectorXd { return model.dynamics * x + drive(t); };

  MatrixXd out(static_cast<Index>(steps), model.output.rows());
  VectorXd x = x0;
  double t = t0;
  const double h = model.dt;
  for (std::size_t k = 0; k < steps; ++k) {
    if (!x.allFinite() || x.norm() > 1e12) {
      fail(ErrorCode::kDivergence, "simulate: model state overflow at step " + std::to_string(k));
    }
    out.row(static_cast<Index>(k)) = (model.output * x + model.output_offset).transpose();
    if (k + 1 == steps) break;
    if (model.mode == ModelMode::kDiscrete) {
      x = model.dynamics * x + drive(t);
    } else {
      const VectorXd k1 = rhs(x, t);
      const VectorXd k2 = rhs(x + 0.5 * h * k1, t + 0.5 * h);
      const VectorXd k3 = rhs(x + 0.5 * h * k2, t + 0.5 * h);
      const VectorXd k4 = rhs(x + h * k3, t + h);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    t += h;
  }
  return out;
}

std::vector<double> fit_percent(const MatrixXd& y, const MatrixXd& yhat) {
  require(y.rows() == yhat.rows() && y.cols() == yhat.cols(), ErrorCode::kShapeMismatch,
          "fit_percent: observed and simulated shapes differ");
  require(y.rows() >= 2, ErrorCode::kTooShort, "fit_percent: need at least 2 samples");
  std::vector<double> out;
  for (Index c = 0; c < y.cols(); ++c) {
    const double denom = (y.col(c).array() - y.col(c).mean()).matrix().norm();
    if (!(denom > 0.0)) fail(ErrorCode::kDegenerate, "fit_percent: observed channel " + std::to_string(c) + " is constant");
    out.push_back(100.0 * (1.0 - (y.col(c) - yhat.col(c)).norm() / denom));
  }
  return out;
}

double spectral_radius(const MatrixXd& m) {
  require(m.rows() == m.cols() && m.rows() > 0, ErrorCode::kShapeMismatch, "spectral_radius: matrix must be square");
  return Eigen::EigenSolver<MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

nlohmann::json to_json(const ReducedModel& model) {
  nlohmann::json j;
  j["mode"] = to_string(model.mode);
  j["n"] = model.n();
  j["dt"] = model.dt;
  j["t0"] = model.t0;
  j[model.mode == ModelMode::kDiscrete ? "B" : "A"] = matrix_to_rows(model.dynamics);
  auto psi = nlohmann::json::array();
  for (std::size_t k = 0; k < model.basis.size(); ++k) {
    const BasisTerm& term = model.basis.terms()[k];
    psi.push_back({{"term", term.label()},
                   {"params", {{"rate", term.rate}, {"phase", term.phase}}},
                   {"coeffs", vector_to_json(model.psi.col(static_cast<Index>(k)))}});
  }
  j["psi"] = psi;
  j["C"] = matrix_to_rows(model.output);
  j["offset"] = vector_to_json(model.output_offset);
  j["x0"] = vector_to_json(model.x0);
  j["residual_rms"] = vector_to_json(model.residual_rms);
  j["fit"] = model.fit;
  return j;
}

ReducedModel model_from_json(const nlohmann::json& j) {
  try {
    ReducedModel m;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode != "discrete" && mode != "continuous") fail(ErrorCode::kFormat, "model mode must be discrete or continuous");
    m.mode = mode == "discrete" ? ModelMode::kDiscrete : ModelMode::kContinuous;
    m.dt = j.at("dt").get<double>();
    m.t0 = j.value("t0", 0.0);
    m.dynamics = rows_to_matrix(j.at(m.mode == ModelMode::kDiscrete ? "B" : "A"), "dynamics");
    const Index n = m.dynamics.rows();
    require(m.dynamics.cols() == n && n == j.at("n").get<Index>(), ErrorCode::kFormat, "dynamics must be n x n");
    std::vector<BasisTerm> terms;
    const auto& psi = j.at("psi");
    m.psi = MatrixXd::Zero(n, static_cast<Index>(psi.size()));
    for (std::size_t k = 0; k < psi.size(); ++k) {
      BasisTerm term = parse_term(psi[k].at("term").get<std::string>());
      term.rate = psi[k].at("params").at("rate").get<double>();
      term.phase = psi[k].at("params").at("phase").get<double>();
      terms.push_back(term);
      const VectorXd coeffs = vector_from_json(psi[k].at("coeffs"));
      require(coeffs.size() == n, ErrorCode::kFormat, "psi coefficients must have n entries");
      m.psi.col(static_cast<Index>(k)) = coeffs;
    }
    m.basis = TimeBasis{std::move(terms)};
    m.output = rows_to_matrix(j.at("C"), "C");
    require(m.output.cols() == n, ErrorCode::kFormat, "C must have n columns");
    m.output_offset = j.contains("offset") ? vector_from_json(j.at("offset")) : VectorXd::Zero(m.output.rows());
    require(m.output_offset.size() == m.output.rows(), ErrorCode::kFormat, "offset must match the rows of C");
    m.x0 = j.contains("x0") ? vector_from_json(j.at("x0")) : VectorXd::Zero(n);
    m.residual_rms = j.contains("residual_rms") ? vector_from_json(j.at("residual_rms")) : VectorXd::Zero(n);
    m.fit = j.value("fit", std::vector<double>{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("model JSON: ") + e.what());
  }
}

}  // namespace nlts
