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
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlts/embedding.hpp"
#include "nlts/neighbors.hpp"
#include "nlts/regressor.hpp"
#include "nlts/series.hpp"

namespace nlts {

// ---------------------------------------------------------------------------
// Neighborhood tableau

/// kFull populates every trajectory cell; kGlobal only the center history;
/// kLocalNext only the neighbors' next points; kLocalWithCurrent the
/// neighbors' next and current points plus the center; kSynthetic a caller
/// mask.
enum class TableauLayout { kFull, kGlobal, kLocalNext, kLocalWithCurrent, kSynthetic };

std::string to_string(TableauLayout layout);
TableauLayout tableau_layout_from_string(const std::string& name);

/// (2r + 1) x (f + 1 + k) grid of embedding points, f = max(k, 1).
///
/// Row r is the center; neighbors alternate above and below it by rank
/// (1st above, 2nd below, 3rd two above, ...). Column f holds the current
/// points; columns to the left step forward in time, to the right backward.
/// Cells outside the layout are zero and flagged absent.
struct NeighborhoodTableau {
  std::size_t center_row = 0;
  std::size_t radius = 0;
  std::size_t history = 0;
  std::size_t future = 1;
  std::size_t dim = 0;
  TableauLayout layout = TableauLayout::kFull;
  std::vector<Neighbor> neighbors;  // ascending distance, 2r entries
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> present;
  std::vector<double> cells;

  std::size_t rows() const { return 2 * radius + 1; }
  std::size_t cols() const { return future + 1 + history; }
  /// Time offset of a column relative to its row's own sample.
  long offset(std::size_t col) const { return static_cast<long>(future) - static_cast<long>(col); }
  std::span<const double> cell(std::size_t row, std::size_t col) const {
    return {cells.data() + (row * cols() + col) * dim, dim};
  }
  std::size_t nonzero_cells() const;
};

using TableauMask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

TableauMask layout_mask(TableauLayout layout, std::size_t radius, std::size_t history);

/// Neighbors must have `history` predecessors and max(history, 1)
/// successors; `synthetic` is required for (and only for) kSynthetic.
NeighborhoodTableau build_tableau(const DelayEmbedding& emb, const NeighborIndex& idx, std::size_t row,
                                  std::size_t radius, std::size_t history, TableauLayout layout,
                                  const std::optional<TableauMask>& synthetic = std::nullopt);

// ---------------------------------------------------------------------------
// Preprocessing features

enum class FeatureMethod { kLagged = 1, kMean = 2, kNeighborMean = 3, kWeightedMean = 4, kPastError = 5 };

struct FeatureSpec {
  FeatureMethod method = FeatureMethod::kLagged;
  std::vector<std::size_t> args;

  /// "m1(0,1)" style text.
  static FeatureSpec parse(const std::string& text);
  std::string label() const;
};

/// Space- or semicolon-separated list of FeatureSpec texts.
std::vector<FeatureSpec> parse_feature_list(const std::string& text);

/// Past forecast errors per model structure, oldest first.
using ErrorHistory = std::map<std::string, std::vector<double>>;

struct FeatureContext {
  const TimeSeries* series = nullptr;  // channel 0 is the observable
  const DelayEmbedding* embedding = nullptr;
  const NeighborIndex* index = nullptr;
  const ErrorHistory* errors = nullptr;
  std::string structure;  // key into `errors`
};

struct FeatureVector {
  Eigen::VectorXd values;
  std::vector<std::string> warnings;
};

/// Features for embedding row `row`, concatenated in the order given.
/// m1(k..): y(t - k); m2(k..): mean of the last k samples up to y(t);
/// m3(k..): mean successor value of the k nearest neighbors; m4(k..): the
/// last k samples weighted k, k-1, ..., 1 from newest; m5(k..): error k
/// steps back in the structure's history.
FeatureVector preprocess_features(const FeatureContext& context, std::size_t row, std::span<const FeatureSpec> specs);

/// Largest look-back (in samples) any listed feature needs.
std::size_t feature_lookback(std::span<const FeatureSpec> specs);

// ---------------------------------------------------------------------------
// Model quality and selection

/// Model input for an embedding row.
using FeatureFn = std::function<Eigen::VectorXd(std::size_t row)>;

/// The row's own coordinates as features.
FeatureFn embedding_features(const DelayEmbedding& emb);

/// Sum over the k nearest neighbors (with successors) of the squared error
/// between their next observable value and the model's forecast.
double e_psi(const PredictorModel& model, const FeatureFn& features, const DelayEmbedding& emb,
             const NeighborIndex& idx, std::size_t row, std::size_t k);

struct Candidate {
  double forecast = 0.0;
  double error = 0.0;
};

struct Selection {
  std::size_t index = 0;
  double forecast = 0.0;  // 0 when gated
  double error = 0.0;
  bool gated = false;
};

/// Minimal-error candidate, lowest index on ties; gated when its error >= gate.
Selection select_prediction(std::span<const Candidate> candidates, std::optional<double> gate = std::nullopt);

struct LocalStability {
  double lambda_d = 0.0;  // +inf when all successors coincide
  double j1 = 0.0;
  std::size_t j2 = 0;
};

LocalStability local_stability(const DelayEmbedding& emb, std::span<const std::size_t> region);

double composite_J(double j1, double j2, double lambda_min);

/// Mean successor point of the n nearest admissible neighbors.
Eigen::VectorXd local_predict(const DelayEmbedding& emb, const NeighborIndex& idx, std::size_t row, std::size_t n,
                              const NeighborIndex::RowFilter& accept = {});
Eigen::VectorXd local_predict_point(const DelayEmbedding& emb, const NeighborIndex& idx, std::span<const double> point,
                                    std::size_t n, const NeighborIndex::RowFilter& accept = {},
                                    std::optional<std::size_t> reference_time = std::nullopt);

// ---------------------------------------------------------------------------
// Stepwise reconstruction

/// Transformed series aligned with the source samples; NaN where undefined.
struct FeatureSeries {
  std::string name;
  std::vector<double> values;
};

/// sign(y(t) - y(t-1)); undefined at t = 0.
FeatureSeries sign_change_feature(const TimeSeries& series);

/// sign(forecast) / error.
double confidence_value(double forecast, double error);

/// confidence_value of a local averaging forecast at every sample, with the
/// error taken over the k nearest neighbors of an (m, tau) embedding.
FeatureSeries confidence_feature(const TimeSeries& series, std::size_t m, std::size_t tau, std::size_t k);

struct StepwiseParams {
  std::size_t m_min = 1;
  std::size_t m_max = 2;
  std::size_t tau_min = 1;
  std::size_t tau_max = 1;
  double lambda_min = 0.0;
  /// Region D: rows within this distance of the current point.
  double radius = 0.1;
  std::optional<double> gate;  // applied to the winner's E_psi
};

struct StepwiseConfig {
  std::size_t m = 0;
  std::size_t tau = 0;
  std::vector<std::size_t> features;  // catalog indices
  LocalStability stability;
  double j = 0.0;
};

struct StepwiseResult {
  StepwiseConfig best;
  std::vector<std::string> feature_names;
  std::vector<StepwiseConfig> evaluated;
  Eigen::VectorXd forecast;  // next point in the winner's coordinates
  /// Squared spread of the region's successors around the forecast.
  double e_psi = 0.0;
  bool gated = false;
};

/// Coordinate i of a configuration is feature_i(t - (i - 1) tau); the current
/// point is the last sample where every coordinate is defined.
DelayEmbedding feature_embedding(std::span<const FeatureSeries> catalog, std::span<const std::size_t> features,
                                 std::size_t tau);

StepwiseResult stepwise_reconstruct(std::span<const FeatureSeries> catalog, const StepwiseParams& params);

}  // namespace nlts
