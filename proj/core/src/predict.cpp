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

#include "nlts/predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "nlts/error.hpp"

namespace nlts {

using Eigen::Index;
using Eigen::VectorXd;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

std::size_t row_of_rank(std::size_t rank, std::size_t radius) {
  // rank is 1-based: odd ranks above the center, even ranks below.
  return rank % 2 == 1 ? radius - (rank + 1) / 2 : radius + rank / 2;
}

NeighborIndex::RowFilter with_successor(const DelayEmbedding& emb, const NeighborIndex::RowFilter& accept) {
  const std::size_t rows = emb.rows();
  return [rows, accept](std::size_t c) { return c + 1 < rows && (!accept || accept(c)); };
}

VectorXd mean_successor(const DelayEmbedding& emb, const std::vector<Neighbor>& hood) {
  VectorXd out = VectorXd::Zero(static_cast<Index>(emb.dim()));
  for (const auto& nb : hood) {
    const auto next = emb.row(nb.row + 1);
    for (std::size_t c = 0; c < next.size(); ++c) out[static_cast<Index>(c)] += next[c];
  }
  return out / static_cast<double>(hood.size());
}

}  // namespace

std::string to_string(TableauLayout layout) {
  switch (layout) {
    case TableauLayout::kFull:
      return "full";
    case TableauLayout::kGlobal:
      return "global";
    case TableauLayout::kLocalNext:
      return "local_next";
    case TableauLayout::kLocalWithCurrent:
      return "local_with_current";
    case TableauLayout::kSynthetic:
      return "synthetic";
  }
  return {};
}

TableauLayout tableau_layout_from_string(const std::string& name) {
  for (auto layout : {TableauLayout::kFull, TableauLayout::kGlobal, TableauLayout::kLocalNext,
                      TableauLayout::kLocalWithCurrent, TableauLayout::kSynthetic}) {
    if (to_string(layout) == name) return layout;
  }
  fail(ErrorCode::kUnknownName, "unknown tableau layout '" + name + "'");
}

std::size_t NeighborhoodTableau::nonzero_cells() const {
  std::size_t count = 0;
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < cols(); ++c) {
      if (!present(static_cast<Index>(r), static_cast<Index>(c))) continue;
      const auto v = cell(r, c);
      if (std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; })) ++count;
    }
  }
  return count;
}

TableauMask layout_mask(TableauLayout layout, std::size_t radius, std::size_t history) {
  require(layout != TableauLayout::kSynthetic, ErrorCode::kInvalidArgument, "synthetic layouts carry their own mask");
  const std::size_t future = std::max<std::size_t>(history, 1);
  const auto rows = static_cast<Index>(2 * radius + 1), cols = static_cast<Index>(future + 1 + history);
  const auto center = static_cast<Index>(radius), now = static_cast<Index>(future);
  TableauMask mask = TableauMask::Constant(rows, cols, false);
  switch (layout) {
    case TableauLayout::kFull:
      mask.setConstant(true);
      mask.row(center).head(now).setConstant(false);
      break;
    case TableauLayout::kGlobal:
      mask.row(center).tail(cols - now).setConstant(true);
      break;
    case TableauLayout::kLocalNext:
      mask.col(now - 1).setConstant(true);
      mask(center, now - 1) = false;
      break;
    case TableauLayout::kLocalWithCurrent:
      mask.col(now - 1).setConstant(true);
      mask.col(now).setConstant(true);
      mask(center, now - 1) = false;
      break;
    case TableauLayout::kSynthetic:
      break;
  }
  return mask;
}

NeighborhoodTableau build_tableau(const DelayEmbedding& emb, const NeighborIndex& idx, std::size_t row,
                                  std::size_t radius, std::size_t history, TableauLayout layout,
                                  const std::optional<TableauMask>& synthetic) {
  const std::size_t rows = emb.rows();
  require(row < rows, ErrorCode::kInvalidArgument, "tableau: row out of range");
  require(radius >= 1, ErrorCode::kInvalidArgument, "tableau: radius r must be at least 1");
  require(row >= history, ErrorCode::kInsufficientData, "tableau: center row lacks the requested history");
  const std::size_t future = std::max<std::size_t>(history, 1);

  NeighborhoodTableau tab;
  tab.center_row = row;
  tab.radius = radius;
  tab.history = history;
  tab.future = future;
  tab.dim = emb.dim();
  tab.layout = layout;
  if (layout == TableauLayout::kSynthetic) {
    require(synthetic.has_value(), ErrorCode::kInvalidArgument, "synthetic layout needs a mask");
    const TableauMask& mask = *synthetic;
    require(mask.rows() == static_cast<Index>(tab.rows()) && mask.cols() == static_cast<Index>(tab.cols()),
            ErrorCode::kShapeMismatch, "synthetic mask has the wrong shape");
    require(!mask.row(static_cast<Index>(radius)).head(static_cast<Index>(future)).any(), ErrorCode::kInvalidArgument,
            "synthetic mask cannot expose the center's future");
    require(mask.any(), ErrorCode::kInvalidArgument, "synthetic mask is empty");
    for (auto printed : {TableauLayout::kGlobal, TableauLayout::kLocalNext, TableauLayout::kLocalWithCurrent}) {
      require(mask != layout_mask(printed, radius, history), ErrorCode::kInvalidArgument,
              "synthetic mask equals the " + to_string(printed) + " layout");
    }
    tab.present = mask;
  } else {
    require(!synthetic.has_value(), ErrorCode::kInvalidArgument, "a mask is only accepted for the synthetic layout");
    tab.present = layout_mask(layout, radius, history);
  }

  const auto admissible = [&](std::size_t c) { return c >= history && c + future < rows; };
  try {
    tab.neighbors = idx.knn(row, 2 * radius, admissible);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInsufficientData) throw;
    const std::size_t found = idx.within(row, std::numeric_limits<double>::infinity(), admissible).size();
    fail(ErrorCode::kInsufficientData, "tableau: only " + std::to_string(found) +
                                           " admissible neighbors; largest achievable r is " +
                                           std::to_string(found / 2));
  }

  tab.cells.assign(tab.rows() * tab.cols() * tab.dim, 0.0);
  auto fill = [&](std::size_t grid_row, std::size_t sample_row) {
    for (std::size_t c = 0; c < tab.cols(); ++c) {
      if (!tab.present(static_cast<Index>(grid_row), static_cast<Index>(c))) continue;
      const auto src = emb.row(static_cast<std::size_t>(static_cast<long>(sample_row) + tab.offset(c)));
      std::copy(src.begin(), src.end(), tab.cells.begin() + static_cast<long>((grid_row * tab.cols() + c) * tab.dim));
    }
  };
  fill(radius, row);
  for (std::size_t rank = 1; rank <= tab.neighbors.size(); ++rank) {
    fill(row_of_rank(rank, radius), tab.neighbors[rank - 1].row);
  }
  return tab;
}

// ---------------------------------------------------------------------------

FeatureSpec FeatureSpec::parse(const std::string& raw) {
  const std::string text = trim(raw);
  const auto open = text.find('(');
  if (text.size() < 5 || text[0] != 'm' || open != 2 || text.back() != ')') {
    fail(ErrorCode::kParse, "feature '" + text + "': expected mN(k1,...,kn)");
  }
  const int id = text[1] - '0';
  if (id < 1 || id > 5) fail(ErrorCode::kParse, "feature '" + text + "': method must be m1..m5");
  FeatureSpec spec;
  spec.method = static_cast<FeatureMethod>(id);
  const std::string body = text.substr(3, text.size() - 4);
  std::size_t start = 0;
  while (true) {
    const auto sep = body.find(',', start);
    const std::string tok = trim(body.substr(start, sep - start));
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
      fail(ErrorCode::kParse, "feature '" + text + "': arguments must be non-negative integers");
    }
    spec.args.push_back(static_cast<std::size_t>(std::stoull(tok)));
    if (sep == std::string::npos) break;
    start = sep + 1;
  }
  if (spec.method != FeatureMethod::kLagged) {
    for (std::size_t a : spec.args) {
      if (a == 0) fail(ErrorCode::kParse, "feature '" + text + "': counts and lags must be at least 1");
    }
  }
  return spec;
}

std::string FeatureSpec::label() const {
  std::string out = "m" + std::to_string(static_cast<int>(method)) + "(";
  for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + std::to_string(args[i]);
  return out + ")";
}

std::vector<FeatureSpec> parse_feature_list(const std::string& text) {
  std::vector<FeatureSpec> out;
  std::string current;
  int depth = 0;
  for (char ch : text + " ") {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth == 0 && (ch == ' ' || ch == ';' || ch == '\t')) {
      if (!trim(current).empty()) out.push_back(FeatureSpec::parse(current));
      current.clear();
    } else {
      current += ch;
    }
  }
  require(!out.empty(), ErrorCode::kParse, "empty feature list");
  return out;
}

std::size_t feature_lookback(std::span<const FeatureSpec> specs) {
  std::size_t back = 0;
  for (const auto& s : specs) {
    for (std::size_t a : s.args) {
      switch (s.method) {
        case FeatureMethod::kLagged:
          back = std::max(back, a);
          break;
        case FeatureMethod::kMean:
        case FeatureMethod::kWeightedMean:
          back = std::max(back, a - 1);
          break;
        default:
          break;
      }
    }
  }
  return back;
}

FeatureVector preprocess_features(const FeatureContext& ctx, std::size_t row, std::span<const FeatureSpec> specs) {
  require(ctx.series != nullptr && ctx.embedding != nullptr, ErrorCode::kInvalidArgument,
          "features: series and embedding are required");
  const DelayEmbedding& emb = *ctx.embedding;
  require(row < emb.rows(), ErrorCode::kInvalidArgument, "features: row out of range");
  const std::size_t t = emb.time(row);
  auto y = [&](std::size_t back) {
    if (back > t) {
      fail(ErrorCode::kInsufficientData, "features: lag " + std::to_string(back) + " reaches before the series start");
    }
    return ctx.series->value(t - back, 0);
  };

  FeatureVector out;
  std::vector<double> values;
  for (const auto& spec : specs) {
    for (std::size_t k : spec.args) {
      switch (spec.method) {
        case FeatureMethod::kLagged:
          values.push_back(y(k));
          break;
        case FeatureMethod::kMean: {
          double sum = 0.0;
          for (std::size_t j = 0; j < k; ++j) sum += y(j);
          values.push_back(sum / static_cast<double>(k));
          break;
        }
        case FeatureMethod::kWeightedMean: {
          double sum = 0.0;
          for (std::size_t j = 0; j < k; ++j) sum += static_cast<double>(k - j) * y(j);
          values.push_back(sum / (0.5 * static_cast<double>(k * (k + 1))));
          break;
        }
        case FeatureMethod::kNeighborMean: {
          require(ctx.index != nullptr, ErrorCode::kInvalidArgument, "features: m3 needs a neighbor index");
          const auto hood = ctx.index->knn(row, k, with_successor(emb, {}));
          double sum = 0.0;
          for (const auto& nb : hood) sum += emb.at(nb.row + 1, 0);
          values.push_back(sum / static_cast<double>(k));
          break;
        }
        case FeatureMethod::kPastError: {
          if (ctx.errors == nullptr) {
            fail(ErrorCode::kInvalidArgument, "feature " + spec.label() + " needs a model error history");
          }
          const auto it = ctx.errors->find(ctx.structure);
          if (it == ctx.errors->end() || it->second.size() < k) {
            values.push_back(0.0);
            out.warnings.push_back("no stored error " + std::to_string(k) + " steps back for structure '" +
                                   ctx.structure + "'; using 0");
          } else {
            values.push_back(it->second[it->second.size() - k]);
          }
          break;
        }
      }
    }
  }
  out.values = Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
  return out;
}

// ---------------------------------------------------------------------------

FeatureFn embedding_features(const DelayEmbedding& emb) {
  return [&emb](std::size_t row) {
    const auto r = emb.row(row);
    return VectorXd(Eigen::Map<const VectorXd>(r.data(), static_cast<Index>(r.size())));
  };
}

double e_psi(const PredictorModel& model, const FeatureFn& features, const DelayEmbedding& emb,
             const NeighborIndex& idx, std::size_t row, std::size_t k) {
  require(k >= 1, ErrorCode::kInvalidArgument, "e_psi: k must be at least 1");
  const auto hood = idx.knn(row, k, with_successor(emb, {}));
  double sum = 0.0;
  for (const auto& nb : hood) {
    const double e = emb.at(nb.row + 1, 0) - model.predict(features(nb.row));
    sum += e * e;
  }
  return sum;
}

Selection select_prediction(std::span<const Candidate> candidates, std::optional<double> gate) {
  require(!candidates.empty(), ErrorCode::kInvalidArgument, "select_prediction: no candidates");
  Selection s;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (candidates[i].error < candidates[s.index].error) s.index = i;
  }
  s.error = candidates[s.index].error;
  s.forecast = candidates[s.index].forecast;
  if (gate && s.error >= *gate) {
    s.gated = true;
    s.forecast = 0.0;
  }
  return s;
}

LocalStability local_stability(const DelayEmbedding& emb, std::span<const std::size_t> region) {
  require(region.size() >= 2, ErrorCode::kInsufficientData, "local_stability: region needs at least 2 points");
  for (std::size_t r : region) {
    require(r + 1 < emb.rows(), ErrorCode::kInsufficientData,
            "local_stability: row " + std::to_string(r) + " has no successor");
  }
  double widest = 0.0;
  for (std::size_t i = 0; i < region.size(); ++i) {
    for (std::size_t j = i + 1; j < region.size(); ++j) {
      widest = std::max(widest, euclidean(emb.row(region[i] + 1), emb.row(region[j] + 1)));
    }
  }
  LocalStability out;
  out.lambda_d = widest > 0.0 ? 1.0 / widest : std::numeric_limits<double>::infinity();
  out.j1 = out.lambda_d;
  out.j2 = region.size();
  return out;
}

double composite_J(double j1, double j2, double lambda_min) { return j1 >= lambda_min ? j2 : 0.0; }

VectorXd local_predict(const DelayEmbedding& emb, const NeighborIndex& idx, std::size_t row, std::size_t n,
                       const NeighborIndex::RowFilter& accept) {
  require(n >= 1, ErrorCode::kInvalidArgument, "local_predict: need at least one neighbor");
  return mean_successor(emb, idx.knn(row, n, with_successor(emb, accept)));
}

VectorXd local_predict_point(const DelayEmbedding& emb, const NeighborIndex& idx, std::span<const double> point,
                             std::size_t n, const NeighborIndex::RowFilter& accept,
                             std::optional<std::size_t> reference_time) {
  require(n >= 1, ErrorCode::kInvalidArgument, "local_predict: need at least one neighbor");
  return mean_successor(emb, idx.knn_point(point, n, with_successor(emb, accept), reference_time));
}

// ---------------------------------------------------------------------------

FeatureSeries sign_change_feature(const TimeSeries& series) {
  FeatureSeries f{"sign_change", std::vector<double>(series.size(), kNaN)};
  for (std::size_t t = 1; t < series.size(); ++t) f.values[t] = sign(series.value(t, 0) - series.value(t - 1, 0));
  return f;
}

double confidence_value(double forecast, double error) {
  require(error > 0.0, ErrorCode::kDegenerate, "confidence: neighbor error must be positive");
  return sign(forecast) / error;
}

FeatureSeries confidence_feature(const TimeSeries& series, std::size_t m, std::size_t tau, std::size_t k) {
  require(k >= 1, ErrorCode::kInvalidArgument, "confidence: k must be at least 1");
  const TimeSeries scalar = TimeSeries::scalar(series.channel(0), series.dt());
  const DelayEmbedding emb = embed(scalar, m, tau);
  const NeighborIndex idx(emb, 0);
  FeatureSeries f{"confidence", std::vector<double>(series.size(), kNaN)};
  for (std::size_t r = 0; r < emb.rows(); ++r) {
    // Only rows whose successor is already observed at row r.
    const auto known = [r](std::size_t c) { return c + 1 <= r; };
    try {
      const auto hood = idx.knn(r, k, known);
      const double forecast = mean_successor(emb, hood)[0];
      double error = 0.0;
      for (const auto& nb : hood) {
        const auto inner = idx.knn(nb.row, k, known);
        const double e = emb.at(nb.row + 1, 0) - mean_successor(emb, inner)[0];
        error += e * e;
      }
      if (error > 0.0) f.values[emb.time(r)] = confidence_value(forecast, error);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientData) throw;
    }
  }
  return f;
}

DelayEmbedding feature_embedding(std::span<const FeatureSeries> catalog, std::span<const std::size_t> features,
                                 std::size_t tau) {
  require(!features.empty(), ErrorCode::kInvalidArgument, "feature embedding: no features");
  require(tau >= 1, ErrorCode::kInvalidArgument, "feature embedding: tau must be at least 1");
  const std::size_t n = catalog[features[0]].values.size();
  for (std::size_t f : features) {
    require(f < catalog.size(), ErrorCode::kInvalidArgument, "feature embedding: feature index out of range");
    require(catalog[f].values.size() == n, ErrorCode::kShapeMismatch, "feature series lengths differ");
  }
  const std::size_t m = features.size();
  const std::size_t span_back = (m - 1) * tau;
  auto defined = [&](std::size_t t) {
    for (std::size_t i = 0; i < m; ++i) {
      if (!std::isfinite(catalog[features[i]].values[t - i * tau])) return false;
    }
    return true;
  };
  // Last contiguous run of fully defined samples.
  std::size_t end = n;
  while (end > span_back && !defined(end - 1)) --end;
  std::size_t begin = end;
  while (begin > span_back && defined(begin - 1)) --begin;
  require(end - begin >= 3, ErrorCode::kTooShort, "feature embedding: fewer than 3 defined samples");
  if (end != n) {
    fail(ErrorCode::kInsufficientData, "feature embedding: the current sample is undefined for this configuration");
  }
  std::vector<double> points;
  std::vector<std::size_t> times;
  points.reserve((end - begin) * m);
  for (std::size_t t = begin; t < end; ++t) {
    for (std::size_t i = 0; i < m; ++i) points.push_back(catalog[features[i]].values[t - i * tau]);
    times.push_back(t);
  }
  return DelayEmbedding(m, tau, 1, 1.0, std::move(points), std::move(times));
}

namespace {

bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

StepwiseResult stepwise_reconstruct(std::span<const FeatureSeries> catalog, const StepwiseParams& params) {
  require(!catalog.empty(), ErrorCode::kInvalidArgument, "stepwise: empty feature catalog");
  require(params.m_min >= 1 && params.m_min <= params.m_max, ErrorCode::kInvalidArgument, "stepwise: bad m range");
  require(params.m_max <= catalog.size(), ErrorCode::kInvalidArgument,
          "stepwise: m_max exceeds the number of catalog features");
  require(params.tau_min >= 1 && params.tau_min <= params.tau_max, ErrorCode::kInvalidArgument,
          "stepwise: bad tau range");
  require(params.radius > 0.0, ErrorCode::kInvalidArgument, "stepwise: radius must be positive");

  StepwiseResult result;
  for (const auto& f : catalog) result.feature_names.push_back(f.name);
  std::optional<std::size_t> best;

  auto region_of = [&](const DelayEmbedding& emb, const NeighborIndex& idx) {
    std::vector<std::size_t> rows;
    for (const auto& nb : idx.within(emb.rows() - 1, params.radius, with_successor(emb, {}))) rows.push_back(nb.row);
    return rows;
  };

  // Enumeration order equals the tie-break order, so a strict improvement
  // test keeps the preferred configuration.
  for (std::size_t m = params.m_min; m <= params.m_max; ++m) {
    for (std::size_t tau = params.tau_min; tau <= params.tau_max; ++tau) {
      std::vector<std::size_t> combo(m);
      std::iota(combo.begin(), combo.end(), std::size_t{0});
      do {
        StepwiseConfig cfg{m, tau, combo, {}, 0.0};
        try {
          const DelayEmbedding emb = feature_embedding(catalog, combo, tau);
          const NeighborIndex idx(emb, 0);
          const auto region = region_of(emb, idx);
          if (region.size() >= 2) {
            cfg.stability = local_stability(emb, region);
            cfg.j = composite_J(cfg.stability.j1, static_cast<double>(cfg.stability.j2), params.lambda_min);
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kTooShort && e.code() != ErrorCode::kInsufficientData) throw;
        }
        result.evaluated.push_back(cfg);
        if (cfg.j > 0.0 && (!best || cfg.j > result.evaluated[*best].j)) best = result.evaluated.size() - 1;
      } while (next_combination(combo, catalog.size()));
    }
  }
  if (!best) {
    fail(ErrorCode::kNoStableRegion, "stepwise: no configuration reaches lambda_min; lower it or widen the radius");
  }
  result.best = result.evaluated[*best];

  const DelayEmbedding emb = feature_embedding(catalog, result.best.features, result.best.tau);
  const NeighborIndex idx(emb, 0);
  const auto region = region_of(emb, idx);
  std::vector<Neighbor> hood;
  for (std::size_t r : region) hood.push_back({r, 0.0});
  result.forecast = mean_successor(emb, hood);
  for (std::size_t r : region) {
    const auto next = emb.row(r + 1);
    for (std::size_t c = 0; c < next.size(); ++c) {
      const double e = next[c] - result.forecast[static_cast<Index>(c)];
      result.e_psi += e * e;
    }
  }
  if (params.gate && result.e_psi >= *params.gate) result.gated = true;
  return result;
}

}  // namespace nlts
