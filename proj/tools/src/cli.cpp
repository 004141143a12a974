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

#include "nlts_cli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nlts/embedding.hpp"
#include "nlts/error.hpp"
#include "nlts/identify.hpp"
#include "nlts/invariants.hpp"
#include "nlts/lyapunov.hpp"
#include "nlts/neighbors.hpp"
#include "nlts/predict.hpp"
#include "nlts/random.hpp"
#include "nlts/refsys.hpp"
#include "nlts/regressor.hpp"
#include "nlts/report.hpp"
#include "nlts/series.hpp"
#include "nlts/symmetry.hpp"

namespace nlts::cli {

namespace {

using nlohmann::json;

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string format = "json";
};

struct InputOptions {
  std::string path;
  std::string delimiter;
  std::string header = "auto";
  bool time_column = false;
  double dt = 1.0;
  std::size_t channel = 0;
};

struct Context {
  Globals globals;
  std::ostream& out;
  std::ostream& err;
};

void add_input(CLI::App* app, InputOptions& o, const std::string& flag = "--input,-i", bool required = true) {
  auto* opt = app->add_option(flag, o.path, "CSV series, one column per channel")->check(CLI::ExistingFile);
  if (required) opt->required();
  app->add_option("--delimiter", o.delimiter, "Field separator (default: comma or whitespace)");
  app->add_option("--header", o.header, "Header row: auto, yes or no")
      ->check(CLI::IsMember({"auto", "yes", "no"}));
  app->add_flag("--time-column", o.time_column, "First column holds sample times");
  app->add_option("--dt", o.dt, "Sampling step when there is no time column")->check(CLI::PositiveNumber);
  app->add_option("--channel", o.channel, "Channel analysed by scalar methods");
}

TimeSeries load(const InputOptions& o) {
  CsvOptions opts;
  if (!o.delimiter.empty()) {
    require(o.delimiter.size() == 1, ErrorCode::kInvalidArgument, "delimiter must be a single character");
    opts.delimiter = o.delimiter[0];
  }
  opts.header = o.header == "yes" ? HeaderMode::kPresent : (o.header == "no" ? HeaderMode::kAbsent : HeaderMode::kAuto);
  opts.time_column = o.time_column;
  opts.dt = o.dt;
  return load_csv(o.path, opts);
}

TimeSeries scalar_channel(const TimeSeries& s, std::size_t channel) {
  require(channel < s.channels(), ErrorCode::kInvalidArgument,
          "channel " + std::to_string(channel) + " out of range (series has " + std::to_string(s.channels()) + ")");
  return TimeSeries::scalar(s.channel(channel), s.dt(), s.name());
}

json input_params(const InputOptions& o) {
  return {{"input", o.path},
          {"delimiter", o.delimiter.empty() ? "auto" : o.delimiter},
          {"header", o.header},
          {"time_column", o.time_column},
          {"dt", o.dt},
          {"channel", o.channel}};
}

std::string resolve_output(const std::string& path) {
  if (path.empty() || std::filesystem::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv("NLTS_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
    return (std::filesystem::path(dir) / path).string();
  }
  return path;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorCode::kInvalidArgument, "cannot write " + path);
  f << text;
  require(static_cast<bool>(f), ErrorCode::kInvalidArgument, "failed writing " + path);
}

std::string render(const json& j) { return rounded(j).dump(2) + "\n"; }

/// JSON report, or the CSV alternative when --format csv is requested.
void emit(Context& ctx, const json& report, const std::function<std::string()>& csv = {}) {
  std::string text;
  if (ctx.globals.format == "csv") {
    require(static_cast<bool>(csv), ErrorCode::kInvalidArgument, "this command has no CSV output");
    text = csv();
    ctx.err << "params: " << rounded(report.at("params")).dump() << "\n";
  } else {
    text = render(report);
  }
  if (ctx.globals.out.empty()) {
    ctx.out << text;
  } else {
    write_file(resolve_output(ctx.globals.out), text);
  }
}

json header(const std::string& command, json params) { return {{"command", command}, {"params", std::move(params)}}; }

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(ErrorCode::kParse, "bad number '" + tok + "'");
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string system;
  std::size_t steps = 1000;
  std::optional<double> dt;
  std::string x0;
  std::size_t transient = 1000;
  bool time = false;
};

void run_simulate(Context& ctx, const SimulateOptions& o) {
  const ReferenceSystem sys = catalog(o.system);
  GenerateOptions g;
  g.transient = o.transient;
  g.dt = o.dt;
  if (!o.x0.empty()) {
    const auto v = parse_doubles(o.x0);
    require(v.size() == sys.dimension, ErrorCode::kShapeMismatch,
            "--x0 needs " + std::to_string(sys.dimension) + " values");
    g.x0 = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  const TimeSeries s = generate(sys, o.steps, g);
  const Eigen::VectorXd x0 = g.x0.value_or(sys.default_state);
  json params = {{"system", sys.name},
                 {"kind", sys.kind == SystemKind::kFlow ? "flow" : "map"},
                 {"steps", o.steps},
                 {"dt", s.dt()},
                 {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                 {"transient", o.transient},
                 {"time_column", o.time},
                 {"parameters", sys.parameters},
                 {"seed", ctx.globals.seed}};
  const std::string csv = to_csv(s, o.time);
  if (ctx.globals.out.empty()) {
    ctx.out << csv;
    ctx.err << "params: " << rounded(params).dump() << "\n";
  } else {
    const std::string path = resolve_output(ctx.globals.out);
    write_file(path, csv);
    json report = header("simulate", params);
    report["rows"] = s.size();
    report["channels"] = s.channels();
    report["output"] = path;
    ctx.out << render(report);
  }
}

struct MiOptions {
  InputOptions in;
  std::size_t tau_max = 0;
  std::size_t bins = 0;
};

void run_mi(Context& ctx, const MiOptions& o) {
  const TimeSeries s = load(o.in);
  const std::size_t n = s.size();
  const std::size_t tau_max = o.tau_max ? o.tau_max : std::min<std::size_t>(100, n / 2 > 1 ? n / 2 - 1 : 1);
  const std::size_t bins = o.bins ? o.bins : default_mi_bins(n);
  require(o.in.channel < s.channels(), ErrorCode::kInvalidArgument, "channel out of range");
  const auto profile = mutual_information_profile(s, o.in.channel, tau_max, bins);
  const DelayChoice choice = select_delay(profile);
  json params = input_params(o.in);
  params["tau_max"] = tau_max;
  params["bins"] = bins;
  params["seed"] = ctx.globals.seed;
  json report = header("mi", params);
  report["profile"] = to_json(profile);
  report["delay"] = {{"tau", choice.tau}, {"interior_minimum", choice.interior_minimum}};
  emit(ctx, report, [&] { return mi_profile_to_csv(profile); });
}

struct EmbedOptions {
  InputOptions in;
  std::size_t m = 2;
  std::size_t tau = 1;
  bool all_channels = false;
};

void run_embed(Context& ctx, const EmbedOptions& o) {
  const TimeSeries raw = load(o.in);
  const TimeSeries s = o.all_channels ? raw : scalar_channel(raw, o.in.channel);
  const DelayEmbedding emb = embed(s, o.m, o.tau);
  json params = input_params(o.in);
  params["m"] = o.m;
  params["tau"] = o.tau;
  params["all_channels"] = o.all_channels;
  params["seed"] = ctx.globals.seed;
  json report = header("embed", params);
  report["rows"] = emb.rows();
  report["dim"] = emb.dim();
  report["columns"] = emb.column_names();
  report["first_time"] = emb.time(0);
  report["default_theiler"] = default_theiler(emb);
  report["diameter"] = attractor_diameter(emb);
  emit(ctx, report, [&] { return embedding_to_csv(emb); });
}

struct DimensionOptions {
  InputOptions in;
  std::size_t m = 2;
  std::size_t tau = 1;
  bool states = false;
  long theiler = -1;
  double q = 2.0;
  double eps_min = 1e-3;
  double eps_max = 1.0;
  std::size_t eps_count = 24;
  std::optional<double> fit_min;
  std::optional<double> fit_max;
  bool exclude_self = false;
};

void run_dimension(Context& ctx, const DimensionOptions& o) {
  const TimeSeries raw = load(o.in);
  const DelayEmbedding emb = o.states ? embed_states(raw) : embed(scalar_channel(raw, o.in.channel), o.m, o.tau);
  const double diam = attractor_diameter(emb);
  const auto eps = geometric_grid(o.eps_min * diam, o.eps_max * diam, o.eps_count);
  std::optional<std::pair<double, double>> range;
  if (o.fit_min || o.fit_max) {
    require(o.fit_min && o.fit_max, ErrorCode::kInvalidArgument, "--fit-min and --fit-max go together");
    range = std::make_pair(*o.fit_min, *o.fit_max);
  }
  const std::size_t theiler = o.theiler < 0 ? default_theiler(emb) : static_cast<std::size_t>(o.theiler);
  json params = input_params(o.in);
  params.update({{"m", emb.m()}, {"tau", emb.tau()}, {"states", o.states}, {"theiler", theiler}, {"q", o.q},
                 {"eps_min", o.eps_min}, {"eps_max", o.eps_max}, {"eps_count", o.eps_count},
                 {"fit_range", range ? json{range->first, range->second} : json(nullptr)},
                 {"normalization", o.exclude_self ? "exclude_self" : "all_ordered"}, {"seed", ctx.globals.seed}});
  json report = header("dimension", params);
  report["diameter"] = diam;
  if (o.q == 2.0) {
    const CorrelationCurve curve = correlation_integral(
        emb, eps, theiler, o.exclude_self ? PairNormalization::kExcludeSelf : PairNormalization::kAllOrdered);
    report["method"] = "correlation";
    report["curve"] = to_json(curve);
    report["estimate"] = to_json(correlation_dimension(curve, range));
    emit(ctx, report, [&] { return correlation_curve_to_csv(curve); });
  } else {
    report["method"] = "box";
    report["estimate"] = to_json(generalized_dimension(emb, o.q, eps, range));
    emit(ctx, report);
  }
}

struct LyapunovOptions {
  InputOptions in;
  std::string method = "wolf";
  std::string system;
  std::size_t m = 2;
  std::size_t tau = 1;
  long theiler = -1;
  std::size_t horizon = 20;
  std::size_t stride = 1;
  std::optional<double> eps0;
  std::optional<std::size_t> fit_first;
  std::optional<std::size_t> fit_last;
  std::size_t evolve = 1;
  double max_len = 0.0;
  double min_len = 0.0;
  double angle_tol = 0.8;
  bool log2 = false;
  std::size_t n_exp = 0;
  std::size_t steps = 0;
  std::size_t k_neighbors = 0;
  std::size_t renorm = 1;
  std::size_t transient = 1000;
  std::optional<double> sys_dt;
};

void run_lyapunov(Context& ctx, const LyapunovOptions& o) {
  json params = {{"method", o.method}, {"seed", ctx.globals.seed}};
  if (o.method == "benettin" && !o.system.empty()) {
    const ReferenceSystem sys = catalog(o.system);
    BenettinExactParams p;
    p.n_exp = o.n_exp;
    p.steps = o.steps ? o.steps : 10000;
    p.renorm_interval = o.renorm;
    p.transient = o.transient;
    p.dt = o.sys_dt;
    const LyapunovSpectrum spectrum = benettin_spectrum(sys, p);
    params.update({{"system", sys.name}, {"mode", "exact"}, {"n_exp", o.n_exp}, {"steps", p.steps},
                   {"renorm_interval", o.renorm}, {"transient", o.transient}, {"dt", spectrum.dt}});
    json report = header("lyapunov", params);
    report["spectrum"] = to_json(spectrum);
    report["checks"] = to_json(spectrum_checks(spectrum, sys.kind));
    const auto per_time = spectrum.per_time();
    report["kaplan_yorke"] = kaplan_yorke(per_time);
    emit(ctx, report);
    return;
  }
  if (o.in.path.empty()) throw CLI::RequiredError("--input (or --system with --method benettin)");

  const DelayEmbedding emb = embed(scalar_channel(load(o.in), o.in.channel), o.m, o.tau);
  const std::size_t theiler = o.theiler < 0 ? default_theiler(emb) : static_cast<std::size_t>(o.theiler);
  const NeighborIndex idx(emb, theiler);
  params.update(input_params(o.in));
  params.update({{"m", o.m}, {"tau", o.tau}, {"theiler", theiler}});
  CurveFitOptions fit;
  if (o.fit_first || o.fit_last) {
    require(o.fit_first && o.fit_last, ErrorCode::kInvalidArgument, "--fit-first and --fit-last go together");
    fit.window = std::make_pair(*o.fit_first, *o.fit_last);
  }
  const double dt = emb.source_dt();
  json report;
  if (o.method == "wolf") {
    WolfParams p;
    p.evolve_steps = o.evolve;
    p.max_len = o.max_len;
    p.min_len = o.min_len;
    p.angle_tol = o.angle_tol;
    p.base = o.log2 ? LogBase::kBinary : LogBase::kNatural;
    const WolfResult r = wolf_lambda1(emb, idx, p);
    params.update({{"evolve", o.evolve}, {"max_len", o.max_len}, {"min_len", o.min_len}, {"angle_tol", o.angle_tol},
                   {"log_base", o.log2 ? "2" : "e"}});
    report = header("lyapunov", params);
    report["result"] = to_json(r);
    report["lambda1"] = r.lambda1;
    report["lambda1_per_time"] = r.lambda1 / dt;
  } else if (o.method == "rosenstein" || o.method == "kantz") {
    DivergenceCurve curve;
    params.update({{"horizon", o.horizon}, {"stride", o.stride},
                   {"fit_window", fit.window ? json{fit.window->first, fit.window->second} : json(nullptr)}});
    if (o.method == "rosenstein") {
      RosensteinParams p;
      p.horizon = o.horizon;
      p.reference_stride = o.stride;
      p.fit = fit;
      curve = rosenstein_curve(emb, idx, p);
    } else {
      KantzParams p;
      p.eps0 = o.eps0.value_or(0.02 * attractor_diameter(emb));
      p.horizon = o.horizon;
      p.reference_stride = o.stride;
      p.fit = fit;
      params["eps0"] = p.eps0;
      curve = kantz_curve(emb, idx, p);
    }
    report = header("lyapunov", params);
    report["curve"] = to_json(curve);
    report["lambda1"] = curve.slope;
    report["lambda1_per_time"] = curve.slope / dt;
    if (ctx.globals.format == "csv") {
      emit(ctx, report, [&] { return divergence_curve_to_csv(curve); });
      return;
    }
  } else if (o.method == "benettin") {
    BenettinDataParams p;
    p.n_exp = o.n_exp;
    p.k_neighbors = o.k_neighbors;
    p.renorm_interval = o.renorm;
    p.steps = o.steps ? o.steps : emb.rows() - 2;
    const LyapunovSpectrum spectrum = benettin_spectrum(emb, idx, p);
    params.update({{"mode", "data"}, {"n_exp", o.n_exp}, {"k_neighbors", o.k_neighbors ? o.k_neighbors : 2 * emb.dim() + 1},
                   {"steps", p.steps}, {"renorm_interval", o.renorm}});
    report = header("lyapunov", params);
    report["spectrum"] = to_json(spectrum);
    report["checks"] = to_json(spectrum_checks(spectrum, SystemKind::kFlow));
    report["kaplan_yorke"] = kaplan_yorke(spectrum.exponents);
  } else {
    fail(ErrorCode::kUnknownName, "unknown method " + o.method);
  }
  emit(ctx, report);
}

struct IdentifyCliOptions {
  InputOptions in;
  std::size_t m = 4;
  std::size_t tau = 1;
  std::size_t n = 0;
  std::string basis;
  std::string mode = "discrete";
  std::size_t smooth = 1;
  std::string model_out;
};

void run_identify(Context& ctx, const IdentifyCliOptions& o) {
  const TimeSeries s = load(o.in);
  const DelayEmbedding emb = embed(s, o.m, o.tau);
  const std::size_t n = o.n ? o.n : emb.dim();
  const StateSequence seq = build_state_sequence(emb, n);
  Eigen::MatrixXd outputs(static_cast<Eigen::Index>(emb.rows()), static_cast<Eigen::Index>(s.channels()));
  for (std::size_t r = 0; r < emb.rows(); ++r) {
    for (std::size_t c = 0; c < s.channels(); ++c) {
      outputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = emb.at(r, c * o.m);
    }
  }
  IdentifyOptions io;
  io.mode = o.mode == "continuous" ? ModelMode::kContinuous : ModelMode::kDiscrete;
  io.smoothing_window = o.smooth;
  const TimeBasis basis = TimeBasis::parse(o.basis);
  const ReducedModel model = fit_model(seq.states, seq.times, basis, outputs, io);
  json params = input_params(o.in);
  std::vector<std::string> labels;
  for (const auto& t : basis.terms()) labels.push_back(t.label());
  params.update({{"m", o.m}, {"tau", o.tau}, {"n", n}, {"basis", labels}, {"mode", o.mode}, {"smooth", o.smooth},
                 {"seed", ctx.globals.seed}});
  json report = header("identify", params);
  report["model"] = to_json(model);
  report["fit"] = model.fit;
  report["spectral_radius"] = spectral_radius(model.dynamics);
  report["variances"] = std::vector<double>(seq.variances.data(), seq.variances.data() + seq.variances.size());
  if (!o.model_out.empty()) write_file(resolve_output(o.model_out), to_json(model).dump(2) + "\n");
  emit(ctx, report);
}

struct PredictOptions {
  InputOptions in;
  std::size_t m = 2;
  std::size_t tau = 1;
  std::size_t neighbors = 4;
  std::size_t test = 0;
  std::string regressor = "none";
  std::string features = "m1(0,1)";
  std::size_t hidden = 4;
  std::size_t restarts = 3;
  std::size_t iterations = 200;
  std::size_t error_neighbors = 4;
  std::optional<double> gate;
  std::string error_history;
  std::string structure = "default";
};

void run_predict(Context& ctx, const PredictOptions& o) {
  const TimeSeries s = scalar_channel(load(o.in), o.in.channel);
  const DelayEmbedding emb = embed(s, o.m, o.tau);
  const NeighborIndex idx(emb, 0);
  const std::size_t rows = emb.rows();
  const std::size_t test = o.test ? o.test : std::min<std::size_t>(500, rows / 5);
  require(test >= 1 && test + 2 * o.neighbors + 2 < rows, ErrorCode::kTooShort, "predict: series too short for the test span");
  const std::size_t split = rows - 1 - test;  // rows [split, rows-2] are forecast origins

  double sq = 0.0, sq_persist = 0.0;
  for (std::size_t r = split; r + 1 < rows; ++r) {
    const auto known = [r](std::size_t c) { return c + 1 <= r; };
    const double f = local_predict(emb, idx, r, o.neighbors, known)[0];
    const double truth = emb.at(r + 1, 0);
    sq += (f - truth) * (f - truth);
    sq_persist += (emb.at(r, 0) - truth) * (emb.at(r, 0) - truth);
  }
  const double rmse = std::sqrt(sq / static_cast<double>(test));
  const double rmse_persist = std::sqrt(sq_persist / static_cast<double>(test));
  const Eigen::VectorXd next = local_predict(emb, idx, rows - 1, o.neighbors);

  json params = input_params(o.in);
  params.update({{"m", o.m}, {"tau", o.tau}, {"neighbors", o.neighbors}, {"test", test}, {"regressor", o.regressor},
                 {"seed", ctx.globals.seed}});
  json report = header("predict", params);
  report["local"] = {{"rmse", rmse},
                     {"persistence_rmse", rmse_persist},
                     {"ratio", rmse_persist > 0.0 ? rmse / rmse_persist : 0.0},
                     {"test_points", test},
                     {"forecast", std::vector<double>(next.data(), next.data() + next.size())}};

  if (o.regressor != "none") {
    const RegressorKind kind = regressor_kind_from_string(o.regressor);
    const auto specs = parse_feature_list(o.features);
    ErrorHistory history;
    if (!o.error_history.empty()) {
      std::ifstream f(o.error_history);
      require(static_cast<bool>(f), ErrorCode::kEmptyInput, "cannot read " + o.error_history);
      try {
        history = json::parse(f).get<ErrorHistory>();
      } catch (const json::exception& e) {
        fail(ErrorCode::kFormat, std::string("error history: ") + e.what());
      }
    }
    FeatureContext fc{&s, &emb, &idx, o.error_history.empty() ? nullptr : &history, o.structure};
    std::vector<std::string> warnings;
    const std::size_t lookback = feature_lookback(specs);
    auto features = [&](std::size_t row) {
      FeatureVector fv = preprocess_features(fc, row, specs);
      for (auto& w : fv.warnings) {
        if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
      }
      return fv.values;
    };
    std::size_t first = 0;
    while (first < rows && emb.time(first) < lookback) ++first;
    require(first + 2 < split, ErrorCode::kTooShort, "predict: not enough training rows after the feature look-back");
    const Eigen::VectorXd probe = features(first);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(split - first), probe.size());
    Eigen::VectorXd y(static_cast<Eigen::Index>(split - first));
    for (std::size_t r = first; r < split; ++r) {
      x.row(static_cast<Eigen::Index>(r - first)) = features(r).transpose();
      y[static_cast<Eigen::Index>(r - first)] = emb.at(r + 1, 0);
    }
    NetworkConfig cfg;
    cfg.hidden = o.hidden;
    cfg.restarts = o.restarts;
    cfg.max_iterations = o.iterations;
    cfg.seed = ctx.globals.seed;
    const PredictorModel model = train_regressor(x, y, kind, cfg);
    double sq_model = 0.0;
    for (std::size_t r = split; r + 1 < rows; ++r) {
      const double e = model.predict(features(r)) - emb.at(r + 1, 0);
      sq_model += e * e;
    }
    const std::size_t last = rows - 1;
    const double forecast = model.predict(features(last));
    const double err = e_psi(model, features, emb, idx, last, o.error_neighbors);
    const Candidate cand{forecast, err};
    const Selection sel = select_prediction(std::span<const Candidate>(&cand, 1), o.gate);
    report["params"].update({{"features", o.features}, {"hidden", o.hidden}, {"restarts", o.restarts},
                             {"iterations", o.iterations}, {"error_neighbors", o.error_neighbors},
                             {"gate", o.gate ? json(*o.gate) : json(nullptr)},
                             {"error_history", o.error_history.empty() ? json(nullptr) : json(o.error_history)},
                             {"structure", o.structure}});
    report["regressor"] = {{"kind", to_string(kind)},
                           {"train_mse", model.training_mse},
                           {"test_rmse", std::sqrt(sq_model / static_cast<double>(test))},
                           {"e_psi", err},
                           {"forecast", sel.forecast},
                           {"gated", sel.gated},
                           {"model", to_json(model)}};
    report["warnings"] = warnings;
  }
  emit(ctx, report);
}

struct StepwiseCliOptions {
  InputOptions in;
  std::string features = "y,sign_change";
  StepwiseParams p;
  std::size_t conf_m = 2;
  std::size_t conf_tau = 1;
  std::size_t conf_k = 4;
};

void run_stepwise(Context& ctx, const StepwiseCliOptions& o) {
  const TimeSeries s = scalar_channel(load(o.in), o.in.channel);
  std::vector<FeatureSeries> catalog;
  for (const auto& name : split(o.features, ',')) {
    if (name == "y") {
      catalog.push_back({"y", s.channel(0)});
    } else if (name == "diff") {
      FeatureSeries f{"diff", std::vector<double>(s.size(), std::numeric_limits<double>::quiet_NaN())};
      for (std::size_t t = 1; t < s.size(); ++t) f.values[t] = s.value(t) - s.value(t - 1);
      catalog.push_back(std::move(f));
    } else if (name == "sign_change") {
      catalog.push_back(sign_change_feature(s));
    } else if (name == "confidence") {
      catalog.push_back(confidence_feature(s, o.conf_m, o.conf_tau, o.conf_k));
    } else {
      fail(ErrorCode::kUnknownName, "unknown stepwise feature '" + name + "' (y, diff, sign_change, confidence)");
    }
  }
  const StepwiseResult r = stepwise_reconstruct(catalog, o.p);
  json params = input_params(o.in);
  params.update({{"features", split(o.features, ',')}, {"m_min", o.p.m_min}, {"m_max", o.p.m_max},
                 {"tau_min", o.p.tau_min}, {"tau_max", o.p.tau_max}, {"lambda_min", o.p.lambda_min},
                 {"radius", o.p.radius}, {"gate", o.p.gate ? json(*o.p.gate) : json(nullptr)},
                 {"confidence", {{"m", o.conf_m}, {"tau", o.conf_tau}, {"k", o.conf_k}}}, {"seed", ctx.globals.seed}});
  json report = header("stepwise", params);
  report.update(to_json(r));
  emit(ctx, report);
}

struct SymmetryOptions {
  std::string a;
  std::string b;
  std::optional<std::size_t> smoothing;
  std::string spectrum_out;
};

Contour load_contour(const std::string& path) {
  const TimeSeries s = load_csv(path);
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(s.channels()));
  for (std::size_t t = 0; t < s.size(); ++t) {
    for (std::size_t c = 0; c < s.channels(); ++c) pts(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = s.value(t, c);
  }
  return Contour(std::move(pts));
}

void run_symmetry(Context& ctx, const SymmetryOptions& o) {
  const Contour a = load_contour(o.a), b = load_contour(o.b);
  NormalizeOptions no;
  no.smoothing = o.smoothing;
  const SymmetryReport rep = symmetry_between(a, b, no);
  json report = header("symmetry", {{"a", o.a},
                                    {"b", o.b},
                                    {"smoothing", o.smoothing ? json(*o.smoothing) : json(nullptr)},
                                    {"seed", ctx.globals.seed}});
  report["points"] = a.size();
  report["dim"] = a.dim();
  report["a"] = to_json(descriptors(dft_contour(a)));
  report["b"] = to_json(descriptors(dft_contour(b)));
  report["symmetry"] = to_json(rep);
  if (!o.spectrum_out.empty()) {
    write_file(resolve_output(o.spectrum_out), spectrum_to_csv(normalize(dft_contour(a), no)));
  }
  emit(ctx, report, [&] { return spectrum_to_csv(normalize(dft_contour(a), no)); });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlinear time series analysis toolkit", "nlts"};
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx{{}, out, err};
  app.add_option("--seed", ctx.globals.seed, "Seed for every random draw");
  app.add_option("--out,-o", ctx.globals.out, "Output file (relative paths honour NLTS_OUTPUT_DIR)");
  app.add_option("--format", ctx.globals.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::function<void()> action;

  SimulateOptions sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate a trajectory of a reference system");
  c_sim->add_option("--system", sim.system, "lorenz, rossler, henon, qflow, forced_quadratic, coupled_logistic")->required();
  c_sim->add_option("--steps", sim.steps, "Number of samples")->check(CLI::PositiveNumber);
  c_sim->add_option("--dt", sim.dt, "Sampling step for flows")->check(CLI::PositiveNumber);
  c_sim->add_option("--x0", sim.x0, "Initial state, comma separated");
  c_sim->add_option("--transient", sim.transient, "Samples discarded first");
  c_sim->add_flag("--time", sim.time, "Write a time column");
  c_sim->callback([&] { action = [&] { run_simulate(ctx, sim); }; });

  MiOptions mi;
  auto* c_mi = app.add_subcommand("mi", "Mutual information profile and delay");
  add_input(c_mi, mi.in);
  c_mi->add_option("--tau-max", mi.tau_max, "Largest delay (default min(100, N/2-1))");
  c_mi->add_option("--bins", mi.bins, "Histogram bins (default from N)");
  c_mi->callback([&] { action = [&] { run_mi(ctx, mi); }; });

  EmbedOptions em;
  auto* c_em = app.add_subcommand("embed", "Delay embedding");
  add_input(c_em, em.in);
  c_em->add_option("--m", em.m, "Embedding dimension")->check(CLI::PositiveNumber);
  c_em->add_option("--tau", em.tau, "Delay in samples")->check(CLI::PositiveNumber);
  c_em->add_flag("--all-channels", em.all_channels, "Embed every channel");
  c_em->callback([&] { action = [&] { run_embed(ctx, em); }; });

  DimensionOptions dim;
  auto* c_dim = app.add_subcommand("dimension", "Correlation or generalized dimension");
  add_input(c_dim, dim.in);
  c_dim->add_option("--m", dim.m)->check(CLI::PositiveNumber);
  c_dim->add_option("--tau", dim.tau)->check(CLI::PositiveNumber);
  c_dim->add_flag("--states", dim.states, "Use the channels as state coordinates");
  c_dim->add_option("--theiler", dim.theiler, "Theiler window (default tau (m-1) + 1)");
  c_dim->add_option("--q", dim.q, "Order; 2 uses the correlation integral");
  c_dim->add_option("--eps-min", dim.eps_min, "Smallest radius, fraction of the diameter");
  c_dim->add_option("--eps-max", dim.eps_max, "Largest radius, fraction of the diameter");
  c_dim->add_option("--eps-count", dim.eps_count)->check(CLI::Range(2, 1000));
  c_dim->add_option("--fit-min", dim.fit_min, "Manual fit range lower radius");
  c_dim->add_option("--fit-max", dim.fit_max, "Manual fit range upper radius");
  c_dim->add_flag("--exclude-self", dim.exclude_self, "Normalize by M (M - 1)");
  c_dim->callback([&] { action = [&] { run_dimension(ctx, dim); }; });

  LyapunovOptions ly;
  auto* c_ly = app.add_subcommand("lyapunov", "Lyapunov exponents");
  add_input(c_ly, ly.in, "--input,-i", false);
  c_ly->add_option("--method", ly.method)->check(CLI::IsMember({"wolf", "rosenstein", "kantz", "benettin"}));
  c_ly->add_option("--system", ly.system, "Reference system for exact-Jacobian Benettin");
  c_ly->add_option("--m", ly.m)->check(CLI::PositiveNumber);
  c_ly->add_option("--tau", ly.tau)->check(CLI::PositiveNumber);
  c_ly->add_option("--theiler", ly.theiler);
  c_ly->add_option("--horizon", ly.horizon)->check(CLI::PositiveNumber);
  c_ly->add_option("--stride", ly.stride)->check(CLI::PositiveNumber);
  c_ly->add_option("--eps0", ly.eps0, "Kantz radius (default 2% of the diameter)");
  c_ly->add_option("--fit-first", ly.fit_first);
  c_ly->add_option("--fit-last", ly.fit_last);
  c_ly->add_option("--evolve", ly.evolve)->check(CLI::PositiveNumber);
  c_ly->add_option("--max-len", ly.max_len);
  c_ly->add_option("--min-len", ly.min_len);
  c_ly->add_option("--angle-tol", ly.angle_tol);
  c_ly->add_flag("--log2", ly.log2, "Report Wolf in bits per sample");
  c_ly->add_option("--n-exp", ly.n_exp);
  c_ly->add_option("--steps", ly.steps);
  c_ly->add_option("--k-neighbors", ly.k_neighbors);
  c_ly->add_option("--renorm", ly.renorm)->check(CLI::PositiveNumber);
  c_ly->add_option("--transient", ly.transient);
  c_ly->add_option("--system-dt", ly.sys_dt)->check(CLI::PositiveNumber);
  c_ly->callback([&] { action = [&] { run_lyapunov(ctx, ly); }; });

  IdentifyCliOptions id;
  auto* c_id = app.add_subcommand("identify", "Fit a reduced state-space model");
  add_input(c_id, id.in);
  c_id->add_option("--m", id.m)->check(CLI::PositiveNumber);
  c_id->add_option("--tau", id.tau)->check(CLI::PositiveNumber);
  c_id->add_option("--n", id.n, "State dimension (default: embedding width)");
  c_id->add_option("--basis", id.basis, "Time basis, e.g. t^2,t or sin(2;0)");
  c_id->add_option("--mode", id.mode)->check(CLI::IsMember({"discrete", "continuous"}));
  c_id->add_option("--smooth", id.smooth, "Moving-average window for continuous mode")->check(CLI::PositiveNumber);
  c_id->add_option("--model-out", id.model_out, "Write the full-precision model JSON here");
  c_id->callback([&] { action = [&] { run_identify(ctx, id); }; });

  PredictOptions pr;
  auto* c_pr = app.add_subcommand("predict", "Local and regressor forecasts");
  add_input(c_pr, pr.in);
  c_pr->add_option("--m", pr.m)->check(CLI::PositiveNumber);
  c_pr->add_option("--tau", pr.tau)->check(CLI::PositiveNumber);
  c_pr->add_option("--neighbors", pr.neighbors)->check(CLI::PositiveNumber);
  c_pr->add_option("--test", pr.test, "Held-out forecast origins (default min(500, rows/5))");
  c_pr->add_option("--regressor", pr.regressor)->check(CLI::IsMember({"none", "mean", "linear", "net"}));
  c_pr->add_option("--features", pr.features, "Feature list such as \"m1(0,1) m2(3)\"");
  c_pr->add_option("--hidden", pr.hidden)->check(CLI::Range(1, 64));
  c_pr->add_option("--restarts", pr.restarts)->check(CLI::PositiveNumber);
  c_pr->add_option("--iterations", pr.iterations)->check(CLI::PositiveNumber);
  c_pr->add_option("--error-neighbors", pr.error_neighbors)->check(CLI::PositiveNumber);
  c_pr->add_option("--gate", pr.gate, "No forecast when E_psi reaches this value");
  c_pr->add_option("--error-history", pr.error_history, "JSON map structure -> past errors")->check(CLI::ExistingFile);
  c_pr->add_option("--structure", pr.structure, "Key into the error history");
  c_pr->callback([&] { action = [&] { run_predict(ctx, pr); }; });

  StepwiseCliOptions sw;
  auto* c_sw = app.add_subcommand("stepwise", "Stepwise reconstruction and forecast");
  add_input(c_sw, sw.in);
  c_sw->add_option("--features", sw.features, "Comma list from y, diff, sign_change, confidence");
  c_sw->add_option("--m-min", sw.p.m_min)->check(CLI::PositiveNumber);
  c_sw->add_option("--m-max", sw.p.m_max)->check(CLI::PositiveNumber);
  c_sw->add_option("--tau-min", sw.p.tau_min)->check(CLI::PositiveNumber);
  c_sw->add_option("--tau-max", sw.p.tau_max)->check(CLI::PositiveNumber);
  c_sw->add_option("--lambda-min", sw.p.lambda_min);
  c_sw->add_option("--radius", sw.p.radius)->check(CLI::PositiveNumber);
  c_sw->add_option("--gate", sw.p.gate);
  c_sw->add_option("--confidence-m", sw.conf_m)->check(CLI::PositiveNumber);
  c_sw->add_option("--confidence-tau", sw.conf_tau)->check(CLI::PositiveNumber);
  c_sw->add_option("--confidence-k", sw.conf_k)->check(CLI::PositiveNumber);
  c_sw->callback([&] { action = [&] { run_stepwise(ctx, sw); }; });

  SymmetryOptions sy;
  auto* c_sy = app.add_subcommand("symmetry", "Compare two closed contours");
  c_sy->add_option("--a", sy.a, "First contour CSV (m rows x n columns)")->required()->check(CLI::ExistingFile);
  c_sy->add_option("--b", sy.b, "Second contour CSV")->required()->check(CLI::ExistingFile);
  c_sy->add_option("--smoothing", sy.smoothing, "Harmonic pairs kept");
  c_sy->add_option("--spectrum-out", sy.spectrum_out, "Write the normalized spectrum of A as CSV");
  c_sy->callback([&] { action = [&] { run_symmetry(ctx, sy); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  }
  try {
    action();
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace nlts::cli
