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

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "helpers.hpp"
#include "nlts_cli/cli.hpp"

using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = nlts::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string path_of(const std::string& name) { return (nlts::testing::scratch_dir() / name).string(); }

std::size_t line_count(const std::string& path) {
  std::ifstream f(path);
  std::size_t n = 0;
  for (std::string line; std::getline(f, line);) ++n;
  return n;
}

const std::string& henon_csv() {
  static const std::string path = [] {
    const std::string p = path_of("cli_henon.csv");
    run_cli({"simulate", "--system", "henon", "--steps", "3000", "--out", p});
    return p;
  }();
  return path;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("simulate writes the requested rows") {
    const std::string p = path_of("h100.csv");
    const Outcome o = run_cli({"simulate", "--system", "henon", "--steps", "100", "--out", p});
    CHECK(o.code == 0);
    CHECK(line_count(p) == 100);
    const json j = json::parse(o.out);
    CHECK(j["params"]["system"] == "henon");
    CHECK(j["rows"] == 100);
  }

  TEST_CASE("Benettin on a data file reports two exponents") {
    const std::string p = path_of("h100b.csv");
    run_cli({"simulate", "--system", "henon", "--steps", "100", "--out", p});
    const Outcome o = run_cli({"lyapunov", "--method", "benettin", "--input", p, "--m", "2", "--tau", "1"});
    CHECK(o.code == 0);
    const json j = json::parse(o.out);
    CHECK(j["spectrum"]["exponents"].size() == 2);
    CHECK(j["params"]["m"] == 2);
  }

  TEST_CASE("usage errors exit with 2") {
    const Outcome missing = run_cli({"mi", "--input", "missing.csv"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("Usage") != std::string::npos);
    CHECK(run_cli({"mi", "--input", henon_csv(), "--bogus"}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"lyapunov", "--method", "wolf"}).code == 2);
    CHECK(run_cli({"lyapunov", "--method", "magic", "--input", henon_csv()}).code == 2);
  }

  TEST_CASE("computation errors exit with 1") {
    const Outcome o = run_cli({"embed", "--input", henon_csv(), "--m", "3", "--tau", "5000"});
    CHECK(o.code == 1);
    CHECK(o.err.find("too short") != std::string::npos);
    CHECK(run_cli({"simulate", "--system", "nosuch"}).code == 1);
  }

  TEST_CASE("help exits cleanly") {
    const Outcome o = run_cli({"--help"});
    CHECK(o.code == 0);
    CHECK(o.out.find("symmetry") != std::string::npos);
  }

  TEST_CASE("every subcommand is deterministic") {
    const std::string c1 = path_of("c1.csv"), c2 = path_of("c2.csv");
    {
      std::ofstream a(c1), b(c2);
      for (int i = 0; i < 24; ++i) {
        const double t = 2.0 * M_PI * i / 24.0;
        a << std::cos(t) + 0.2 * std::cos(3 * t) << "," << std::sin(t) << "\n";
        b << 2.0 * (std::cos(t) + 0.2 * std::cos(3 * t)) + 1.0 << "," << 2.0 * std::sin(t) - 4.0 << "\n";
      }
    }
    const std::vector<std::vector<std::string>> commands{
        {"mi", "--input", henon_csv(), "--tau-max", "10"},
        {"embed", "--input", henon_csv(), "--m", "2"},
        {"dimension", "--input", henon_csv(), "--m", "2"},
        {"lyapunov", "--method", "wolf", "--input", henon_csv(), "--m", "2"},
        {"lyapunov", "--method", "rosenstein", "--input", henon_csv(), "--m", "2"},
        {"lyapunov", "--method", "kantz", "--input", henon_csv(), "--m", "2"},
        {"identify", "--input", henon_csv(), "--m", "2", "--n", "2", "--basis", "t"},
        {"predict", "--input", henon_csv(), "--m", "2", "--regressor", "net", "--features", "m1(0,1)", "--iterations",
         "50"},
        {"stepwise", "--input", henon_csv(), "--features", "y,diff", "--radius", "0.2"},
        {"symmetry", "--a", c1, "--b", c2},
        {"lyapunov", "--method", "benettin", "--system", "henon", "--steps", "2000"},
    };
    for (const auto& cmd : commands) {
      CAPTURE(cmd[0]);
      const Outcome a = run_cli(cmd);
      const Outcome b = run_cli(cmd);
      CHECK(a.code == 0);
      CHECK(a.err.empty());
      CHECK(a.out == b.out);
      const json j = json::parse(a.out);
      CHECK(j["command"] == cmd[0]);
      CHECK(j["params"].is_object());
    }
  }

  TEST_CASE("seed changes only seeded outputs") {
    const std::vector<std::string> base{"predict", "--input", henon_csv(), "--m", "2", "--regressor", "net",
                                        "--iterations", "20"};
    auto with_seed = [&](const std::string& s) {
      auto v = base;
      v.push_back("--seed");
      v.push_back(s);
      return json::parse(run_cli(v).out);
    };
    const json a = with_seed("1"), b = with_seed("1"), c = with_seed("2");
    CHECK(a == b);
    CHECK(a["params"]["seed"] == 1);
    CHECK(a["regressor"]["model"] != c["regressor"]["model"]);
    CHECK(a["local"] == c["local"]);
  }

  TEST_CASE("relative outputs honour the output directory variable") {
    const std::string dir = path_of("outdir");
    std::filesystem::create_directories(dir);
    setenv("NLTS_OUTPUT_DIR", dir.c_str(), 1);
    const Outcome o = run_cli({"mi", "--input", henon_csv(), "--tau-max", "5", "--out", "mi.json"});
    unsetenv("NLTS_OUTPUT_DIR");
    CHECK(o.code == 0);
    CHECK(o.out.empty());
    std::ifstream f(dir + "/mi.json");
    REQUIRE(static_cast<bool>(f));
    CHECK(json::parse(f)["command"] == "mi");
  }

  TEST_CASE("CSV format sends parameters to stderr") {
    const Outcome o = run_cli({"mi", "--input", henon_csv(), "--tau-max", "5", "--format", "csv"});
    CHECK(o.code == 0);
    CHECK(o.out.rfind("tau,mi\n", 0) == 0);
    CHECK(o.err.rfind("params: {", 0) == 0);
  }

  TEST_CASE("identify writes a full-precision model") {
    const std::string model = path_of("model.json");
    const Outcome o = run_cli({"identify", "--input", henon_csv(), "--m", "2", "--n", "2", "--model-out", model});
    CHECK(o.code == 0);
    std::ifstream f(model);
    const json j = json::parse(f);
    CHECK(j["n"] == 2);
    CHECK(j.contains("B"));
  }
}
