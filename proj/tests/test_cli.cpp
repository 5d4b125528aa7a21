// Copyright 2026 The qstrength Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qstrength/cli.hpp"

namespace fs = std::filesystem;
using qstrength::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<nlohmann::json> records(const std::string& text) {
  std::vector<nlohmann::json> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(nlohmann::json::parse(line));
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("qstrength-cli-" + std::to_string(Catch::getSeed()) + "-" +
             std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(invoke({"--help"}).code == 0);
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"bogus"}).code == 2);
  CHECK(invoke({"strength"}).code == 2);
  CHECK(invoke({"strength", "--gate", "cnot", "--metric", "nope"}).code == 2);
  CHECK(invoke({"strength", "--gate", "toffoli"}).code == 2);
  CHECK(invoke({"strength", "--gate", "cnot", "--restarts", "0"}).code == 2);
}

TEST_CASE("strength subcommand") {
  auto r = invoke({"strength", "--gate", "cnot", "--metric", "frobenius"});
  REQUIRE(r.code == 0);
  auto recs = records(r.out);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0]["schema"] == "qstrength/1");
  CHECK(recs[0]["record"] == "strength");
  CHECK(recs[0]["value"].get<double>() == Catch::Approx(1.53073).margin(1e-5));
  CHECK(recs[0]["per_restart_values"].size() == 32);

  r = invoke({"strength", "--gate", "id2", "--metric", "opnorm"});
  REQUIRE(r.code == 0);
  CHECK(records(r.out)[0]["value"].get<double>() <= 1e-12);

  r = invoke({"strength", "--gate", "cz", "--metric", "all", "--restarts", "4"});
  REQUIRE(r.code == 0);
  recs = records(r.out);
  REQUIRE(recs.size() == 3);
  CHECK(recs[1]["metric"] == "frobenius-norm");
  CHECK(recs[2]["metric"] == "opnorm");

  r = invoke({"strength", "--gate", "cnot", "--format", "human"});
  CHECK(r.code == 0);
  CHECK(r.out.find("K_frobenius(cnot)") != std::string::npos);
}

TEST_CASE("matrix files") {
  TempDir dir;
  const auto good = dir / "u.txt";
  {
    std::ofstream f(good);
    f << "# swap\n2\n1,0 0,0 0,0 0,0\n0,0 0,0 1,0 0,0\n0,0 1,0 0,0 0,0\n0,0 0,0 0,0 1,0\n";
  }
  auto r = invoke({"strength", "--matrix", good.string(), "--restarts", "4"});
  CHECK(r.code == 0);
  CHECK(records(r.out)[0]["value"].get<double>() == Catch::Approx(2.0).margin(1e-9));

  const auto bad = dir / "bad.txt";
  {
    std::ofstream f(bad);
    f << "1\n1,0 0,0\n0,0\n";
  }
  CHECK(invoke({"strength", "--matrix", bad.string()}).code == 2);
  CHECK(invoke({"strength", "--matrix", (dir / "missing.txt").string()}).code == 2);

  const auto nonu = dir / "nonu.txt";
  {
    std::ofstream f(nonu);
    f << "1\n1,0 0.5,0\n0,0 1,0\n";
  }
  r = invoke({"strength", "--matrix", nonu.string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("max deviation") != std::string::npos);

  // The witness file round-trips through the matrix reader.
  const auto witness = dir / "w.txt";
  r = invoke({"strength", "--gate", "cnot", "--restarts", "4", "--witness", witness.string()});
  REQUIRE(r.code == 0);
  std::ifstream w(witness);
  const auto l = qstrength::read_unitary(w);
  CHECK(qstrength::distance(qstrength::MetricKind::frobenius(), l,
                            qstrength::standard_gate(qstrength::Gate::CNOT)) ==
        records(r.out)[0]["value"].get<double>());
}

TEST_CASE("lowerbound subcommand") {
  auto r = invoke({"lowerbound", "--gate", "cnot"});
  REQUIRE(r.code == 0);
  auto rec = records(r.out)[0];
  CHECK(rec["heuristic_min_cnots"] == 1);
  CHECK(rec["rigor"] == "heuristic");
  r = invoke({"lowerbound", "--gate", "swap", "--metric", "all", "--restarts", "8"});
  REQUIRE(r.code == 0);
  for (const auto& rr : records(r.out)) CHECK(rr["heuristic_min_cnots"].get<int>() <= 3);
  r = invoke({"lowerbound", "--gate", "id2"});
  CHECK(records(r.out)[0]["heuristic_min_cnots"] == 0);
}

TEST_CASE("synth subcommand") {
  auto r = invoke({"synth", "--gate", "cz"});
  REQUIRE(r.code == 0);
  CHECK(records(r.out)[0]["uses"] == 1);
  r = invoke({"synth", "--gate", "cnot"});
  REQUIRE(r.code == 0);
  auto rec = records(r.out)[0];
  CHECK(rec["uses"] == 1);
  CHECK(rec["achieved_distance"].get<double>() <= 1e-9);
  r = invoke({"synth", "--gate", "swap"});
  CHECK(r.code == 5);
  CHECK(r.err.find("entangling") != std::string::npos);
  CHECK(invoke({"synth", "--gate", "id3"}).code == 2);

  TempDir dir;
  const auto plan = dir / "plan.txt";
  r = invoke({"synth", "--gate", "sqrt_swap", "--plan", plan.string()});
  REQUIRE(r.code == 0);
  CHECK(records(r.out)[0]["uses"] == 2);
  // Three layer matrices, each a readable two-qubit unitary.
  std::ifstream in(plan);
  std::string all((std::istreambuf_iterator<char>(in)), {});
  std::size_t blocks = 0;
  for (std::size_t p = all.find("\n2\n"); p != std::string::npos; p = all.find("\n2\n", p + 1))
    ++blocks;
  CHECK(blocks == 3);
}

TEST_CASE("props subcommand") {
  auto r = invoke({"props", "--metric", "frobenius", "--samples", "2", "--restarts", "4"});
  REQUIRE(r.code == 0);
  auto recs = records(r.out);
  REQUIRE(recs.size() == 4);
  CHECK(recs[0]["property"] == "locality");
  CHECK(recs[0]["holds"] == true);
  CHECK(recs[1]["property"] == "chaining");
  CHECK(recs[1]["holds"] == true);
  CHECK(recs[2]["property"] == "stability");
  CHECK(recs[3]["record"] == "stability_cnot");
  CHECK(recs[3]["gap"].get<double>() < -0.6);

  const auto again =
      invoke({"props", "--metric", "frobenius", "--samples", "2", "--restarts", "4"});
  CHECK(again.out == r.out);
}

TEST_CASE("fern subcommand") {
  TempDir dir;
  const auto csv1 = dir / "a.csv";
  const auto img1 = dir / "a.pgm";
  const std::vector<std::string> args{"fern", "--points", "100000", "--seed", "7",
                                      "--csv", csv1.string(), "--image", img1.string()};
  const auto a = invoke(args);
  REQUIRE(a.code == 0);
  const std::string csv_a = slurp(csv1), img_a = slurp(img1);
  const auto b = invoke(args);
  CHECK(a.out == b.out);
  CHECK(slurp(csv1) == csv_a);
  CHECK(slurp(img1) == img_a);
  CHECK(slurp(img1).rfind("P2\n200 200\n255\n", 0) == 0);
  const std::string csv = slurp(csv1);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 100000 - 20);

  CHECK(invoke({"fern", "--points", "10", "--burn-in", "10"}).code == 2);
  CHECK(invoke({"fern", "--raster", "0x5", "--image", ""}).code == 2);
  CHECK(invoke({"fern", "--raster", "12by5", "--image", ""}).code == 2);
  CHECK(invoke({"fern", "--points", "100", "--image", (dir / "no/such/dir.pgm").string()})
            .code == 6);
  CHECK(invoke({"fern", "--points", "100", "--image", "", "--output",
                (dir / "no/such/out.jsonl").string()})
            .code == 6);

  // Default run: 1e5 points on a 200x200 raster.
  const auto def = invoke({"fern", "--image", (dir / "d.pgm").string()});
  REQUIRE(def.code == 0);
  CHECK(records(def.out)[0]["nonzero_fraction"].get<double>() ==
        Catch::Approx(0.37895).epsilon(0.01));
}

TEST_CASE("environment overrides") {
  ::setenv("QSTRENGTH_RESTARTS", "3", 1);
  ::setenv("QSTRENGTH_SEED", "5", 1);
  const auto r = invoke({"strength", "--gate", "cnot"});
  const auto flags = invoke({"strength", "--gate", "cnot", "--restarts", "3", "--seed", "5"});
  ::unsetenv("QSTRENGTH_RESTARTS");
  ::unsetenv("QSTRENGTH_SEED");
  REQUIRE(r.code == 0);
  CHECK(records(r.out)[0]["per_restart_values"].size() == 3);
  CHECK(r.out == flags.out);
}

TEST_CASE("structured output does not depend on threads") {
  const auto one = invoke({"strength", "--gate", "sqrt_swap", "--metric", "all",
                           "--restarts", "6", "--threads", "1"});
  const auto four = invoke({"strength", "--gate", "sqrt_swap", "--metric", "all",
                            "--restarts", "6", "--threads", "4"});
  CHECK(one.out == four.out);
}

TEST_CASE("installed binary exit codes") {
  const std::string bin = QSTRENGTH_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int s = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  CHECK(status("--help") == 0);
  CHECK(status("strength --gate cnot --restarts 2") == 0);
  CHECK(status("synth --gate swap") == 5);
  CHECK(status("fern --points 10 --burn-in 10") == 2);
}
