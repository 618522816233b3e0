// Copyright 2026 The qmlsim developers
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
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;

#ifndef QMLSIM_CLI_PATH
#define QMLSIM_CLI_PATH "qmlsim"
#endif

namespace {

struct Workspace {
  fs::path dir;

  Workspace() {
    dir = fs::temp_directory_path() /
          ("qmlsim_cli_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  static int& counter() {
    static int c = 0;
    return c;
  }
};

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(QMLSIM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string run_cli_stdout(const std::string& args) {
  const std::string out_file =
      (fs::temp_directory_path() / "qmlsim_cli_stdout.txt").string();
  const std::string cmd = std::string(QMLSIM_CLI_PATH) + " " + args + " > " +
                          out_file + " 2>/dev/null";
  (void)!std::system(cmd.c_str());
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("synth writes the requested rows and is byte-stable") {
  Workspace ws;
  const std::string base = "--seed 7 --out-dir " + ws.dir.string() +
                           " synth --n 100 --dims 5 --sep 4";
  REQUIRE(run_cli(base) == 0);
  const auto csv = slurp(ws.dir / "synth.csv");
  long rows = 0;
  for (const char c : csv) rows += c == '\n';
  REQUIRE(rows == 100);
  REQUIRE(run_cli(base) == 0);
  REQUIRE(slurp(ws.dir / "synth.csv") == csv);

  const auto report = nlohmann::json::parse(slurp(ws.dir / "synth_report.json"));
  REQUIRE(report.at("version").is_string());
  REQUIRE(report.at("seed") == 7);
  REQUIRE(report.at("config").at("n") == 100);
}

TEST_CASE("synth without --n is a usage error") {
  Workspace ws;
  REQUIRE(run_cli("--out-dir " + ws.dir.string() + " synth --dims 3") == 1);
}

TEST_CASE("unknown subcommands and flags exit with the usage code") {
  REQUIRE(run_cli("frobnicate") == 1);
  REQUIRE(run_cli("cost --rate") == 1);
}

TEST_CASE("cost reproduces the bundled figures") {
  const auto out = run_cli_stdout("cost --minutes 851 --rate 96");
  const auto j = nlohmann::json::parse(out);
  REQUIRE(j.at("usd") == 81696.0);
  REQUIRE(j.at("minutes") == 851.0);

  const auto extrapolated = nlohmann::json::parse(run_cli_stdout(
      "cost --samples 31256 --per-sample-s 133 --rate 96 --total-samples "
      "31256"));
  REQUIRE(extrapolated.at("usd").get<double>() ==
          Catch::Approx(6.652e6).epsilon(0.01));
  REQUIRE(extrapolated.at("fraction").get<double>() == Catch::Approx(1.0));

  // both routes present and inconsistent: the report carries a note
  const auto noted = nlohmann::json::parse(run_cli_stdout(
      "cost --minutes 851 --samples 1815 --per-sample-s 133 --rate 96"));
  REQUIRE(noted.contains("note"));
}

TEST_CASE("cost with a negative rate is a usage error") {
  REQUIRE(run_cli("cost --minutes 10 --rate -5") != 0);
}

TEST_CASE("train, eval and transpile work end to end") {
  Workspace ws;
  const std::string dir = ws.dir.string();
  REQUIRE(run_cli("--seed 3 --out-dir " + dir +
                  " synth --n 120 --dims 4 --sep 6 --out data.csv") == 0);

  const std::string train_cmd =
      "--seed 5 --out-dir " + dir + " train --data " + dir +
      "/data.csv --qubits 4 --encoding angle-y --ansatz std --layers 2 "
      "--epochs 40 --batch 24 --lr 0.05";
  REQUIRE(run_cli(train_cmd) == 0);
  const auto summary =
      nlohmann::json::parse(slurp(ws.dir / "train_report.json"));
  REQUIRE(summary.at("summary").at("final_accuracy").get<double>() >= 0.95);

  // retraining with the same seed reproduces the model file byte for byte
  const auto model_bytes = slurp(ws.dir / "model.json");
  REQUIRE(run_cli(train_cmd) == 0);
  REQUIRE(slurp(ws.dir / "model.json") == model_bytes);

  // noisy phase without a device is a usage error
  REQUIRE(run_cli("--out-dir " + dir + " train --data " + dir +
                  "/data.csv --qubits 4 --encoding angle-y --phase noisy") ==
          1);

  // zero-noise device backend equals the noiseless backend row for row
  REQUIRE(run_cli("--seed 9 --out-dir " + dir + " eval --model " + dir +
                  "/model.json --data " + dir +
                  "/data.csv --backend noiseless --backend noisy "
                  "--device all-to-all:4") == 0);
  const auto eval_report =
      nlohmann::json::parse(slurp(ws.dir / "eval_report.json"));
  const auto& rows = eval_report.at("rows");
  REQUIRE(rows.size() == 2);
  REQUIRE(std::abs(rows[0].at("accuracy").get<double>() -
                   rows[1].at("accuracy").get<double>()) < 1e-9);
  REQUIRE(std::abs(rows[0].at("sureness").get<double>() -
                   rows[1].at("sureness").get<double>()) < 1e-9);

  // --flip-labels maps accuracy to its complement for the same predictions
  REQUIRE(run_cli("--seed 9 --out-dir " + dir + " eval --model " + dir +
                  "/model.json --data " + dir +
                  "/data.csv --report base.json --csv base.csv") == 0);
  REQUIRE(run_cli("--seed 9 --out-dir " + dir + " eval --model " + dir +
                  "/model.json --data " + dir +
                  "/data.csv --flip-labels --report flipped.json --csv "
                  "flipped.csv") == 0);
  const auto base = nlohmann::json::parse(slurp(ws.dir / "base.json"));
  const auto flipped = nlohmann::json::parse(slurp(ws.dir / "flipped.json"));
  const double a = base.at("rows")[0].at("accuracy").get<double>();
  const double b = flipped.at("rows")[0].at("accuracy").get<double>();
  REQUIRE(a + b == Catch::Approx(1.0));

  // eval csv carries the documented header
  const auto csv = slurp(ws.dir / "base.csv");
  REQUIRE(csv.rfind("backend,accuracy,sureness,confidence_mean,"
                    "confidence_spread,n0,n1,imbalance,n_samples",
                    0) == 0);

  // transpile the trained model onto the bundled heavy-hex device
  REQUIRE(run_cli("--seed 11 --out-dir " + dir + " transpile --model " + dir +
                  "/model.json --device heavy-hex-127 --qasm circuit.qasm") ==
          0);
  const auto meta =
      nlohmann::ordered_json::parse(slurp(ws.dir / "transpile_report.json"));
  const auto& m = meta.at("metadata");
  REQUIRE(m.at("n_qubits") == 4);
  REQUIRE(m.at("depth").get<int>() >= 1);
  std::vector<std::string> keys;
  for (auto it = m.begin(); it != m.end(); ++it) keys.push_back(it.key());
  REQUIRE(keys == std::vector<std::string>{"n_qubits", "depth", "rz", "sx",
                                           "ecr", "x"});
  const auto qasm = slurp(ws.dir / "circuit.qasm");
  REQUIRE(qasm.rfind("OPENQASM 3.0;", 0) == 0);

  // nearest-neighbor patterns route without swaps on the all-to-all device
  REQUIRE(run_cli("--seed 11 --out-dir " + dir + " transpile --model " + dir +
                  "/model.json --device all-to-all:4 --metadata ata.json") ==
          0);
  const auto ata = nlohmann::json::parse(slurp(ws.dir / "ata.json"));
  REQUIRE(ata.at("swaps") == 0);

  // transpile is idempotent on an already-native routed circuit
  REQUIRE(run_cli("--seed 11 --out-dir " + dir + " transpile --circuit " +
                  dir + "/transpiled.txt --device heavy-hex-127 --out "
                  "again.txt --metadata again.json") == 0);
  REQUIRE(slurp(ws.dir / "again.txt") == slurp(ws.dir / "transpiled.txt"));

  // model files with a corrupted checksum are refused with the data code
  auto tampered = nlohmann::json::parse(model_bytes);
  tampered["quantum_weights"][0] =
      tampered["quantum_weights"][0].get<double>() + 0.5;
  {
    std::ofstream out(ws.dir / "tampered.json");
    out << tampered.dump(2);
  }
  REQUIRE(run_cli("--out-dir " + dir + " eval --model " + dir +
                  "/tampered.json --data " + dir + "/data.csv") == 2);
}
