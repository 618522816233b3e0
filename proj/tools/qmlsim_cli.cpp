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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmlsim/qmlsim.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  bool quiet = false;

  fs::path out_path(const std::string& name) const {
    fs::create_directories(out_dir);
    return fs::path(out_dir) / name;
  }

  void info(const std::string& msg) const {
    if (!quiet) std::cerr << msg << "\n";
  }
};

ordered_json report_scaffold(const std::string& command, const GlobalOpts& g) {
  ordered_json j;
  j["version"] = qmlsim::kVersion;
  j["command"] = command;
  j["seed"] = g.seed;
  j["config"] = ordered_json::object();
  return j;
}

void write_json(const ordered_json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw qmlsim::DataError("cannot write report: " + path.string());
  out << j.dump(2) << "\n";
}

qmlsim::ModelConfig parse_model_config(int qubits, const std::string& encoding,
                                       const std::string& ansatz, int layers,
                                       int measured, int in_dim) {
  qmlsim::ModelConfig cfg;
  cfg.n_qubits = qubits;
  cfg.in_dim = in_dim;
  const auto enc = qmlsim::encoding_from_name(encoding);
  if (!enc)
    throw CLI::ValidationError("--encoding", "unknown encoding " + encoding);
  cfg.encoding = *enc;
  const auto ans = qmlsim::ansatz_from_name(ansatz);
  if (!ans) throw CLI::ValidationError("--ansatz", "unknown ansatz " + ansatz);
  cfg.ansatz = *ans;
  cfg.ansatz_layers = layers;
  cfg.measured_qubit = measured;
  return cfg;
}

// --- synth ----------------------------------------------------------------

struct SynthOpts {
  long n = 0;
  long dims = 26;
  double sep = 4.0;
  std::string out = "synth.csv";
  bool header = false;
};

int run_synth(const SynthOpts& o, const GlobalOpts& g) {
  const auto ds = qmlsim::synthesize(o.n, o.dims, o.sep, g.seed);
  const fs::path path = g.out_path(o.out);
  qmlsim::save_csv(ds, path, o.header);
  ordered_json report = report_scaffold("synth", g);
  report["config"] = {{"n", o.n},
                      {"dims", o.dims},
                      {"sep", o.sep},
                      {"header", o.header},
                      {"out", o.out}};
  report["rows"] = ds.n_samples();
  write_json(report, g.out_path("synth_report.json"));
  g.info("wrote " + path.string());
  return 0;
}

// --- train ------------------------------------------------------------------

struct TrainOpts {
  std::string data;
  std::string phase = "noiseless";
  std::string device;
  std::string optimizer = "adam";
  int epochs = 50;
  int batch = 32;
  double lr = 0.01;
  double spsa_a = 0.2;
  double spsa_c = 0.1;
  double val_fraction = 0.2;
  int patience = 0;
  int qubits = 8;
  std::string encoding = "amplitude";
  std::string ansatz = "std";
  int layers = 3;
  int measured = 0;
  std::string model_out = "model.json";
  std::string history_out = "history.csv";
  std::string summary_out = "train_report.json";
};

int run_train(const TrainOpts& o, const GlobalOpts& g) {
  const auto ds = qmlsim::load_csv(o.data, /*has_header=*/false);
  const auto cfg =
      parse_model_config(o.qubits, o.encoding, o.ansatz, o.layers, o.measured,
                         static_cast<int>(ds.n_features()));

  qmlsim::TrainConfig tc;
  const auto phase = qmlsim::phase_from_name(o.phase);
  if (!phase) throw CLI::ValidationError("--phase", "unknown phase " + o.phase);
  tc.phase = *phase;
  if (tc.phase != qmlsim::TrainPhase::Noiseless) {
    if (o.device.empty())
      throw CLI::RequiredError("--device (for topology/noisy phases)");
    tc.device = qmlsim::resolve_device(o.device);
  }
  if (o.optimizer == "adam")
    tc.optimizer = qmlsim::OptimizerKind::Adam;
  else if (o.optimizer == "spsa")
    tc.optimizer = qmlsim::OptimizerKind::Spsa;
  else
    throw CLI::ValidationError("--optimizer", "use adam or spsa");
  tc.adam.lr = o.lr;
  tc.spsa.a = o.spsa_a;
  tc.spsa.c = o.spsa_c;
  tc.epochs = o.epochs;
  tc.batch_size = o.batch;
  tc.val_fraction = o.val_fraction;
  tc.patience = o.patience;
  tc.seed = g.seed;

  const auto initial =
      qmlsim::HybridModel::random_init(cfg, qmlsim::mix_seed(g.seed, 1));
  g.info("training " + std::string(qmlsim::encoding_name(cfg.encoding)) + "+" +
         qmlsim::ansatz_name(cfg.ansatz) + " on " +
         std::to_string(ds.n_samples()) + " samples");
  const auto result = qmlsim::train(initial, ds, tc);

  qmlsim::save_model(result.model, g.out_path(o.model_out));
  qmlsim::write_history_csv(result.history, g.out_path(o.history_out));

  ordered_json report = report_scaffold("train", g);
  report["config"] = {{"data", o.data},
                      {"phase", o.phase},
                      {"device", o.device},
                      {"optimizer", o.optimizer},
                      {"epochs", o.epochs},
                      {"batch", o.batch},
                      {"lr", o.lr},
                      {"val_fraction", o.val_fraction},
                      {"patience", o.patience},
                      {"qubits", o.qubits},
                      {"encoding", o.encoding},
                      {"ansatz", o.ansatz},
                      {"layers", o.layers},
                      {"measured_qubit", o.measured},
                      {"in_dim", ds.n_features()}};
  report["summary"] = {
      {"epochs_run", result.history.epochs_run()},
      {"final_loss", result.history.loss.back()},
      {"final_accuracy", result.history.accuracy.back()},
      {"best_epoch", result.best_epoch},
      {"best_val_loss", result.best_val_loss},
      {"model_file", o.model_out},
      {"n_parameters", result.model.n_parameters()}};
  write_json(report, g.out_path(o.summary_out));
  g.info("final training accuracy " +
         qmlsim::format_double(result.history.accuracy.back()));
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalOpts {
  std::string model;
  std::string data;
  std::vector<std::string> backends{"noiseless"};
  std::string device;
  long long shots = 1024;
  bool flip_labels = false;
  std::string report_out = "eval_report.json";
  std::string csv_out = "eval_rows.csv";
};

int run_eval(const EvalOpts& o, const GlobalOpts& g) {
  const auto model = qmlsim::load_model(o.model);
  qmlsim::Dataset ds = qmlsim::load_csv(o.data, /*has_header=*/false);
  if (o.flip_labels) ds = qmlsim::flip_labels(ds);

  std::optional<qmlsim::DeviceSpec> device;
  if (!o.device.empty()) device = qmlsim::resolve_device(o.device);

  std::vector<qmlsim::MetricsReport> rows;
  for (const auto& backend : o.backends) {
    qmlsim::ExecutionConfig exec;
    std::string tag = backend;
    if (backend == "noiseless") {
      exec = qmlsim::ExecutionConfig::noiseless();
    } else if (backend == "transpiled" || backend == "noisy") {
      if (!device)
        throw CLI::RequiredError("--device (for backend " + backend + ")");
      exec = backend == "noisy" ? qmlsim::ExecutionConfig::noisy(*device)
                                : qmlsim::ExecutionConfig::transpiled(*device);
      tag = backend + ":" + device->name;
    } else if (backend == "shots") {
      exec = qmlsim::ExecutionConfig::sampled(o.shots, g.seed);
      tag = "shots:" + std::to_string(o.shots);
    } else if (backend == "shots-noisy") {
      if (!device) throw CLI::RequiredError("--device (for backend shots-noisy)");
      exec = qmlsim::ExecutionConfig::sampled(o.shots, g.seed, *device);
      tag = "shots-noisy:" + device->name + ":" + std::to_string(o.shots);
    } else {
      throw CLI::ValidationError("--backend", "unknown backend " + backend);
    }
    exec.seed = g.seed;
    const auto records = qmlsim::evaluate_dataset(model, ds, exec, tag);
    rows.push_back(qmlsim::metrics_report(records));
    g.info(tag + ": accuracy " + qmlsim::format_double(rows.back().accuracy));
  }

  std::ofstream csv(g.out_path(o.csv_out));
  csv << qmlsim::metrics_csv_header() << "\n";
  for (const auto& r : rows) csv << qmlsim::metrics_csv_row(r) << "\n";

  ordered_json report = report_scaffold("eval", g);
  report["config"] = {{"model", o.model},
                      {"data", o.data},
                      {"backends", o.backends},
                      {"device", o.device},
                      {"shots", o.shots},
                      {"flip_labels", o.flip_labels}};
  report["rows"] = ordered_json::array();
  for (const auto& r : rows) report["rows"].push_back(qmlsim::metrics_to_json(r));
  write_json(report, g.out_path(o.report_out));
  return 0;
}

// --- transpile ---------------------------------------------------------------

struct TranspileOpts {
  std::string model;
  std::string circuit;
  std::string device;
  std::string out = "transpiled.txt";
  std::string metadata_out = "transpile_report.json";
  std::string qasm_out;
};

int run_transpile(const TranspileOpts& o, const GlobalOpts& g) {
  if (o.model.empty() == o.circuit.empty())
    throw CLI::ValidationError("--model/--circuit",
                               "provide exactly one circuit source");
  const auto device = qmlsim::resolve_device(o.device);

  qmlsim::Circuit circuit(1);
  std::string source;
  if (!o.circuit.empty()) {
    std::ifstream in(o.circuit);
    if (!in)
      throw qmlsim::DataError("cannot open circuit: " + o.circuit);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    circuit = qmlsim::from_text(text);
    source = o.circuit;
  } else {
    // The model's quantum layer (encoding + ansatz) bound to its weights and
    // a seeded random feature vector for the data-dependent encoding angles.
    const auto model = qmlsim::load_model(o.model);
    const qmlsim::ModelEngine engine(model.config,
                                     qmlsim::ExecutionConfig::noiseless());
    qmlsim::Rng rng(g.seed);
    Eigen::VectorXd x(model.config.in_dim);
    for (long i = 0; i < x.size(); ++i) x(i) = rng.normal();
    const Eigen::VectorXd z = model.linear_w * x + model.linear_b;
    qmlsim::Circuit tmpl(model.config.n_qubits);
    std::vector<double> slots;
    const long p = model.n_quantum_params();
    if (model.config.encoding == qmlsim::EncodingKind::Amplitude) {
      tmpl.append(qmlsim::amplitude_embedding_template(
          model.config.n_qubits, static_cast<int>(p)));
      std::vector<std::complex<double>> c(z.size());
      for (long i = 0; i < z.size(); ++i) c[i] = z(i);
      const auto angles =
          qmlsim::amplitude_embedding_angles(c, model.config.n_qubits);
      slots.assign(model.quantum_weights.data(),
                   model.quantum_weights.data() + p);
      slots.insert(slots.end(), angles.begin(), angles.end());
    } else {
      tmpl.append(qmlsim::angle_encoding_template(
          model.config.n_qubits, model.config.encoding, static_cast<int>(p)));
      slots.assign(model.quantum_weights.data(),
                   model.quantum_weights.data() + p);
      slots.insert(slots.end(), z.data(), z.data() + z.size());
    }
    tmpl.append(qmlsim::ansatz_template(model.config.ansatz,
                                        model.config.n_qubits,
                                        model.config.ansatz_layers, 0));
    circuit = qmlsim::bind_slots(tmpl, slots);
    source = o.model;
  }

  qmlsim::TranspileOptions topts;
  topts.seed = g.seed;
  const auto result = qmlsim::transpile(circuit, device, topts);

  const fs::path out_path = g.out_path(o.out);
  {
    std::ofstream out(out_path);
    out << qmlsim::to_text(result.circuit);
  }
  if (!o.qasm_out.empty()) {
    std::ofstream out(g.out_path(o.qasm_out));
    out << qmlsim::to_qasm3(result.circuit);
  }

  const auto counts = [&result](const char* name) -> long long {
    const auto it = result.metadata.gate_counts.find(name);
    return it == result.metadata.gate_counts.end() ? 0 : it->second;
  };
  ordered_json report = report_scaffold("transpile", g);
  report["config"] = {{"source", source},
                      {"device", o.device},
                      {"out", o.out}};
  report["metadata"] = {{"n_qubits", result.metadata.n_qubits},
                        {"depth", result.metadata.depth},
                        {"rz", counts("rz")},
                        {"sx", counts("sx")},
                        {"ecr", counts("ecr")},
                        {"x", counts("x")}};
  report["swaps"] = result.n_swaps;
  report["initial_layout"] = result.initial_layout.v2p;
  report["final_layout"] = result.final_layout.v2p;
  write_json(report, g.out_path(o.metadata_out));
  g.info("wrote " + out_path.string());
  return 0;
}

// --- cost ---------------------------------------------------------------------

struct CostOpts {
  double minutes = -1.0;
  double rate = -1.0;
  long long samples = 0;
  double per_sample_s = 0.0;
  long long total_samples = 0;
  std::string out;
};

int run_cost(const CostOpts& o, const GlobalOpts& g) {
  if (o.rate < 0.0) throw CLI::RequiredError("--rate");
  ordered_json report = report_scaffold("cost", g);
  report["config"] = {{"minutes", o.minutes},
                      {"rate", o.rate},
                      {"samples", o.samples},
                      {"per_sample_s", o.per_sample_s},
                      {"total_samples", o.total_samples}};

  std::optional<double> direct_minutes, direct_usd;
  if (o.minutes >= 0.0) {
    direct_minutes = o.minutes;
    direct_usd = qmlsim::qpu_cost(o.minutes, o.rate);
    report["minutes"] = *direct_minutes;
    report["usd"] = *direct_usd;
  }
  std::optional<qmlsim::CostEstimate> est;
  if (o.samples > 0) {
    if (o.per_sample_s <= 0.0)
      throw CLI::RequiredError("--per-sample-s (with --samples)");
    qmlsim::CostParams params;
    params.rate_usd_per_min = o.rate;
    params.per_sample_seconds = o.per_sample_s;
    est = qmlsim::extrapolate_cost(
        o.samples, params,
        o.total_samples > 0 ? std::optional<long long>(o.total_samples)
                            : std::nullopt);
    report["per_sample_estimate"] = {{"minutes", est->minutes},
                                     {"usd", est->usd}};
    if (est->fraction) report["fraction"] = *est->fraction;
    if (!direct_minutes) {
      report["minutes"] = est->minutes;
      report["usd"] = est->usd;
    }
  }
  if (!direct_minutes && !est)
    throw CLI::RequiredError("--minutes or --samples");
  if (direct_usd && est &&
      std::abs(*direct_usd - est->usd) > 0.01 * std::max(*direct_usd, est->usd))
    report["note"] =
        "total-time and per-sample estimates disagree; both are reported";

  const std::string payload = report.dump(2);
  std::cout << payload << "\n";
  if (!o.out.empty()) write_json(report, g.out_path(o.out));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid quantum-classical classifier toolkit"};
  app.set_version_flag("--version", qmlsim::kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "global random seed");
  app.add_option("--out-dir", g.out_dir, "directory for generated files");
  app.add_flag("--quiet", g.quiet, "suppress progress output");

  SynthOpts synth;
  auto* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic two-cluster dataset");
  synth_cmd->add_option("--n", synth.n, "sample count (even)")->required();
  synth_cmd->add_option("--dims", synth.dims, "feature dimension");
  synth_cmd->add_option("--sep", synth.sep, "cluster mean separation");
  synth_cmd->add_option("--out", synth.out, "output csv name");
  synth_cmd->add_flag("--header", synth.header, "write a header row");

  TrainOpts train;
  auto* train_cmd =
      app.add_subcommand("train", "train the hybrid classifier");
  train_cmd->add_option("--data", train.data, "training csv")->required();
  train_cmd->add_option("--phase", train.phase,
                        "noiseless | topology | noisy");
  train_cmd->add_option("--device", train.device,
                        "device spec path or built-in name");
  train_cmd->add_option("--optimizer", train.optimizer, "adam | spsa");
  train_cmd->add_option("--epochs", train.epochs, "epoch budget");
  train_cmd->add_option("--batch", train.batch, "batch size");
  train_cmd->add_option("--lr", train.lr, "adam learning rate");
  train_cmd->add_option("--spsa-a", train.spsa_a, "spsa gain numerator");
  train_cmd->add_option("--spsa-c", train.spsa_c, "spsa perturbation size");
  train_cmd->add_option("--val-fraction", train.val_fraction,
                        "validation share of the data");
  train_cmd->add_option("--patience", train.patience,
                        "early-stop patience (0 = off)");
  train_cmd->add_option("--qubits", train.qubits, "qubit count");
  train_cmd->add_option("--encoding", train.encoding,
                        "amplitude | angle-x | angle-y");
  train_cmd->add_option("--ansatz", train.ansatz, "std | sel | bellman");
  train_cmd->add_option("--layers", train.layers, "ansatz layers");
  train_cmd->add_option("--measured-qubit", train.measured, "readout qubit");
  train_cmd->add_option("--model-out", train.model_out, "model file name");
  train_cmd->add_option("--history-out", train.history_out,
                        "history csv name");
  train_cmd->add_option("--summary-out", train.summary_out,
                        "summary json name");

  EvalOpts eval;
  auto* eval_cmd =
      app.add_subcommand("eval", "evaluate a model on one or more backends");
  eval_cmd->add_option("--model", eval.model, "model file")->required();
  eval_cmd->add_option("--data", eval.data, "evaluation csv")->required();
  eval_cmd->add_option("--backend", eval.backends,
                       "noiseless | transpiled | noisy | shots | shots-noisy");
  eval_cmd->add_option("--device", eval.device,
                       "device spec path or built-in name");
  eval_cmd->add_option("--shots", eval.shots, "shots per sample");
  eval_cmd->add_flag("--flip-labels", eval.flip_labels,
                     "relabel the dataset (l -> 1-l) before evaluating");
  eval_cmd->add_option("--report", eval.report_out, "report json name");
  eval_cmd->add_option("--csv", eval.csv_out, "row csv name");

  TranspileOpts transpile;
  auto* transpile_cmd = app.add_subcommand(
      "transpile", "lower a circuit or model onto a device");
  transpile_cmd->add_option("--model", transpile.model, "model file");
  transpile_cmd->add_option("--circuit", transpile.circuit,
                            "circuit text file");
  transpile_cmd->add_option("--device", transpile.device, "device spec")
      ->required();
  transpile_cmd->add_option("--out", transpile.out, "routed circuit name");
  transpile_cmd->add_option("--metadata", transpile.metadata_out,
                            "metadata json name");
  transpile_cmd->add_option("--qasm", transpile.qasm_out,
                            "also emit an OpenQASM 3 file");

  CostOpts cost;
  auto* cost_cmd =
      app.add_subcommand("cost", "QPU money-cost accounting");
  cost_cmd->add_option("--minutes", cost.minutes, "measured QPU minutes");
  cost_cmd->add_option("--rate", cost.rate, "USD per QPU minute");
  cost_cmd->add_option("--samples", cost.samples, "samples to extrapolate");
  cost_cmd->add_option("--per-sample-s", cost.per_sample_s,
                       "seconds per sample");
  cost_cmd->add_option("--total-samples", cost.total_samples,
                       "full dataset size (for the fraction)");
  cost_cmd->add_option("--out", cost.out, "also write the json here");

  try {
    app.parse(argc, argv);
    if (synth_cmd->parsed()) return run_synth(synth, g);
    if (train_cmd->parsed()) return run_train(train, g);
    if (eval_cmd->parsed()) return run_eval(eval, g);
    if (transpile_cmd->parsed()) return run_transpile(transpile, g);
    if (cost_cmd->parsed()) return run_cost(cost, g);
    std::cerr << app.help();
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const qmlsim::NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const qmlsim::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const qmlsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
