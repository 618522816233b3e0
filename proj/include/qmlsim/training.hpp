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

#pragma once

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>
#include <optional>

#include "qmlsim/dataset.hpp"
#include "qmlsim/errors.hpp"
#include "qmlsim/model.hpp"

namespace qmlsim {

/// Mean binary cross-entropy; outputs are clamped away from {0, 1} at 1e-12.
inline double bce_loss(std::span<const double> outputs,
                       std::span<const int> labels,
                       long long* clamped = nullptr) {
  if (outputs.empty() || outputs.size() != labels.size())
    throw Error("bce loss needs matching, non-empty outputs and labels");
  double acc = 0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    double y = outputs[i];
    if (y <= 1e-12 || y >= 1.0 - 1e-12) {
      y = std::clamp(y, 1e-12, 1.0 - 1e-12);
      if (clamped) ++*clamped;
    }
    const double l = static_cast<double>(labels[i]);
    acc += -(l * std::log(y) + (1.0 - l) * std::log(1.0 - y));
  }
  return acc / static_cast<double>(outputs.size());
}

enum class TrainPhase { Noiseless, Topology, Noisy };
enum class OptimizerKind { Adam, Spsa };

inline const char* phase_name(TrainPhase p) {
  switch (p) {
    case TrainPhase::Noiseless: return "noiseless";
    case TrainPhase::Topology: return "topology";
    case TrainPhase::Noisy: return "noisy";
  }
  return "?";
}

inline std::optional<TrainPhase> phase_from_name(const std::string& s) {
  if (s == "noiseless") return TrainPhase::Noiseless;
  if (s == "topology") return TrainPhase::Topology;
  if (s == "noisy") return TrainPhase::Noisy;
  return std::nullopt;
}

struct AdamParams {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct SpsaParams {
  double a = 0.2;      // gain numerator
  double c = 0.1;      // perturbation numerator
  double alpha = 0.602;
  double gamma = 0.101;
};

/**
 * Device-oriented training setup. The phases tighten the simulation step by
 * step: noiseless runs the abstract circuit, topology runs the circuit
 * transpiled to the device's couplings and native gates, and noisy further
 * attaches the device noise model to every evaluation.
 */
struct TrainConfig {
  TrainPhase phase = TrainPhase::Noiseless;
  OptimizerKind optimizer = OptimizerKind::Adam;
  AdamParams adam;
  SpsaParams spsa;
  int epochs = 50;
  int batch_size = 32;
  std::uint64_t seed = 1;
  double val_fraction = 0.2;
  int patience = 0;  // 0 disables early stopping
  std::optional<DeviceSpec> device;
  std::optional<Layout> initial_layout;
};

/// Per-epoch trace. Losses and accuracies are deterministic given the seed;
/// wall seconds are whatever the clock says.
struct TrainHistory {
  std::vector<double> loss;
  std::vector<double> accuracy;
  std::vector<double> seconds;

  int epochs_run() const { return static_cast<int>(loss.size()); }
};

struct TrainResult {
  HybridModel model;
  TrainHistory history;
  double best_val_loss = 0.0;
  int best_epoch = 0;
};

inline void write_history_csv(const TrainHistory& h,
                              const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write history: " + path.string());
  out << "epoch,loss,accuracy,seconds\n";
  for (int e = 0; e < h.epochs_run(); ++e)
    out << (e + 1) << ',' << format_double(h.loss[e]) << ','
        << format_double(h.accuracy[e]) << ',' << format_double(h.seconds[e])
        << "\n";
}

namespace detail {

inline ExecutionConfig exec_for_phase(const TrainConfig& cfg) {
  switch (cfg.phase) {
    case TrainPhase::Noiseless:
      return ExecutionConfig::noiseless();
    case TrainPhase::Topology:
      if (!cfg.device) throw Error("topology phase requires a device spec");
      return ExecutionConfig::transpiled(*cfg.device);
    case TrainPhase::Noisy: {
      if (!cfg.device) throw Error("noisy phase requires a device spec");
      ExecutionConfig exec = ExecutionConfig::noisy(*cfg.device);
      exec.initial_layout = cfg.initial_layout;
      return exec;
    }
  }
  throw Error("unknown training phase");
}

struct FlatModel {
  // Order: linear_w row-major, linear_b, quantum_weights.
  static Eigen::VectorXd flatten(const HybridModel& m) {
    Eigen::VectorXd v(m.n_parameters());
    long k = 0;
    for (long r = 0; r < m.linear_w.rows(); ++r)
      for (long c = 0; c < m.linear_w.cols(); ++c) v(k++) = m.linear_w(r, c);
    for (long i = 0; i < m.linear_b.size(); ++i) v(k++) = m.linear_b(i);
    for (long i = 0; i < m.quantum_weights.size(); ++i)
      v(k++) = m.quantum_weights(i);
    return v;
  }

  static void unflatten(const Eigen::VectorXd& v, HybridModel& m) {
    long k = 0;
    for (long r = 0; r < m.linear_w.rows(); ++r)
      for (long c = 0; c < m.linear_w.cols(); ++c) m.linear_w(r, c) = v(k++);
    for (long i = 0; i < m.linear_b.size(); ++i) m.linear_b(i) = v(k++);
    for (long i = 0; i < m.quantum_weights.size(); ++i)
      m.quantum_weights(i) = v(k++);
  }

  static Eigen::VectorXd flatten_gradient(const BatchGradient& g) {
    Eigen::VectorXd v(g.dw.size() + g.db.size() + g.dq.size());
    long k = 0;
    for (long r = 0; r < g.dw.rows(); ++r)
      for (long c = 0; c < g.dw.cols(); ++c) v(k++) = g.dw(r, c);
    for (long i = 0; i < g.db.size(); ++i) v(k++) = g.db(i);
    for (long i = 0; i < g.dq.size(); ++i) v(k++) = g.dq(i);
    return v;
  }
};

inline double dataset_loss(const ModelEngine& engine, const HybridModel& model,
                           const Dataset& ds, double* accuracy_out = nullptr) {
  std::vector<double> outputs(ds.n_samples());
  long long correct = 0;
  for (long i = 0; i < ds.n_samples(); ++i) {
    const Eigen::VectorXd row = ds.features.row(i).transpose();
    outputs[i] = engine.forward(model, {row.data(),
                                        static_cast<size_t>(row.size())});
    if ((outputs[i] >= 0.5 ? 1 : 0) == ds.labels[i]) ++correct;
  }
  if (accuracy_out)
    *accuracy_out =
        static_cast<double>(correct) / static_cast<double>(ds.n_samples());
  return bce_loss(outputs, ds.labels);
}

}  // namespace detail

/**
 * One simultaneous-perturbation step (two loss evaluations) on the flat
 * parameter vector, with the standard gain sequences a_k = a/k^alpha and
 * c_k = c/k^gamma. Works in any exact execution mode, including noisy.
 */
inline HybridModel spsa_step(const HybridModel& model, const ModelEngine& engine,
                             const Eigen::MatrixXd& X,
                             std::span<const int> labels, long iteration,
                             const SpsaParams& params, std::uint64_t seed) {
  if (iteration < 1) throw Error("spsa iteration counter starts at 1");
  const double ak =
      params.a / std::pow(static_cast<double>(iteration), params.alpha);
  const double ck =
      params.c / std::pow(static_cast<double>(iteration), params.gamma);

  Eigen::VectorXd w = detail::FlatModel::flatten(model);
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(iteration)));
  Eigen::VectorXd delta(w.size());
  for (long i = 0; i < w.size(); ++i) delta(i) = rng.bernoulli(0.5) ? 1.0 : -1.0;

  HybridModel probe = model;
  const auto batch_loss = [&](const Eigen::VectorXd& weights) {
    detail::FlatModel::unflatten(weights, probe);
    std::vector<double> outputs(X.rows());
    for (long i = 0; i < X.rows(); ++i) {
      const Eigen::VectorXd row = X.row(i).transpose();
      outputs[i] = engine.forward(probe, {row.data(),
                                          static_cast<size_t>(row.size())});
    }
    return bce_loss(outputs, labels);
  };
  const double lp = batch_loss(w + ck * delta);
  const double lm = batch_loss(w - ck * delta);
  if (!std::isfinite(lp) || !std::isfinite(lm))
    throw NumericError("non-finite loss in spsa evaluation");

  const double scale = (lp - lm) / (2.0 * ck);
  HybridModel out = model;
  detail::FlatModel::unflatten(
      Eigen::VectorXd(w - ak * scale * delta), out);
  return out;
}

/**
 * Trains a model through the configured phase, returning the weights of the
 * best validation-loss epoch. Deterministic given the seed: the validation
 * split, the batch order, and every optimizer draw derive from it.
 */
inline TrainResult train(const HybridModel& initial, const Dataset& dataset,
                         const TrainConfig& cfg) {
  validate_model(initial);
  validate_dataset(dataset);
  if (dataset.n_samples() < 1) throw Error("training dataset is empty");
  if (cfg.epochs < 1) throw Error("epoch count must be at least 1");
  if (cfg.batch_size < 1) throw Error("batch size must be at least 1");
  if (dataset.n_features() != initial.config.in_dim)
    throw Error("dataset feature width does not match the model");

  const ExecutionConfig exec = detail::exec_for_phase(cfg);
  const ModelEngine engine(initial.config, exec);

  // Seeded stratified validation split; tiny datasets fall back to
  // validating on the training side.
  Dataset train_set = dataset, val_set = dataset;
  if (cfg.val_fraction > 0.0 && dataset.n_samples() >= 5) {
    auto [tr, va] = split(dataset, 1.0 - cfg.val_fraction, mix_seed(cfg.seed, 17));
    train_set = std::move(tr);
    val_set = std::move(va);
  }

  HybridModel model = initial;
  HybridModel best = initial;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  int stall = 0;

  Eigen::VectorXd adam_m, adam_v;
  if (cfg.optimizer == OptimizerKind::Adam) {
    adam_m = Eigen::VectorXd::Zero(initial.n_parameters());
    adam_v = Eigen::VectorXd::Zero(initial.n_parameters());
  }
  long adam_t = 0;
  long spsa_k = 0;

  Rng shuffle_rng(mix_seed(cfg.seed, 29));
  std::vector<long> order(train_set.n_samples());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    for (long i = static_cast<long>(order.size()) - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.uniform_int(0, static_cast<int>(i))]);

    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      Eigen::MatrixXd bx(stop - start, train_set.n_features());
      std::vector<double> bl(stop - start);
      std::vector<int> bli(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        bx.row(static_cast<long>(i - start)) = train_set.features.row(order[i]);
        bl[i - start] = train_set.labels[order[i]];
        bli[i - start] = train_set.labels[order[i]];
      }
      if (cfg.optimizer == OptimizerKind::Adam) {
        const BatchGradient grad = engine.gradient(model, bx, bl);
        if (!std::isfinite(grad.loss))
          throw NumericError("non-finite training loss; aborting");
        const Eigen::VectorXd g = detail::FlatModel::flatten_gradient(grad);
        Eigen::VectorXd w = detail::FlatModel::flatten(model);
        ++adam_t;
        adam_m = cfg.adam.beta1 * adam_m + (1.0 - cfg.adam.beta1) * g;
        adam_v = cfg.adam.beta2 * adam_v.array().matrix() +
                 (1.0 - cfg.adam.beta2) * g.cwiseProduct(g);
        const double bc1 = 1.0 - std::pow(cfg.adam.beta1, adam_t);
        const double bc2 = 1.0 - std::pow(cfg.adam.beta2, adam_t);
        for (long p = 0; p < w.size(); ++p)
          w(p) -= cfg.adam.lr * (adam_m(p) / bc1) /
                  (std::sqrt(adam_v(p) / bc2) + cfg.adam.eps);
        detail::FlatModel::unflatten(w, model);
      } else {
        model = spsa_step(model, engine, bx, bli, ++spsa_k, cfg.spsa,
                          cfg.seed);
      }
    }

    double train_acc = 0;
    const double train_loss =
        detail::dataset_loss(engine, model, train_set, &train_acc);
    if (!std::isfinite(train_loss))
      throw NumericError("non-finite training loss after epoch " +
                         std::to_string(epoch));
    const double val_loss = detail::dataset_loss(engine, model, val_set);
    const auto t1 = std::chrono::steady_clock::now();
    result.history.loss.push_back(train_loss);
    result.history.accuracy.push_back(train_acc);
    result.history.seconds.push_back(
        std::chrono::duration<double>(t1 - t0).count());

    if (val_loss < best_val) {
      best_val = val_loss;
      best = model;
      best_epoch = epoch;
      stall = 0;
    } else if (cfg.patience > 0 && ++stall >= cfg.patience) {
      break;
    }
  }
  result.model = std::move(best);
  result.best_val_loss = best_val;
  result.best_epoch = best_epoch;
  return result;
}

}  // namespace qmlsim
