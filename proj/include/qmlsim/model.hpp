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

#include <Eigen/Dense>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "qmlsim/circuit.hpp"
#include "qmlsim/device.hpp"
#include "qmlsim/errors.hpp"
#include "qmlsim/layers.hpp"
#include "qmlsim/transpiler.hpp"

namespace qmlsim {

struct ModelConfig {
  int n_qubits = 8;
  int in_dim = 26;
  EncodingKind encoding = EncodingKind::Amplitude;
  AnsatzKind ansatz = AnsatzKind::SimplifiedTwoDesign;
  int ansatz_layers = 3;
  int measured_qubit = 0;
};

/// Width of the classical linear layer's output, fixed by the encoding.
inline int model_out_dim(const ModelConfig& cfg) {
  return cfg.encoding == EncodingKind::Amplitude ? (1 << cfg.n_qubits)
                                                 : cfg.n_qubits;
}

inline void validate_model_config(const ModelConfig& cfg) {
  if (cfg.n_qubits < 1 || cfg.n_qubits > kMaxQubits)
    throw Error("model qubit count outside [1, 12]");
  if (cfg.in_dim < 1) throw Error("model input dimension must be positive");
  if (cfg.ansatz_layers < 1) throw Error("model needs at least one layer");
  if (cfg.measured_qubit < 0 || cfg.measured_qubit >= cfg.n_qubits)
    throw Error("measured qubit out of range");
}

/**
 * The hybrid classifier: a single classical linear layer feeding a quantum
 * feature map and trainable ansatz, read out as <Z> of one qubit, squashed
 * through a sigmoid.
 */
struct HybridModel {
  ModelConfig config;
  Eigen::MatrixXd linear_w;       // out_dim x in_dim
  Eigen::VectorXd linear_b;       // out_dim
  Eigen::VectorXd quantum_weights;

  long n_quantum_params() const {
    return param_count(config.ansatz, config.n_qubits, config.ansatz_layers);
  }

  long n_parameters() const {
    return static_cast<long>(linear_w.size() + linear_b.size() +
                             quantum_weights.size());
  }

  static HybridModel random_init(const ModelConfig& cfg, std::uint64_t seed) {
    validate_model_config(cfg);
    HybridModel m;
    m.config = cfg;
    const int out = model_out_dim(cfg);
    Rng rng(seed);
    m.linear_w.resize(out, cfg.in_dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.in_dim));
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < cfg.in_dim; ++c)
        m.linear_w(r, c) = scale * rng.normal();
    m.linear_b = Eigen::VectorXd::Zero(out);
    const long nq = m.n_quantum_params();
    m.quantum_weights.resize(nq);
    for (long i = 0; i < nq; ++i)
      m.quantum_weights(i) = rng.uniform(-kPi, kPi);
    return m;
  }
};

inline void validate_model(const HybridModel& m) {
  validate_model_config(m.config);
  const int out = model_out_dim(m.config);
  if (m.linear_w.rows() != out || m.linear_w.cols() != m.config.in_dim)
    throw Error("linear weight shape does not match the configuration");
  if (m.linear_b.size() != out) throw Error("linear bias shape mismatch");
  if (m.quantum_weights.size() != m.n_quantum_params())
    throw Error("quantum weight count does not match the ansatz");
}

enum class ExecMode { ExactNoiseless, ExactTranspiled, ExactNoisy, Shots };

/**
 * How the quantum layer runs: exactly on the abstract circuit, exactly on
 * the device-transpiled circuit (with or without its noise model), or by
 * sampling a finite number of shots.
 */
struct ExecutionConfig {
  ExecMode mode = ExecMode::ExactNoiseless;
  std::optional<DeviceSpec> device;
  std::optional<Layout> initial_layout;
  bool shots_noisy = false;  // Shots mode: sample from the noisy state
  long long shots = 1024;
  std::uint64_t seed = 0;
  std::uint64_t route_seed = 0;
  bool apply_readout = true;

  static ExecutionConfig noiseless() { return {}; }

  static ExecutionConfig transpiled(DeviceSpec dev) {
    ExecutionConfig c;
    c.mode = ExecMode::ExactTranspiled;
    c.device = std::move(dev);
    return c;
  }

  static ExecutionConfig noisy(DeviceSpec dev) {
    ExecutionConfig c;
    c.mode = ExecMode::ExactNoisy;
    c.device = std::move(dev);
    return c;
  }

  static ExecutionConfig sampled(long long shots, std::uint64_t seed,
                                 std::optional<DeviceSpec> dev = std::nullopt) {
    ExecutionConfig c;
    c.mode = ExecMode::Shots;
    c.shots = shots;
    c.seed = seed;
    if (dev) {
      c.device = std::move(dev);
      c.shots_noisy = true;
    }
    return c;
  }
};

inline double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }

/// Gradient of the mean binary cross-entropy over a batch.
struct BatchGradient {
  Eigen::MatrixXd dw;
  Eigen::VectorXd db;
  Eigen::VectorXd dq;
  double loss = 0.0;
};

/**
 * Compiled executor for one (model configuration, execution mode) pair.
 * Building it transpiles the circuit template once; forward and gradient
 * calls then only bind weights and encoding angles into the template.
 * Engines are immutable after construction and safe to share across threads.
 */
class ModelEngine {
 public:
  ModelEngine(const ModelConfig& cfg, const ExecutionConfig& exec)
      : cfg_(cfg), exec_(exec), abstract_(1) {
    validate_model_config(cfg);
    if (needs_device() && !exec_.device)
      throw Error("this execution mode requires a device spec");
    if (exec_.mode == ExecMode::Shots && exec_.shots < 1)
      throw Error("shot count must be positive");
    compile();
  }

  const ModelConfig& config() const { return cfg_; }
  const ExecutionConfig& exec_config() const { return exec_; }
  int n_weight_slots() const { return n_weight_slots_; }
  const std::optional<Layout>& final_layout() const { return final_layout_; }

  double forward(const HybridModel& model, std::span<const double> x) const {
    return forward_seeded(model, x, exec_.seed);
  }

  /// Forward pass with an explicit sampling seed (Shots mode only uses it).
  double forward_seeded(const HybridModel& model, std::span<const double> x,
                        std::uint64_t seed) const {
    check_model(model);
    const Eigen::VectorXd z = linear_out(model, x);
    std::vector<double> slots = make_slots_z(model, z);
    if (exec_.mode == ExecMode::Shots) {
      const QubitState state = run_state(slots);
      ShotCounts counts =
          sample_shots(state, measured_wire_, exec_.shots, seed);
      if (readout_ && exec_.apply_readout)
        counts = apply_readout_error(counts, *readout_, mix_seed(seed, 1));
      const double p1 =
          static_cast<double>(counts.count_of("1")) / exec_.shots;
      return sigmoid(2.0 * p1 - 1.0);
    }
    return output_from_m(measure_m(slots));
  }

  int predict(const HybridModel& model, std::span<const double> x) const {
    return forward(model, x) >= 0.5 ? 1 : 0;
  }

  /**
   * Mean-BCE gradient over a batch (rows of X), exact modes only. Ansatz
   * angles are differentiated with the parameter-shift rule; the linear
   * layer's derivatives chain through a central-finite-difference Jacobian
   * of the quantum layer with respect to its inputs (h = 1e-4).
   */
  BatchGradient gradient(const HybridModel& model, const Eigen::MatrixXd& X,
                         std::span<const double> labels) const {
    if (exec_.mode == ExecMode::Shots)
      throw Error("shot-based execution cannot train; use an exact mode");
    check_model(model);
    const auto batch = static_cast<long>(X.rows());
    if (batch == 0 || batch != static_cast<long>(labels.size()))
      throw Error("batch features and labels must have matching sizes");
    const int out = model_out_dim(cfg_);

    BatchGradient grad;
    grad.dw = Eigen::MatrixXd::Zero(out, cfg_.in_dim);
    grad.db = Eigen::VectorXd::Zero(out);
    grad.dq = Eigen::VectorXd::Zero(n_weight_slots_);

    std::vector<double> dm_dtheta(n_weight_slots_);
    std::vector<double> dm_dz(out);
    long long clamped = 0;
    for (long i = 0; i < batch; ++i) {
      const Eigen::VectorXd x = X.row(i).transpose();
      const Eigen::VectorXd z =
          model.linear_w * x + model.linear_b;
      std::vector<double> slots = make_slots_z(model, z);
      double m = 0.0;
      if (fast_grad_ok_)
        fast_density_grad(slots, z, dm_dtheta, dm_dz, m);
      else
        naive_grad(slots, z, model, dm_dtheta, dm_dz, m);

      double y = output_from_m(m);
      if (y <= 1e-12 || y >= 1.0 - 1e-12) {
        y = std::clamp(y, 1e-12, 1.0 - 1e-12);
        ++clamped;
      }
      const double label = labels[i];
      grad.loss += -(label * std::log(y) + (1.0 - label) * std::log(1.0 - y));
      const double factor = (y - label) / static_cast<double>(batch) * ds_dm();
      for (int p = 0; p < n_weight_slots_; ++p)
        grad.dq(p) += factor * dm_dtheta[p];
      for (int j = 0; j < out; ++j) {
        const double dz = factor * dm_dz[j];
        grad.db(j) += dz;
        grad.dw.row(j) += dz * x.transpose();
      }
      if (!std::isfinite(grad.loss))
        throw NumericError("non-finite loss at batch sample " +
                           std::to_string(i));
    }
    grad.loss /= static_cast<double>(batch);
    return grad;
  }

 private:
  bool needs_device() const {
    return exec_.mode == ExecMode::ExactTranspiled ||
           exec_.mode == ExecMode::ExactNoisy ||
           (exec_.mode == ExecMode::Shots && exec_.shots_noisy);
  }

  void check_model(const HybridModel& model) const {
    validate_model(model);
    if (model.config.n_qubits != cfg_.n_qubits ||
        model.config.in_dim != cfg_.in_dim ||
        model.config.encoding != cfg_.encoding ||
        model.config.ansatz != cfg_.ansatz ||
        model.config.ansatz_layers != cfg_.ansatz_layers ||
        model.config.measured_qubit != cfg_.measured_qubit)
      throw Error("model configuration does not match this engine");
  }

  Eigen::VectorXd linear_out(const HybridModel& model,
                             std::span<const double> x) const {
    if (static_cast<int>(x.size()) != cfg_.in_dim)
      throw Error("feature vector length " + std::to_string(x.size()) +
                  " does not match in_dim " + std::to_string(cfg_.in_dim));
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), x.size());
    return model.linear_w * xv + model.linear_b;
  }

  std::vector<double> make_slots_z(const HybridModel& model,
                                   const Eigen::VectorXd& z) const {
    std::vector<double> slots(n_weight_slots_ + n_encoding_slots_);
    for (int p = 0; p < n_weight_slots_; ++p)
      slots[p] = model.quantum_weights(p);
    fill_encoding_slots(z, slots);
    return slots;
  }

  std::vector<double> make_slots(const HybridModel& model,
                                 std::span<const double> x) const {
    return make_slots_z(model, linear_out(model, x));
  }

  void fill_encoding_slots(const Eigen::VectorXd& z,
                           std::vector<double>& slots) const {
    if (cfg_.encoding == EncodingKind::Amplitude) {
      std::vector<std::complex<double>> c(z.size());
      for (long i = 0; i < z.size(); ++i) c[i] = z(i);
      const auto angles = amplitude_embedding_angles(c, cfg_.n_qubits);
      std::copy(angles.begin(), angles.end(), slots.begin() + n_weight_slots_);
    } else {
      for (long i = 0; i < z.size(); ++i) slots[n_weight_slots_ + i] = z(i);
    }
  }

  // --- compilation -------------------------------------------------------

  void compile() {
    n_weight_slots_ = static_cast<int>(
        param_count(cfg_.ansatz, cfg_.n_qubits, cfg_.ansatz_layers));
    n_encoding_slots_ =
        cfg_.encoding == EncodingKind::Amplitude
            ? static_cast<int>(amplitude_embedding_slot_count(cfg_.n_qubits))
            : cfg_.n_qubits;

    Circuit tmpl(cfg_.n_qubits);
    if (cfg_.encoding == EncodingKind::Amplitude)
      tmpl.append(amplitude_embedding_template(cfg_.n_qubits, n_weight_slots_));
    else
      tmpl.append(
          angle_encoding_template(cfg_.n_qubits, cfg_.encoding,
                                  n_weight_slots_));
    tmpl.append(ansatz_template(cfg_.ansatz, cfg_.n_qubits, cfg_.ansatz_layers,
                                /*first_slot=*/0));
    abstract_ = std::move(tmpl);

    if (!needs_device()) {
      run_circuit_ = &abstract_;
      sim_wires_ = cfg_.n_qubits;
      measured_wire_ = cfg_.measured_qubit;
      use_density_ = false;
      fast_grad_ok_ = false;
      return;
    }

    TranspileOptions opts;
    opts.initial_layout = exec_.initial_layout;
    opts.seed = exec_.route_seed;
    opts.with_noise = exec_.mode == ExecMode::ExactNoisy ||
                      (exec_.mode == ExecMode::Shots && exec_.shots_noisy);
    TranspileResult tr = transpile(abstract_, *exec_.device, opts);
    final_layout_ = tr.final_layout;

    // Compact the routed circuit onto its touched wires so the simulation
    // width stays at the circuit size rather than the device size.
    std::set<int> used;
    for (const auto& op : tr.circuit.ops())
      for (int i = 0; i < op.gate.arity(); ++i) used.insert(op.gate.targets[i]);
    used.insert(tr.final_layout.v2p.at(cfg_.measured_qubit));
    if (static_cast<int>(used.size()) > kMaxQubits)
      throw Error("routed circuit touches more than 12 wires");
    std::map<int, int> remap;
    for (const int w : used) remap[w] = static_cast<int>(remap.size());

    Circuit compact(static_cast<int>(used.size()));
    for (const auto& op : tr.circuit.ops()) {
      Gate g = op.gate;
      for (int i = 0; i < g.arity(); ++i) g.targets[i] = remap[g.targets[i]];
      compact.add(g);
      auto& noise = compact.mutable_ops().back().noise;
      noise = op.noise;
      for (auto& att : noise) att.qubit = remap[att.qubit];
    }
    for (const auto& [q, mat] : tr.circuit.readout())
      if (remap.count(q)) compact.tag_readout(remap[q], mat);

    measured_wire_ = remap[tr.final_layout.v2p.at(cfg_.measured_qubit)];
    sim_wires_ = compact.n_qubits();
    compiled_ = std::move(compact);
    run_circuit_ = &*compiled_;
    use_density_ = run_circuit_->has_noise();
    if (const auto it = run_circuit_->readout().find(measured_wire_);
        it != run_circuit_->readout().end())
      readout_ = it->second;

    index_slots();
  }

  /// Maps each angle slot to the unique op carrying it; the fast gradient
  /// sweep needs that uniqueness, and the template construction provides it.
  void index_slots() {
    const int total = n_weight_slots_ + n_encoding_slots_;
    slot_op_.assign(total, -1);
    bool unique = true;
    const auto& ops = run_circuit_->ops();
    for (int k = 0; k < static_cast<int>(ops.size()); ++k) {
      const Gate& g = ops[k].gate;
      for (int p = 0; p < g.n_params(); ++p) {
        const auto slot = g.params[p].slot;
        if (slot < 0) continue;
        if (slot_op_[slot] != -1) unique = false;
        slot_op_[slot] = k;
      }
    }
    for (int s = 0; s < total && unique; ++s) unique = slot_op_[s] != -1;
    const bool z_local = cfg_.encoding != EncodingKind::Amplitude;
    fast_grad_ok_ = use_density_ && unique && z_local;
    if (fast_grad_ok_) {
      op_slot_.assign(run_circuit_->ops().size(), -1);
      for (int s = 0; s < total; ++s) op_slot_[slot_op_[s]] = s;
    }
  }

  // --- execution ---------------------------------------------------------

  double z_expectation_of(const Eigen::MatrixXcd& rho) const {
    const std::size_t dim = std::size_t{1} << sim_wires_;
    const std::size_t mask = detail::bit_mask(sim_wires_, measured_wire_);
    double z = 0;
    for (std::size_t i = 0; i < dim; ++i)
      z += (i & mask) ? -rho(i, i).real() : rho(i, i).real();
    return z;
  }

  double z_expectation_of(const Eigen::VectorXcd& psi) const {
    const std::size_t dim = std::size_t{1} << sim_wires_;
    const std::size_t mask = detail::bit_mask(sim_wires_, measured_wire_);
    double z = 0;
    for (std::size_t i = 0; i < dim; ++i)
      z += (i & mask) ? -std::norm(psi(i)) : std::norm(psi(i));
    return z;
  }

  double measure_m(std::span<const double> slots) const {
    if (use_density_) return z_expectation_of(run_density(*run_circuit_, slots));
    return z_expectation_of(run_statevector(*run_circuit_, slots));
  }

  QubitState run_state(std::span<const double> slots) const {
    if (use_density_)
      return QubitState::from_density(run_density(*run_circuit_, slots));
    return QubitState::from_amplitudes(run_statevector(*run_circuit_, slots));
  }

  /// ds/dm through p1 and the optional readout confusion.
  double ds_dm() const {
    if (readout_ && exec_.apply_readout)
      return (*readout_)(0, 1) - (*readout_)(1, 1);
    return -1.0;
  }

  double output_from_m(double m) const {
    double p1 = (1.0 - m) / 2.0;
    if (readout_ && exec_.apply_readout) {
      const auto [r0, r1] =
          apply_readout_error({(1.0 + m) / 2.0, p1}, *readout_);
      p1 = r1;
    }
    return sigmoid(2.0 * p1 - 1.0);
  }

  // --- gradients ---------------------------------------------------------

  static constexpr double kFdStep = 1e-4;

  void naive_grad(std::vector<double>& slots, const Eigen::VectorXd& z,
                  const HybridModel& model, std::vector<double>& dm_dtheta,
                  std::vector<double>& dm_dz, double& m) const {
    m = measure_m(slots);
    for (int p = 0; p < n_weight_slots_; ++p) {
      const double saved = slots[p];
      slots[p] = saved + kPi / 2;
      const double ep = measure_m(slots);
      slots[p] = saved - kPi / 2;
      const double em = measure_m(slots);
      slots[p] = saved;
      dm_dtheta[p] = (ep - em) / 2.0;
    }
    Eigen::VectorXd zs = z;
    for (long j = 0; j < z.size(); ++j) {
      const double saved = zs(j);
      zs(j) = saved + kFdStep;
      fill_encoding_slots(zs, slots);
      const double ep = measure_m(slots);
      zs(j) = saved - kFdStep;
      fill_encoding_slots(zs, slots);
      const double em = measure_m(slots);
      zs(j) = saved;
      dm_dz[j] = (ep - em) / (2.0 * kFdStep);
    }
    fill_encoding_slots(z, slots);
  }

  /**
   * One-forward-one-backward evaluation of all parameter-shift and
   * finite-difference derivatives on the noisy (density) path. The backward
   * sweep propagates the measured observable through the adjoint channel,
   * caching it at every parameterized gate; each shifted expectation is then
   * a single-gate conjugation plus a trace against the cached observable,
   * instead of a full re-simulation.
   */
  void fast_density_grad(std::vector<double>& slots, const Eigen::VectorXd& z,
                         std::vector<double>& dm_dtheta,
                         std::vector<double>& dm_dz, double& m) const {
    const Circuit& c = *run_circuit_;
    const auto& ops = c.ops();
    const std::size_t dim = std::size_t{1} << sim_wires_;
    const std::size_t mask = detail::bit_mask(sim_wires_, measured_wire_);

    // Backward sweep: suffix observables at every parameterized position.
    Eigen::MatrixXcd obs = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) obs(i, i) = (i & mask) ? -1.0 : 1.0;
    std::map<int, Eigen::MatrixXcd> stored;
    for (int k = static_cast<int>(ops.size()) - 1; k >= 0; --k) {
      const auto& op = ops[k];
      for (auto it = op.noise.rbegin(); it != op.noise.rend(); ++it) {
        const int tgt[1] = {it->qubit};
        if (!it->relaxation.is_identity())
          detail::apply_channel_obs(obs, sim_wires_, it->relaxation, tgt);
        if (!it->depolarizing.is_identity())
          detail::apply_channel_obs(obs, sim_wires_, it->depolarizing, tgt);
      }
      if (op_slot_[k] >= 0) stored.emplace(k, obs);
      const Gate& g = op.gate;
      if (g.arity() == 1)
        detail::conjugate_1q_obs(obs, sim_wires_, g.targets[0],
                                 g.matrix_1q(slots));
      else
        detail::conjugate_2q_obs(obs, sim_wires_, g.targets[0], g.targets[1],
                                 gate_matrix_2q(g.kind));
    }

    // Forward sweep: at each parameterized gate, evaluate both shifts by a
    // local conjugation of the current state against the cached observable.
    detail::DensityCursor cursor = detail::DensityCursor::zero(sim_wires_);
    Eigen::MatrixXcd shifted(dim, dim);
    for (int k = 0; k < static_cast<int>(ops.size()); ++k) {
      const auto& op = ops[k];
      const int slot = op_slot_[k];
      if (slot >= 0) {
        const Eigen::MatrixXcd& suffix = stored.at(k);
        const Gate& g = op.gate;
        const double angle = resolve(g.params[0], slots);
        const bool weight = slot < n_weight_slots_;
        const double delta = weight ? kPi / 2 : kFdStep;
        double vals[2];
        for (int sgn = 0; sgn < 2; ++sgn) {
          shifted = cursor.matrix();
          std::array<double, 1> a{angle + (sgn == 0 ? delta : -delta)};
          detail::conjugate_1q_rho(
              shifted, sim_wires_, g.targets[0],
              gate_matrix_1q(g.kind, a));
          vals[sgn] =
              suffix.transpose().cwiseProduct(shifted).sum().real();
        }
        if (weight)
          dm_dtheta[slot] = (vals[0] - vals[1]) / 2.0;
        else
          dm_dz[slot - n_weight_slots_] =
              (vals[0] - vals[1]) / (2.0 * kFdStep);
      }
      cursor.apply(op, slots);
    }
    m = z_expectation_of(cursor.matrix());
    (void)z;
  }

  ModelConfig cfg_;
  ExecutionConfig exec_;
  Circuit abstract_;
  std::optional<Circuit> compiled_;
  const Circuit* run_circuit_ = nullptr;
  std::optional<Layout> final_layout_;
  std::optional<Eigen::Matrix2d> readout_;
  int n_weight_slots_ = 0;
  int n_encoding_slots_ = 0;
  int sim_wires_ = 0;
  int measured_wire_ = 0;
  bool use_density_ = false;
  bool fast_grad_ok_ = false;
  std::vector<int> slot_op_;  // slot -> op index
  std::vector<int> op_slot_;  // op index -> slot (or -1)
};

/// Model output in (0, 1): sigma(2 P(1) - 1) of the measured qubit.
inline double forward(const HybridModel& model, std::span<const double> x,
                      const ExecutionConfig& cfg) {
  return ModelEngine(model.config, cfg).forward(model, x);
}

/// Hard class decision; ties at 0.5 round up to class 1.
inline int predict(const HybridModel& model, std::span<const double> x,
                   const ExecutionConfig& cfg) {
  return forward(model, x, cfg) >= 0.5 ? 1 : 0;
}

inline BatchGradient gradient(const HybridModel& model,
                              const Eigen::MatrixXd& X,
                              std::span<const double> labels,
                              const ExecutionConfig& cfg) {
  return ModelEngine(model.config, cfg).gradient(model, X, labels);
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline std::uint64_t weights_checksum(const HybridModel& m) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto feed = [&h](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  for (long r = 0; r < m.linear_w.rows(); ++r)
    for (long c = 0; c < m.linear_w.cols(); ++c) feed(m.linear_w(r, c));
  for (long i = 0; i < m.linear_b.size(); ++i) feed(m.linear_b(i));
  for (long i = 0; i < m.quantum_weights.size(); ++i)
    feed(m.quantum_weights(i));
  return h;
}

inline std::string checksum_string(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

inline nlohmann::ordered_json model_to_json(const HybridModel& m) {
  validate_model(m);
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["config"] = {{"n_qubits", m.config.n_qubits},
                 {"in_dim", m.config.in_dim},
                 {"encoding", encoding_name(m.config.encoding)},
                 {"ansatz", ansatz_name(m.config.ansatz)},
                 {"ansatz_layers", m.config.ansatz_layers},
                 {"measured_qubit", m.config.measured_qubit}};
  nlohmann::ordered_json w = nlohmann::ordered_json::array();
  for (long r = 0; r < m.linear_w.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (long c = 0; c < m.linear_w.cols(); ++c) row.push_back(m.linear_w(r, c));
    w.push_back(std::move(row));
  }
  j["linear_w"] = std::move(w);
  j["linear_b"] = std::vector<double>(m.linear_b.data(),
                                      m.linear_b.data() + m.linear_b.size());
  j["quantum_weights"] =
      std::vector<double>(m.quantum_weights.data(),
                          m.quantum_weights.data() + m.quantum_weights.size());
  j["checksum"] = checksum_string(weights_checksum(m));
  return j;
}

inline void save_model(const HybridModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write model file: " + path.string());
  out << model_to_json(m).dump(2) << "\n";
}

/**
 * Loads and verifies a model file. A file without quantum weights, with the
 * wrong weight count, or with a stale checksum is rejected outright; weights
 * are never silently re-initialized.
 */
inline HybridModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file is not valid JSON: " + std::string(e.what()));
  }
  HybridModel m;
  try {
    if (j.at("schema_version").get<int>() != 1)
      throw DataError("unsupported model schema version");
    const auto& cj = j.at("config");
    m.config.n_qubits = cj.at("n_qubits").get<int>();
    m.config.in_dim = cj.at("in_dim").get<int>();
    const auto enc = encoding_from_name(cj.at("encoding").get<std::string>());
    const auto ans = ansatz_from_name(cj.at("ansatz").get<std::string>());
    if (!enc || !ans) throw DataError("model config names an unknown layer");
    m.config.encoding = *enc;
    m.config.ansatz = *ans;
    m.config.ansatz_layers = cj.at("ansatz_layers").get<int>();
    m.config.measured_qubit = cj.at("measured_qubit").get<int>();

    const auto& wj = j.at("linear_w");
    const int out = model_out_dim(m.config);
    if (static_cast<int>(wj.size()) != out)
      throw DataError("linear_w row count does not match the configuration");
    m.linear_w.resize(out, m.config.in_dim);
    for (int r = 0; r < out; ++r) {
      if (static_cast<int>(wj.at(r).size()) != m.config.in_dim)
        throw DataError("linear_w column count does not match in_dim");
      for (int c = 0; c < m.config.in_dim; ++c)
        m.linear_w(r, c) = wj.at(r).at(c).get<double>();
    }
    const auto bj = j.at("linear_b").get<std::vector<double>>();
    if (static_cast<int>(bj.size()) != out)
      throw DataError("linear_b length does not match the configuration");
    m.linear_b = Eigen::Map<const Eigen::VectorXd>(bj.data(), bj.size());

    if (!j.contains("quantum_weights"))
      throw DataError(
          "model file has no quantum weights; refusing to load a model whose "
          "quantum layer would be re-initialized");
    const auto qj = j.at("quantum_weights").get<std::vector<double>>();
    if (static_cast<long>(qj.size()) != m.n_quantum_params())
      throw DataError("quantum weight count does not match the ansatz; "
                      "refusing to re-initialize");
    m.quantum_weights = Eigen::Map<const Eigen::VectorXd>(qj.data(), qj.size());

    const auto checksum = j.at("checksum").get<std::string>();
    if (checksum != checksum_string(weights_checksum(m)))
      throw DataError("model checksum mismatch; weights are corrupt or stale");
  } catch (const nlohmann::json::exception& e) {
    throw DataError("model file schema violation: " + std::string(e.what()));
  }
  validate_model(m);
  return m;
}

}  // namespace qmlsim
