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
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmlsim/channels.hpp"
#include "qmlsim/errors.hpp"
#include "qmlsim/gates.hpp"
#include "qmlsim/state.hpp"

namespace qmlsim {

/**
 * A gate angle. When `slot` is non-negative the effective angle is
 * value + slots[slot], so a circuit acts as a reusable template whose
 * trainable or data-dependent angles are bound at execution time. Every
 * angle produced by this library references at most one slot, and each
 * slot appears in exactly one gate of a generated circuit.
 */
struct Param {
  double value = 0.0;
  std::int32_t slot = -1;

  Param() = default;
  Param(double v) : value(v) {}  // NOLINT: intentional implicit conversion
  Param(double v, std::int32_t s) : value(v), slot(s) {}

  bool bound() const { return slot < 0; }
};

inline double resolve(const Param& p, std::span<const double> slots) {
  if (p.slot < 0) return p.value;
  if (p.slot >= static_cast<std::int32_t>(slots.size()))
    throw Error("unbound parameter slot " + std::to_string(p.slot));
  return p.value + slots[p.slot];
}

struct Gate {
  GateKind kind = GateKind::H;
  std::array<int, 2> targets{-1, -1};
  std::array<Param, 3> params{};

  int arity() const { return gate_arity(kind); }
  int n_params() const { return gate_param_count(kind); }

  Eigen::Matrix2cd matrix_1q(std::span<const double> slots = {}) const {
    std::array<double, 3> vals{};
    for (int i = 0; i < n_params(); ++i) vals[i] = resolve(params[i], slots);
    return gate_matrix_1q(kind, {vals.data(), static_cast<size_t>(n_params())});
  }
};

/// Per-gate noise attached by the transpiler: one entry per acted qubit,
/// holding the depolarizing and thermal-relaxation channels for that qubit.
struct NoiseAttachment {
  int qubit = 0;
  KrausChannel depolarizing;
  KrausChannel relaxation;
};

struct CircuitOp {
  Gate gate;
  std::vector<NoiseAttachment> noise;
};

/**
 * An ordered list of gates over a fixed register, with optional per-gate
 * noise attachments and per-qubit readout-confusion tags.
 */
class Circuit {
 public:
  explicit Circuit(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1) throw Error("circuit needs at least one qubit");
  }

  int n_qubits() const { return n_qubits_; }
  int n_slots() const { return n_slots_; }
  const std::vector<CircuitOp>& ops() const { return ops_; }
  std::vector<CircuitOp>& mutable_ops() { return ops_; }
  bool empty() const { return ops_.empty(); }

  const std::map<int, Eigen::Matrix2d>& readout() const { return readout_; }
  void tag_readout(int qubit, const Eigen::Matrix2d& confusion) {
    check_confusion(confusion);
    if (qubit < 0 || qubit >= n_qubits_) throw Error("readout qubit range");
    readout_[qubit] = confusion;
  }

  bool has_noise() const {
    return std::any_of(ops_.begin(), ops_.end(),
                       [](const CircuitOp& op) { return !op.noise.empty(); });
  }

  void add(const Gate& g) {
    const std::array<int, 2>& t = g.targets;
    check_targets(n_qubits_, {t.data(), static_cast<size_t>(g.arity())},
                  g.arity());
    for (int i = 0; i < g.n_params(); ++i)
      if (g.params[i].slot >= 0)
        n_slots_ = std::max(n_slots_, g.params[i].slot + 1);
    ops_.push_back(CircuitOp{g, {}});
  }

  void add(GateKind kind, int q) {
    Gate g;
    g.kind = kind;
    g.targets = {q, -1};
    add(g);
  }

  void add(GateKind kind, int q, Param p) {
    Gate g;
    g.kind = kind;
    g.targets = {q, -1};
    g.params[0] = p;
    add(g);
  }

  void add(GateKind kind, int q, Param a, Param b, Param c) {
    Gate g;
    g.kind = kind;
    g.targets = {q, -1};
    g.params = {a, b, c};
    add(g);
  }

  void add2(GateKind kind, int qa, int qb) {
    Gate g;
    g.kind = kind;
    g.targets = {qa, qb};
    add(g);
  }

  /// Appends another circuit over the same register, gates and tags alike.
  void append(const Circuit& other) {
    if (other.n_qubits_ != n_qubits_)
      throw Error("appending circuits of different widths");
    for (const auto& op : other.ops_) ops_.push_back(op);
    for (const auto& [q, m] : other.readout_) readout_[q] = m;
    n_slots_ = std::max(n_slots_, other.n_slots_);
  }

 private:
  int n_qubits_;
  int n_slots_ = 0;
  std::vector<CircuitOp> ops_;
  std::map<int, Eigen::Matrix2d> readout_;
};

/// Resolves every slot reference against `slots`, returning a bound circuit.
inline Circuit bind_slots(const Circuit& c, std::span<const double> slots) {
  Circuit out(c.n_qubits());
  for (const auto& op : c.ops()) {
    Gate g = op.gate;
    for (int i = 0; i < g.n_params(); ++i)
      g.params[i] = Param(resolve(g.params[i], slots));
    out.add(g);
    out.mutable_ops().back().noise = op.noise;
  }
  for (const auto& [q, m] : c.readout()) out.tag_readout(q, m);
  return out;
}

/// Pure statevector execution from |0...0>. Rejects circuits with noise.
inline Eigen::VectorXcd run_statevector(const Circuit& c,
                                        std::span<const double> slots = {}) {
  if (c.has_noise())
    throw Error("circuit carries noise attachments; use run_density");
  Eigen::VectorXcd psi =
      Eigen::VectorXcd::Zero(std::int64_t{1} << c.n_qubits());
  psi(0) = 1.0;
  for (const auto& op : c.ops()) {
    const Gate& g = op.gate;
    if (g.arity() == 1)
      detail::apply_1q_vec(psi.data(), c.n_qubits(), g.targets[0],
                           g.matrix_1q(slots));
    else
      detail::apply_2q_vec(psi.data(), c.n_qubits(), g.targets[0],
                           g.targets[1], gate_matrix_2q(g.kind));
  }
  return psi;
}

namespace detail {

/**
 * Streaming density-matrix executor. Consecutive noiseless single-qubit
 * gates on a wire are fused into one pending 2x2 unitary before touching
 * the full matrix, which removes the per-gate cost of the frame-change rz
 * gates that dominate transpiled circuits.
 */
class DensityCursor {
 public:
  DensityCursor(int n_qubits, Eigen::MatrixXcd rho)
      : n_(n_qubits),
        rho_(std::move(rho)),
        pending_(n_qubits, Eigen::Matrix2cd::Identity()),
        dirty_(n_qubits, false) {}

  static DensityCursor zero(int n_qubits) {
    const auto dim = std::int64_t{1} << n_qubits;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(0, 0) = 1.0;
    return DensityCursor(n_qubits, std::move(rho));
  }

  void apply(const CircuitOp& op, std::span<const double> slots) {
    const Gate& g = op.gate;
    if (g.arity() == 1) {
      pending_[g.targets[0]] = g.matrix_1q(slots) * pending_[g.targets[0]];
      dirty_[g.targets[0]] = true;
      if (!op.noise.empty()) {
        flush(g.targets[0]);
        apply_noise(op.noise);
      }
    } else {
      flush(g.targets[0]);
      flush(g.targets[1]);
      conjugate_2q_rho(rho_, n_, g.targets[0], g.targets[1],
                       gate_matrix_2q(g.kind));
      apply_noise(op.noise);
    }
  }

  void apply_noise(const std::vector<NoiseAttachment>& noise) {
    for (const auto& att : noise) {
      flush(att.qubit);
      const int tgt[1] = {att.qubit};
      if (!att.depolarizing.is_identity())
        apply_channel_rho(rho_, n_, att.depolarizing, tgt);
      if (!att.relaxation.is_identity())
        apply_channel_rho(rho_, n_, att.relaxation, tgt);
    }
  }

  void flush(int q) {
    if (!dirty_[q]) return;
    conjugate_1q_rho(rho_, n_, q, pending_[q]);
    pending_[q] = Eigen::Matrix2cd::Identity();
    dirty_[q] = false;
  }

  void flush_all() {
    for (int q = 0; q < n_; ++q) flush(q);
  }

  Eigen::MatrixXcd take() {
    flush_all();
    return std::move(rho_);
  }

  const Eigen::MatrixXcd& matrix() {
    flush_all();
    return rho_;
  }

 private:
  int n_;
  Eigen::MatrixXcd rho_;
  std::vector<Eigen::Matrix2cd> pending_;
  std::vector<bool> dirty_;
};

}  // namespace detail

/// Density-matrix execution from |0...0><0...0|, honoring noise attachments.
inline Eigen::MatrixXcd run_density(const Circuit& c,
                                    std::span<const double> slots = {}) {
  auto cursor = detail::DensityCursor::zero(c.n_qubits());
  for (const auto& op : c.ops()) cursor.apply(op, slots);
  return cursor.take();
}

/// Runs a circuit on an arbitrary initial state, promoting to the mixed
/// representation when noise is present.
inline QubitState run_circuit(const Circuit& c, const QubitState& init,
                              std::span<const double> slots = {}) {
  if (init.n_qubits() != c.n_qubits())
    throw Error("initial state width does not match circuit");
  if (init.is_pure() && !c.has_noise()) {
    Eigen::VectorXcd psi = init.amplitudes();
    for (const auto& op : c.ops()) {
      const Gate& g = op.gate;
      if (g.arity() == 1)
        detail::apply_1q_vec(psi.data(), c.n_qubits(), g.targets[0],
                             g.matrix_1q(slots));
      else
        detail::apply_2q_vec(psi.data(), c.n_qubits(), g.targets[0],
                             g.targets[1], gate_matrix_2q(g.kind));
    }
    return QubitState::from_amplitudes(std::move(psi));
  }
  detail::DensityCursor cursor(c.n_qubits(), init.to_mixed().density());
  for (const auto& op : c.ops()) cursor.apply(op, slots);
  return QubitState::from_density(cursor.take());
}

/// Composes the full circuit unitary (noise-free circuits, n <= 10).
inline Eigen::MatrixXcd circuit_unitary(const Circuit& c,
                                        std::span<const double> slots = {}) {
  if (c.has_noise()) throw Error("noisy circuits have no unitary");
  if (c.n_qubits() > 10) throw Error("unitary composition capped at 10 qubits");
  const auto dim = std::int64_t{1} << c.n_qubits();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& op : c.ops()) {
    const Gate& g = op.gate;
    for (std::int64_t col = 0; col < dim; ++col) {
      if (g.arity() == 1)
        detail::apply_1q_vec(u.data() + col * dim, c.n_qubits(), g.targets[0],
                             g.matrix_1q(slots));
      else
        detail::apply_2q_vec(u.data() + col * dim, c.n_qubits(), g.targets[0],
                             g.targets[1], gate_matrix_2q(g.kind));
    }
  }
  return u;
}

/// Gate totals and dependency depth, in the shape of a transpiler report.
struct CircuitMetadata {
  int n_qubits = 0;  // wires acted on by at least one gate
  int depth = 0;     // longest gate-dependency chain
  std::map<std::string, long long> gate_counts;
  long long total_gates = 0;
};

inline CircuitMetadata circuit_metadata(const Circuit& c) {
  CircuitMetadata meta;
  std::vector<int> frontier(c.n_qubits(), 0);
  std::vector<bool> used(c.n_qubits(), false);
  for (const auto& op : c.ops()) {
    const Gate& g = op.gate;
    ++meta.gate_counts[gate_name(g.kind)];
    ++meta.total_gates;
    int level = 0;
    for (int i = 0; i < g.arity(); ++i) {
      used[g.targets[i]] = true;
      level = std::max(level, frontier[g.targets[i]]);
    }
    for (int i = 0; i < g.arity(); ++i) frontier[g.targets[i]] = level + 1;
    meta.depth = std::max(meta.depth, level + 1);
  }
  meta.n_qubits = static_cast<int>(std::count(used.begin(), used.end(), true));
  return meta;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/**
 * Text export: a `qubits N` header then one gate per line in the form
 * `NAME q0[,q1] [param,...]`. Slot references must be bound first.
 */
inline std::string to_text(const Circuit& c,
                           std::span<const double> slots = {}) {
  std::ostringstream out;
  out << "qubits " << c.n_qubits() << "\n";
  for (const auto& op : c.ops()) {
    const Gate& g = op.gate;
    std::string name = gate_name(g.kind);
    for (auto& ch : name) ch = static_cast<char>(std::toupper(ch));
    out << name << ' ' << g.targets[0];
    if (g.arity() == 2) out << ',' << g.targets[1];
    for (int i = 0; i < g.n_params(); ++i)
      out << (i == 0 ? " " : ",") << format_double(resolve(g.params[i], slots));
    out << "\n";
  }
  return out.str();
}

inline Circuit from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::optional<Circuit> circuit;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "qubits") {
      int n = 0;
      if (!(ls >> n))
        throw DataError("circuit text line " + std::to_string(line_no) +
                        ": bad qubit count");
      circuit.emplace(n);
      continue;
    }
    if (!circuit)
      throw DataError("circuit text must start with a `qubits N` header");
    const auto kind = gate_from_name(head);
    if (!kind)
      throw DataError("circuit text line " + std::to_string(line_no) +
                      ": unknown gate `" + head + "`");
    std::string targets_tok, params_tok;
    ls >> targets_tok;
    ls >> params_tok;
    Gate g;
    g.kind = *kind;
    const auto parse_ints = [&](const std::string& tok) {
      std::vector<int> vals;
      std::size_t pos = 0;
      while (pos <= tok.size() && !tok.empty()) {
        const auto comma = tok.find(',', pos);
        const std::string piece =
            tok.substr(pos, comma == std::string::npos ? tok.size() - pos
                                                       : comma - pos);
        vals.push_back(std::stoi(piece));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      return vals;
    };
    const auto targets = parse_ints(targets_tok);
    if (static_cast<int>(targets.size()) != g.arity())
      throw DataError("circuit text line " + std::to_string(line_no) +
                      ": expected " + std::to_string(g.arity()) + " targets");
    g.targets = {targets[0], targets.size() > 1 ? targets[1] : -1};
    if (g.n_params() > 0) {
      std::size_t pos = 0;
      int count = 0;
      while (count < g.n_params()) {
        const auto comma = params_tok.find(',', pos);
        const std::string piece = params_tok.substr(
            pos,
            comma == std::string::npos ? params_tok.size() - pos : comma - pos);
        if (piece.empty())
          throw DataError("circuit text line " + std::to_string(line_no) +
                          ": expected " + std::to_string(g.n_params()) +
                          " parameters");
        g.params[count++] = Param(std::stod(piece));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (count != g.n_params())
        throw DataError("circuit text line " + std::to_string(line_no) +
                        ": expected " + std::to_string(g.n_params()) +
                        " parameters");
    }
    circuit->add(g);
  }
  if (!circuit) throw DataError("empty circuit text");
  return *circuit;
}

/// Minimal OpenQASM-3 emission for interchange; native-gate circuits only.
inline std::string to_qasm3(const Circuit& c,
                            std::span<const double> slots = {}) {
  std::ostringstream out;
  out << "OPENQASM 3.0;\n";
  out << "qubit[" << c.n_qubits() << "] q;\n";
  for (const auto& op : c.ops()) {
    const Gate& g = op.gate;
    std::string name = gate_name(g.kind);
    if (name == "cnot") name = "cx";
    out << name;
    if (g.n_params() > 0) {
      out << '(';
      for (int i = 0; i < g.n_params(); ++i)
        out << (i ? ", " : "") << format_double(resolve(g.params[i], slots));
      out << ')';
    }
    out << " q[" << g.targets[0] << "]";
    if (g.arity() == 2) out << ", q[" << g.targets[1] << "]";
    out << ";\n";
  }
  return out.str();
}

}  // namespace qmlsim
