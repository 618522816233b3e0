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
#include <deque>
#include <optional>
#include <set>
#include <vector>

#include "qmlsim/circuit.hpp"
#include "qmlsim/device.hpp"
#include "qmlsim/errors.hpp"

namespace qmlsim {

/// Injective virtual-to-physical qubit assignment.
struct Layout {
  std::vector<int> v2p;

  static Layout identity(int n) {
    Layout l;
    l.v2p.resize(n);
    for (int i = 0; i < n; ++i) l.v2p[i] = i;
    return l;
  }

  void validate(int n_virtual, int n_physical) const {
    if (static_cast<int>(v2p.size()) != n_virtual)
      throw Error("layout must assign every circuit qubit");
    std::set<int> seen;
    for (const int p : v2p) {
      if (p < 0 || p >= n_physical)
        throw Error("layout maps outside the device qubits");
      if (!seen.insert(p).second) throw Error("layout is not injective");
    }
  }
};

namespace detail {

inline double wrap_angle(double a) { return std::remainder(a, 2.0 * kPi); }

inline bool is_zero_angle(double a) { return std::abs(wrap_angle(a)) < 1e-12; }

struct ZyzAngles {
  double phase, phi, theta, lambda;
};

/// U = e^{i phase} RZ(phi) RY(theta) RZ(lambda).
inline ZyzAngles zyz_decompose(const Eigen::Matrix2cd& u) {
  const cplx det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  const double phase = 0.5 * std::arg(det);
  const Eigen::Matrix2cd su = u * std::exp(cplx(0, -phase));
  const double theta = 2.0 * std::atan2(std::abs(su(1, 0)), std::abs(su(0, 0)));
  double phi, lambda;
  if (std::abs(su(1, 0)) < 1e-12) {
    phi = 2.0 * std::arg(su(1, 1));
    lambda = 0.0;
  } else if (std::abs(su(0, 0)) < 1e-12) {
    phi = 2.0 * std::arg(su(1, 0));
    lambda = 0.0;
  } else {
    phi = std::arg(su(1, 1)) + std::arg(su(1, 0));
    lambda = std::arg(su(1, 1)) - std::arg(su(1, 0));
  }
  return {phase, phi, theta, lambda};
}

/**
 * Emits RZ(phi) RY(theta) RZ(lambda) over {rz, sx}, up to global phase, via
 * the Euler identity RZ(phi+pi) SX RZ(theta+pi) SX RZ(lambda). Degenerate
 * theta values collapse to one rz or to the single-sx form; H for instance
 * comes out as rz(pi/2) sx rz(pi/2).
 */
inline void emit_zxzxz(std::vector<Gate>& out, int q, double phi, double theta,
                       double lambda) {
  const auto rz = [&out, q](double angle) {
    if (is_zero_angle(angle)) return;
    Gate g;
    g.kind = GateKind::RZ;
    g.targets = {q, -1};
    g.params[0] = Param(wrap_angle(angle));
    out.push_back(g);
  };
  const auto sx = [&out, q]() {
    Gate g;
    g.kind = GateKind::SX;
    g.targets = {q, -1};
    out.push_back(g);
  };
  if (std::abs(theta) < 1e-9) {
    rz(phi + lambda);
    return;
  }
  if (std::abs(theta - kPi / 2) < 1e-9) {
    rz(lambda - kPi / 2);
    sx();
    rz(phi + kPi / 2);
    return;
  }
  rz(lambda);
  sx();
  rz(theta + kPi);
  sx();
  rz(phi + kPi);
}

/// Slotted rotations decompose along fixed ZYZ frames so that each trainable
/// angle lands, unscaled, in exactly one rz of the native sequence.
inline void emit_slotted_rotation(std::vector<Gate>& out, const Gate& g) {
  const auto rz = [&out, &g](Param p) {
    if (p.slot < 0 && is_zero_angle(p.value)) return;
    Gate r;
    r.kind = GateKind::RZ;
    r.targets = g.targets;
    r.params[0] = p;
    out.push_back(r);
  };
  const auto sx = [&out, &g]() {
    Gate r;
    r.kind = GateKind::SX;
    r.targets = g.targets;
    out.push_back(r);
  };
  const auto shifted = [](Param p, double delta) {
    return Param(p.value + delta, p.slot);
  };
  switch (g.kind) {
    case GateKind::RY:  // phi = 0, lambda = 0
      rz(Param(0.0));
      sx();
      rz(shifted(g.params[0], kPi));
      sx();
      rz(Param(kPi));
      return;
    case GateKind::RX:  // phi = -pi/2, lambda = pi/2
      rz(Param(kPi / 2));
      sx();
      rz(shifted(g.params[0], kPi));
      sx();
      rz(Param(kPi / 2));
      return;
    case GateKind::Rot:  // phi = c, theta = b, lambda = a
      rz(g.params[0]);
      sx();
      rz(shifted(g.params[1], kPi));
      sx();
      rz(shifted(g.params[2], kPi));
      return;
    default:
      throw Error("no slotted decomposition rule for gate");
  }
}

struct EcrBridge {
  Eigen::Matrix2cd pre_c, pre_t, post_c, post_t;
};

/// Single-qubit dressings turning one ECR into a CNOT (and derived forms).
/// CX = (post_c (x) post_t) . ECR . (pre_c (x) pre_t), up to global phase.
inline const EcrBridge& cx_bridge() {
  static const EcrBridge bridge = [] {
    EcrBridge b;
    b.pre_c = ry_matrix(kPi / 2);
    b.pre_t = gate_matrix_1q(GateKind::X) * ry_matrix(-kPi / 2);
    b.post_c = rz_matrix(kPi / 2) * ry_matrix(-kPi / 2);
    b.post_t = rx_matrix(kPi / 2) * ry_matrix(kPi / 2);
    return b;
  }();
  return bridge;
}

}  // namespace detail

/**
 * Rewrites a circuit over the given native-gate set, preserving its unitary
 * up to global phase. Trainable (slotted) rotation angles survive as slot
 * references on single rz gates. Throws when a gate has no decomposition
 * rule over the requested set.
 */
inline Circuit decompose_to_native(const Circuit& circuit,
                                   const std::set<std::string>& natives) {
  if (circuit.has_noise())
    throw Error("decompose circuits before attaching noise");
  const auto native = [&natives](GateKind k) {
    return natives.count(gate_name(k)) > 0;
  };
  const bool have_rz_sx = native(GateKind::RZ) && native(GateKind::SX);

  Circuit out(circuit.n_qubits());
  std::vector<Gate> buffer;

  // Emits a constant 1q unitary over the natives.
  const auto emit_const_1q = [&](const Eigen::Matrix2cd& u, int q) {
    if (!have_rz_sx)
      throw Error("single-qubit decomposition needs rz and sx natives");
    const auto zyz = detail::zyz_decompose(u);
    buffer.clear();
    detail::emit_zxzxz(buffer, q, zyz.phi, zyz.theta, zyz.lambda);
    for (const auto& g : buffer) out.add(g);
  };

  // Emits (post_c (x) post_t) . MIDDLE . (pre_c (x) pre_t); the middle gate
  // must already be native.
  const auto emit_dressed = [&](int qc, int qt, const Eigen::Matrix2cd& pre_c,
                                const Eigen::Matrix2cd& pre_t,
                                GateKind middle, const Eigen::Matrix2cd& post_c,
                                const Eigen::Matrix2cd& post_t) {
    emit_const_1q(pre_c, qc);
    emit_const_1q(pre_t, qt);
    Gate m;
    m.kind = middle;
    m.targets = {qc, qt};
    out.add(m);
    emit_const_1q(post_c, qc);
    emit_const_1q(post_t, qt);
  };

  std::deque<Gate> work;
  for (const auto& op : circuit.ops()) work.push_back(op.gate);

  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd h = gate_matrix_1q(GateKind::H);
  const auto& br = detail::cx_bridge();

  while (!work.empty()) {
    Gate g = work.front();
    work.pop_front();
    if (native(g.kind)) {
      out.add(g);
      continue;
    }
    const bool slotted = [&g] {
      for (int i = 0; i < g.n_params(); ++i)
        if (g.params[i].slot >= 0) return true;
      return false;
    }();
    if (g.arity() == 1) {
      if (!slotted) {
        emit_const_1q(g.matrix_1q(), g.targets[0]);
        continue;
      }
      if (!have_rz_sx)
        throw Error("single-qubit decomposition needs rz and sx natives");
      buffer.clear();
      detail::emit_slotted_rotation(buffer, g);
      for (const auto& ng : buffer) out.add(ng);
      continue;
    }
    const int qa = g.targets[0], qb = g.targets[1];
    switch (g.kind) {
      case GateKind::CNOT:
        if (native(GateKind::ECR))
          emit_dressed(qa, qb, br.pre_c, br.pre_t, GateKind::ECR, br.post_c,
                       br.post_t);
        else if (native(GateKind::CZ))
          emit_dressed(qa, qb, id, h, GateKind::CZ, id, h);
        else
          throw Error("no decomposition rule for cnot over this native set");
        break;
      case GateKind::CZ:
        if (native(GateKind::ECR))
          emit_dressed(qa, qb, br.pre_c, Eigen::Matrix2cd(br.pre_t * h),
                       GateKind::ECR, br.post_c,
                       Eigen::Matrix2cd(h * br.post_t));
        else if (native(GateKind::CNOT))
          emit_dressed(qa, qb, id, h, GateKind::CNOT, id, h);
        else
          throw Error("no decomposition rule for cz over this native set");
        break;
      case GateKind::SWAP: {
        Gate ab, ba;
        ab.kind = GateKind::CNOT;
        ab.targets = {qa, qb};
        ba.kind = GateKind::CNOT;
        ba.targets = {qb, qa};
        work.push_front(ab);
        work.insert(work.begin() + 1, ba);
        work.insert(work.begin() + 2, ab);
        break;
      }
      case GateKind::ECR:
        // ECR = (post^dag (x) post^dag) . CX . (pre^dag (x) pre^dag), the
        // inverse of the bridge that builds CX from ECR.
        if (native(GateKind::CNOT))
          emit_dressed(qa, qb, Eigen::Matrix2cd(br.pre_c.adjoint()),
                       Eigen::Matrix2cd(br.pre_t.adjoint()), GateKind::CNOT,
                       Eigen::Matrix2cd(br.post_c.adjoint()),
                       Eigen::Matrix2cd(br.post_t.adjoint()));
        else if (native(GateKind::CZ))
          emit_dressed(qa, qb, Eigen::Matrix2cd(br.pre_c.adjoint()),
                       Eigen::Matrix2cd(h * br.pre_t.adjoint()), GateKind::CZ,
                       Eigen::Matrix2cd(br.post_c.adjoint()),
                       Eigen::Matrix2cd(br.post_t.adjoint() * h));
        else
          throw Error("no decomposition rule for ecr over this native set");
        break;
      default:
        throw Error(std::string("no decomposition rule for ") +
                    gate_name(g.kind));
    }
  }
  for (const auto& [q, m] : circuit.readout()) out.tag_readout(q, m);
  return out;
}

struct RouteResult {
  Circuit circuit;       // over the device's physical wires
  Layout initial_layout;
  Layout final_layout;   // tracks the virtual position after inserted SWAPs
  int n_swaps = 0;
};

/**
 * Greedy nearest-swap router. Two-qubit gates on uncoupled pairs trigger
 * SWAPs that walk the first operand along a shortest path toward the second;
 * equal-length path choices are broken by the seeded generator.
 */
inline RouteResult route(const Circuit& circuit, const DeviceSpec& device,
                         std::optional<Layout> initial_layout = std::nullopt,
                         std::uint64_t seed = 0) {
  if (circuit.n_qubits() > device.n_qubits)
    throw Error("circuit is wider than the device");
  if (circuit.has_noise()) throw Error("route circuits before attaching noise");

  Layout layout =
      initial_layout.value_or(Layout::identity(circuit.n_qubits()));
  layout.validate(circuit.n_qubits(), device.n_qubits);

  RouteResult result{Circuit(device.n_qubits), layout, layout, 0};
  std::vector<int> p2v(device.n_qubits, -1);
  for (int v = 0; v < circuit.n_qubits(); ++v) p2v[layout.v2p[v]] = v;

  const auto adj = device.adjacency();
  Rng rng(seed);
  std::vector<int> dist(device.n_qubits);

  auto& cur = result.final_layout.v2p;
  for (const auto& op : circuit.ops()) {
    const Gate& g = op.gate;
    if (g.arity() == 1) {
      Gate r = g;
      r.targets = {cur[g.targets[0]], -1};
      result.circuit.add(r);
      continue;
    }
    int pa = cur[g.targets[0]];
    const int pb = cur[g.targets[1]];
    if (!device.coupled(pa, pb)) {
      // BFS distances toward pb, then walk pa down the gradient.
      std::fill(dist.begin(), dist.end(), -1);
      std::deque<int> queue{pb};
      dist[pb] = 0;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (const int v : adj[u])
          if (dist[v] < 0) {
            dist[v] = dist[u] + 1;
            queue.push_back(v);
          }
      }
      if (dist[pa] < 0) throw Error("device coupling map is disconnected");
      while (dist[pa] > 1) {
        std::vector<int> steps;
        for (const int nb : adj[pa])
          if (dist[nb] == dist[pa] - 1) steps.push_back(nb);
        const int next =
            steps[steps.size() == 1
                      ? 0
                      : rng.uniform_int(0, static_cast<int>(steps.size()) - 1)];
        Gate sw;
        sw.kind = GateKind::SWAP;
        sw.targets = {pa, next};
        result.circuit.add(sw);
        ++result.n_swaps;
        std::swap(p2v[pa], p2v[next]);
        if (p2v[pa] >= 0) cur[p2v[pa]] = pa;
        if (p2v[next] >= 0) cur[p2v[next]] = next;
        pa = next;
      }
    }
    Gate r = g;
    r.targets = {pa, cur[g.targets[1]]};
    result.circuit.add(r);
  }
  for (const auto& [q, m] : circuit.readout())
    result.circuit.tag_readout(cur[q], m);
  return result;
}

/**
 * Attaches the device noise model to a routed, native circuit: after each
 * gate, every acted qubit receives that gate's depolarizing error and a
 * thermal-relaxation channel spanning the gate duration. Measurement wires
 * in the layout image are tagged with their readout confusion.
 */
inline Circuit noise_schedule(const Circuit& circuit, const DeviceSpec& device,
                              const Layout& layout) {
  if (circuit.has_noise()) throw Error("circuit already carries noise");
  if (circuit.n_qubits() > device.n_qubits)
    throw Error("circuit wires exceed device qubits");
  Circuit out = circuit;
  for (auto& op : out.mutable_ops()) {
    const Gate& g = op.gate;
    const std::array<int, 2>& t = g.targets;
    const auto* props = device.find_gate_props(
        gate_name(g.kind), {t.data(), static_cast<size_t>(g.arity())});
    if (!props)
      throw DataError(std::string("missing noise parameters for gate `") +
                      gate_name(g.kind) + "` on qubit " +
                      std::to_string(g.targets[0]));
    for (int i = 0; i < g.arity(); ++i) {
      const int q = g.targets[i];
      const auto& qp = device.qubit_props.at(q);
      NoiseAttachment att;
      att.qubit = q;
      att.depolarizing = depolarizing_channel(props->error, 1);
      att.relaxation = thermal_relaxation_channel(qp.t1_s, qp.t2_s,
                                                  props->duration_s, 0.0);
      op.noise.push_back(std::move(att));
    }
  }
  for (const int p : layout.v2p)
    out.tag_readout(p, device.qubit_props.at(p).readout_confusion);
  return out;
}

inline long long noise_attachment_count(const Circuit& c) {
  long long n = 0;
  for (const auto& op : c.ops()) n += static_cast<long long>(op.noise.size());
  return n;
}

struct TranspileOptions {
  std::optional<Layout> initial_layout;
  std::uint64_t seed = 0;
  bool with_noise = false;
};

struct TranspileResult {
  Circuit circuit;
  Layout initial_layout;
  Layout final_layout;
  int n_swaps = 0;
  CircuitMetadata metadata;
};

/// decompose -> route -> lower inserted SWAPs -> (optionally) attach noise.
inline TranspileResult transpile(const Circuit& circuit,
                                 const DeviceSpec& device,
                                 const TranspileOptions& opts = {}) {
  const Circuit native = decompose_to_native(circuit, device.native_gates);
  RouteResult routed = route(native, device, opts.initial_layout, opts.seed);
  Circuit lowered = routed.n_swaps > 0
                        ? decompose_to_native(routed.circuit,
                                              device.native_gates)
                        : std::move(routed.circuit);
  TranspileResult result{std::move(lowered), routed.initial_layout,
                         routed.final_layout, routed.n_swaps, {}};
  result.metadata = circuit_metadata(result.circuit);
  if (opts.with_noise)
    result.circuit =
        noise_schedule(result.circuit, device, result.final_layout);
  return result;
}

/// Basis permutation sending virtual wire v to physical wire layout.v2p[v];
/// defined for layouts that are bijections (equal register sizes).
inline Eigen::MatrixXcd layout_permutation_matrix(const Layout& layout,
                                                  int n_qubits) {
  if (static_cast<int>(layout.v2p.size()) != n_qubits)
    throw Error("permutation matrix needs a full bijective layout");
  const std::size_t dim = std::size_t{1} << n_qubits;
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t x = 0; x < dim; ++x) {
    std::size_t y = 0;
    for (int v = 0; v < n_qubits; ++v) {
      const std::size_t bit = (x >> (n_qubits - 1 - v)) & 1;
      y |= bit << (n_qubits - 1 - layout.v2p[v]);
    }
    p(y, x) = 1.0;
  }
  return p;
}

}  // namespace qmlsim
