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

#include <complex>
#include <span>
#include <vector>

#include "qmlsim/circuit.hpp"
#include "qmlsim/errors.hpp"

namespace qmlsim {

enum class EncodingKind { AngleX, AngleY, Amplitude };
enum class AnsatzKind { SimplifiedTwoDesign, StronglyEntangling, Bellman };

inline const char* encoding_name(EncodingKind k) {
  switch (k) {
    case EncodingKind::AngleX: return "angle-x";
    case EncodingKind::AngleY: return "angle-y";
    case EncodingKind::Amplitude: return "amplitude";
  }
  return "?";
}

inline const char* ansatz_name(AnsatzKind k) {
  switch (k) {
    case AnsatzKind::SimplifiedTwoDesign: return "simplified-two-design";
    case AnsatzKind::StronglyEntangling: return "strongly-entangling";
    case AnsatzKind::Bellman: return "bellman";
  }
  return "?";
}

inline std::optional<EncodingKind> encoding_from_name(const std::string& s) {
  if (s == "angle-x" || s == "anglex") return EncodingKind::AngleX;
  if (s == "angle-y" || s == "angley") return EncodingKind::AngleY;
  if (s == "amplitude") return EncodingKind::Amplitude;
  return std::nullopt;
}

inline std::optional<AnsatzKind> ansatz_from_name(const std::string& s) {
  if (s == "simplified-two-design" || s == "std")
    return AnsatzKind::SimplifiedTwoDesign;
  if (s == "strongly-entangling" || s == "sel")
    return AnsatzKind::StronglyEntangling;
  if (s == "bellman") return AnsatzKind::Bellman;
  return std::nullopt;
}

/// Exact trainable-parameter count of an ansatz.
inline long param_count(AnsatzKind kind, int n_qubits, int n_layers) {
  if (n_qubits < 1) throw Error("ansatz needs at least one qubit");
  if (n_layers < 1) throw Error("ansatz needs at least one layer");
  switch (kind) {
    case AnsatzKind::SimplifiedTwoDesign:
      return n_qubits + static_cast<long>(n_layers) * 2 * (n_qubits - 1);
    case AnsatzKind::StronglyEntangling:
      return static_cast<long>(n_layers) * n_qubits * 3;
    case AnsatzKind::Bellman:
      return static_cast<long>(n_layers) * n_qubits;
  }
  throw Error("unknown ansatz kind");
}

// ---------------------------------------------------------------------------
// Encoding layers
// ---------------------------------------------------------------------------

/// Template form: one RX/RY per qubit whose angle is slot (first_slot + i).
inline Circuit angle_encoding_template(int n_qubits, EncodingKind axis,
                                       int first_slot = 0) {
  if (axis != EncodingKind::AngleX && axis != EncodingKind::AngleY)
    throw Error("angle encoding axis must be X or Y");
  Circuit c(n_qubits);
  const GateKind g =
      axis == EncodingKind::AngleX ? GateKind::RX : GateKind::RY;
  for (int q = 0; q < n_qubits; ++q)
    c.add(g, q, Param(0.0, first_slot + q));
  return c;
}

/// One rotation per qubit: RX(f_i) or RY(f_i).
inline Circuit angle_encoding(std::span<const double> features,
                              EncodingKind axis) {
  const int n = static_cast<int>(features.size());
  if (n < 1) throw Error("angle encoding needs at least one feature");
  return bind_slots(angle_encoding_template(n, axis), features);
}

namespace detail {

/// Multiplexed-rotation recursion shared by the template emitter and the
/// angle pipeline, so gate order and angle order match by construction.
/// Rotation angles are indexed by the control bits, controls[0] being the
/// most significant; each recursion level splits across the last control.
inline void mux_angles(std::vector<double> t, std::vector<double>& out) {
  if (t.size() == 1) {
    out.push_back(t[0]);
    return;
  }
  const std::size_t half = t.size() / 2;
  std::vector<double> u(half), v(half);
  for (std::size_t m = 0; m < half; ++m) {
    u[m] = (t[2 * m] + t[2 * m + 1]) / 2.0;
    v[m] = (t[2 * m] - t[2 * m + 1]) / 2.0;
  }
  mux_angles(std::move(u), out);
  mux_angles(std::move(v), out);
}

inline void mux_template(Circuit& c, GateKind rot, int target,
                         std::span<const int> controls, int& slot) {
  if (controls.empty()) {
    c.add(rot, target, Param(0.0, slot++));
    return;
  }
  const int last = controls.back();
  const auto rest = controls.first(controls.size() - 1);
  mux_template(c, rot, target, rest, slot);
  c.add2(GateKind::CNOT, last, target);
  mux_template(c, rot, target, rest, slot);
  c.add2(GateKind::CNOT, last, target);
}

}  // namespace detail

/**
 * State-preparation template: a cascade of multiplexed RY rotations sets the
 * amplitude magnitudes qubit by qubit, then a cascade of multiplexed RZ
 * rotations sets the relative phases. The angle slots are
 * [first_slot, first_slot + 2*(2^n - 1)), in emission order.
 */
inline Circuit amplitude_embedding_template(int n_qubits, int first_slot = 0) {
  Circuit c(n_qubits);
  int slot = first_slot;
  std::vector<int> controls;
  for (int k = 0; k < n_qubits; ++k) {
    controls.resize(k);
    for (int i = 0; i < k; ++i) controls[i] = i;
    detail::mux_template(c, GateKind::RY, k, controls, slot);
  }
  for (int k = n_qubits - 1; k >= 0; --k) {
    controls.resize(k);
    for (int i = 0; i < k; ++i) controls[i] = i;
    detail::mux_template(c, GateKind::RZ, k, controls, slot);
  }
  return c;
}

inline long amplitude_embedding_slot_count(int n_qubits) {
  return 2 * ((1L << n_qubits) - 1);
}

/**
 * Computes the rotation angles that make the embedding template prepare the
 * given vector (L2-normalized, zero-padded at the tail) up to global phase.
 */
inline std::vector<double> amplitude_embedding_angles(
    std::span<const std::complex<double>> vec, int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (vec.empty() || vec.size() > dim)
    throw Error("amplitude input length must be in [1, 2^n]");
  double norm2 = 0;
  for (const auto& a : vec) norm2 += std::norm(a);
  if (norm2 < 1e-24)
    throw Error("amplitude input norm below 1e-12; cannot normalize");
  const double inv_norm = 1.0 / std::sqrt(norm2);

  std::vector<double> r2(dim, 0.0), omega(dim, 0.0);
  for (std::size_t i = 0; i < vec.size(); ++i) {
    r2[i] = std::norm(vec[i]) * inv_norm * inv_norm;
    omega[i] = std::abs(vec[i]) > 0 ? std::arg(vec[i]) : 0.0;
  }

  std::vector<double> out;
  out.reserve(amplitude_embedding_slot_count(n_qubits));

  // Magnitude stage: beta_j at level k splits block j between its halves.
  for (int k = 0; k < n_qubits; ++k) {
    const std::size_t n_blocks = std::size_t{1} << k;
    const std::size_t block = dim >> k;
    std::vector<double> beta(n_blocks);
    for (std::size_t j = 0; j < n_blocks; ++j) {
      double left = 0, right = 0;
      for (std::size_t i = 0; i < block / 2; ++i) {
        left += r2[j * block + i];
        right += r2[j * block + block / 2 + i];
      }
      beta[j] = 2.0 * std::atan2(std::sqrt(std::max(right, 0.0)),
                                 std::sqrt(std::max(left, 0.0)));
    }
    detail::mux_angles(std::move(beta), out);
  }

  // Phase stage: peel relative phases off pair by pair, from the least
  // significant qubit upward; the residual mean phase is the global phase.
  std::vector<double> w = omega;
  for (int k = n_qubits - 1; k >= 0; --k) {
    const std::size_t half = std::size_t{1} << k;
    std::vector<double> theta(half), next(half);
    for (std::size_t j = 0; j < half; ++j) {
      theta[j] = w[2 * j + 1] - w[2 * j];
      next[j] = (w[2 * j] + w[2 * j + 1]) / 2.0;
    }
    detail::mux_angles(std::move(theta), out);
    w = std::move(next);
  }
  return out;
}

/// Circuit preparing the given amplitudes from |0...0>, up to global phase.
inline Circuit amplitude_embedding(std::span<const std::complex<double>> vec,
                                   int n_qubits) {
  const auto angles = amplitude_embedding_angles(vec, n_qubits);
  return bind_slots(amplitude_embedding_template(n_qubits), angles);
}

inline Circuit amplitude_embedding(std::span<const double> vec, int n_qubits) {
  std::vector<std::complex<double>> cvec(vec.begin(), vec.end());
  return amplitude_embedding(std::span<const std::complex<double>>(cvec),
                             n_qubits);
}

// ---------------------------------------------------------------------------
// Trainable layers
// ---------------------------------------------------------------------------

/// Weight slots are [first_slot, first_slot + param_count(kind, n, layers)).
inline Circuit ansatz_template(AnsatzKind kind, int n_qubits, int n_layers,
                               int first_slot = 0) {
  if (n_layers < 1) throw Error("ansatz needs at least one layer");
  Circuit c(n_qubits);
  int slot = first_slot;
  switch (kind) {
    case AnsatzKind::SimplifiedTwoDesign: {
      // Initial RY on every qubit, then per layer: CZ on even-adjacent pairs,
      // RY on qubits 0..n-2, CZ on odd-adjacent pairs, RY on qubits 1..n-1.
      for (int q = 0; q < n_qubits; ++q)
        c.add(GateKind::RY, q, Param(0.0, slot++));
      for (int l = 0; l < n_layers; ++l) {
        for (int q = 0; q + 1 < n_qubits; q += 2) c.add2(GateKind::CZ, q, q + 1);
        for (int q = 0; q + 1 < n_qubits; ++q)
          c.add(GateKind::RY, q, Param(0.0, slot++));
        for (int q = 1; q + 1 < n_qubits; q += 2) c.add2(GateKind::CZ, q, q + 1);
        for (int q = 1; q < n_qubits; ++q)
          c.add(GateKind::RY, q, Param(0.0, slot++));
      }
      break;
    }
    case AnsatzKind::StronglyEntangling: {
      // Per layer: a general rotation on every qubit, then the CZ chain.
      for (int l = 0; l < n_layers; ++l) {
        for (int q = 0; q < n_qubits; ++q) {
          c.add(GateKind::Rot, q, Param(0.0, slot), Param(0.0, slot + 1),
                Param(0.0, slot + 2));
          slot += 3;
        }
        for (int q = 0; q + 1 < n_qubits; ++q) c.add2(GateKind::CZ, q, q + 1);
      }
      break;
    }
    case AnsatzKind::Bellman: {
      // Per layer: H on qubit 0, a CNOT cascade down the register, RY on
      // every qubit, then the cascade undone in reverse order.
      for (int l = 0; l < n_layers; ++l) {
        c.add(GateKind::H, 0);
        for (int q = 0; q + 1 < n_qubits; ++q) c.add2(GateKind::CNOT, q, q + 1);
        for (int q = 0; q < n_qubits; ++q)
          c.add(GateKind::RY, q, Param(0.0, slot++));
        for (int q = n_qubits - 2; q >= 0; --q) c.add2(GateKind::CNOT, q, q + 1);
      }
      break;
    }
  }
  return c;
}

inline Circuit simplified_two_design(int n_qubits,
                                     std::span<const double> init_weights,
                                     std::span<const double> layer_weights) {
  if (static_cast<int>(init_weights.size()) != n_qubits)
    throw Error("initial-layer weights must have one entry per qubit");
  const long per_layer = 2L * (n_qubits - 1);
  if (per_layer == 0 ? !layer_weights.empty()
                     : layer_weights.size() % per_layer != 0)
    throw Error("layer weights must be a multiple of 2*(n-1)");
  const int layers =
      per_layer == 0 ? 1 : static_cast<int>(layer_weights.size() / per_layer);
  std::vector<double> w(init_weights.begin(), init_weights.end());
  w.insert(w.end(), layer_weights.begin(), layer_weights.end());
  return bind_slots(ansatz_template(AnsatzKind::SimplifiedTwoDesign, n_qubits,
                              std::max(layers, 1)),
              w);
}

inline Circuit strongly_entangling(int n_qubits, int n_layers,
                                   std::span<const double> weights) {
  if (static_cast<long>(weights.size()) !=
      param_count(AnsatzKind::StronglyEntangling, n_qubits, n_layers))
    throw Error("strongly-entangling weights have the wrong shape");
  return bind_slots(ansatz_template(AnsatzKind::StronglyEntangling, n_qubits,
                              n_layers),
              weights);
}

inline Circuit bellman_layer(int n_qubits, int n_layers,
                             std::span<const double> weights) {
  if (static_cast<long>(weights.size()) !=
      param_count(AnsatzKind::Bellman, n_qubits, n_layers))
    throw Error("bellman weights have the wrong shape");
  return bind_slots(ansatz_template(AnsatzKind::Bellman, n_qubits, n_layers),
              weights);
}

}  // namespace qmlsim
