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
#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>
#include <span>
#include <vector>

#include "qmlsim/errors.hpp"
#include "qmlsim/state.hpp"

namespace qmlsim {

/**
 * A completely positive trace-preserving map rho -> sum_i K_i rho K_i^dagger.
 * The Kraus operators are the contract; the tag marks channels for which the
 * simulator has a closed-form application path (exercised against the generic
 * Kraus sum in the tests).
 */
struct KrausChannel {
  enum class Tag { General, Depolarizing, Relaxation };

  int arity = 1;  // 1 or 2 qubits
  std::vector<Eigen::MatrixXcd> ops;
  Tag tag = Tag::General;

  // Fast-path parameters.
  double depol_p = 0.0;
  double relax_e1 = 1.0;  // exp(-duration / t1)
  double relax_e2 = 1.0;  // exp(-duration / t2)
  double relax_pe = 0.0;  // asymptotic |1> population

  bool is_identity() const {
    switch (tag) {
      case Tag::Depolarizing:
        return depol_p < 1e-15;
      case Tag::Relaxation:
        return relax_e1 > 1.0 - 1e-15 && relax_e2 > 1.0 - 1e-15;
      case Tag::General:
        break;
    }
    if (ops.size() != 1) return false;
    const auto dim = ops[0].rows();
    return (ops[0] - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs()
               .maxCoeff() < 1e-15;
  }
};

/// Sum K_i^dagger K_i, for trace-preservation checks.
inline Eigen::MatrixXcd kraus_completeness(const KrausChannel& ch) {
  const auto dim = std::int64_t{1} << ch.arity;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& k : ch.ops) acc += k.adjoint() * k;
  return acc;
}

inline void check_trace_preserving(const KrausChannel& ch) {
  const auto dim = std::int64_t{1} << ch.arity;
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  if ((kraus_completeness(ch) - id).cwiseAbs().maxCoeff() > 1e-10)
    throw Error("channel is not trace preserving");
}

/// Builds a general channel from explicit Kraus operators.
inline KrausChannel make_channel(std::vector<Eigen::MatrixXcd> ops, int arity) {
  if (arity != 1 && arity != 2) throw Error("channel arity must be 1 or 2");
  if (ops.empty()) throw Error("channel needs at least one Kraus operator");
  const auto dim = std::int64_t{1} << arity;
  for (const auto& k : ops)
    if (k.rows() != dim || k.cols() != dim)
      throw Error("Kraus operator dimension does not match arity");
  KrausChannel ch;
  ch.arity = arity;
  ch.ops = std::move(ops);
  check_trace_preserving(ch);
  return ch;
}

/// rho -> (1-p) rho + p I/2^arity on the target subsystem.
inline KrausChannel depolarizing_channel(double p, int arity = 1) {
  if (p < 0.0 || p > 1.0) throw Error("depolarizing probability outside [0,1]");
  if (arity != 1 && arity != 2) throw Error("channel arity must be 1 or 2");
  KrausChannel ch;
  ch.arity = arity;
  ch.tag = KrausChannel::Tag::Depolarizing;
  ch.depol_p = p;

  Eigen::Matrix2cd paulis[4];
  paulis[0] = Eigen::Matrix2cd::Identity();
  paulis[1] = gate_matrix_1q(GateKind::X);
  paulis[2] << 0, cplx(0, -1), cplx(0, 1), 0;
  paulis[3] << 1, 0, 0, -1;

  const int n_terms = arity == 1 ? 4 : 16;
  for (int t = 0; t < n_terms; ++t) {
    const double w = t == 0 ? 1.0 - p + p / n_terms : p / n_terms;
    if (w < 1e-15) continue;
    Eigen::MatrixXcd op;
    if (arity == 1)
      op = paulis[t];
    else
      op = Eigen::kroneckerProduct(paulis[t / 4], paulis[t % 4]).eval();
    ch.ops.push_back(std::sqrt(w) * op);
  }
  check_trace_preserving(ch);
  return ch;
}

/**
 * Single-qubit thermal relaxation over a gate duration: populations decay
 * toward the (excited_population) equilibrium at rate 1 - e^(-duration/t1),
 * coherences decay by e^(-duration/t2). The Kraus form is extracted from the
 * channel's Choi matrix, which is positive exactly when t2 <= 2 t1; that
 * constraint is rejected loudly rather than clamped, so a bad device spec
 * cannot slip through.
 */
inline KrausChannel thermal_relaxation_channel(double t1, double t2,
                                               double duration,
                                               double excited_population) {
  if (t1 <= 0.0) throw Error("t1 must be positive");
  if (t2 <= 0.0) throw Error("t2 must be positive");
  if (t2 > 2.0 * t1 + 1e-15 * t1)
    throw Error("t2 > 2*t1 is unphysical for a relaxation channel");
  if (duration < 0.0) throw Error("duration must be non-negative");
  if (excited_population < 0.0 || excited_population > 1.0)
    throw Error("excited population outside [0,1]");

  const double e1 = std::exp(-duration / t1);
  const double e2 = std::exp(-duration / t2);
  const double pe = excited_population;

  KrausChannel ch;
  ch.arity = 1;
  ch.tag = KrausChannel::Tag::Relaxation;
  ch.relax_e1 = e1;
  ch.relax_e2 = e2;
  ch.relax_pe = pe;

  // Choi-matrix block over {|00>, |11>}: [[a, e2], [e2, b]].
  const double a = 1.0 - (1.0 - e1) * pe;
  const double b = e1 + (1.0 - e1) * pe;
  const double half_gap = std::sqrt((a - b) * (a - b) / 4.0 + e2 * e2);
  const double lam_plus = (a + b) / 2.0 + half_gap;
  const double lam_minus = (a + b) / 2.0 - half_gap;

  const auto add_diag = [&ch](double lam, double v0, double v1) {
    if (lam < 1e-15) return;
    const double norm = std::sqrt(v0 * v0 + v1 * v1);
    if (norm < 1e-15) return;
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2, 2);
    k(0, 0) = std::sqrt(lam) * v0 / norm;
    k(1, 1) = std::sqrt(lam) * v1 / norm;
    ch.ops.push_back(k);
  };
  if (std::abs(e2) < 1e-15) {
    add_diag(a, 1.0, 0.0);
    add_diag(b, 0.0, 1.0);
  } else {
    add_diag(lam_plus, e2, lam_plus - a);
    add_diag(lam_minus, e2, lam_minus - a);
  }

  const double p_decay = (1.0 - e1) * (1.0 - pe);
  if (p_decay > 1e-15) {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2, 2);
    k(0, 1) = std::sqrt(p_decay);
    ch.ops.push_back(k);
  }
  const double p_excite = (1.0 - e1) * pe;
  if (p_excite > 1e-15) {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2, 2);
    k(1, 0) = std::sqrt(p_excite);
    ch.ops.push_back(k);
  }
  check_trace_preserving(ch);
  return ch;
}

namespace detail {

/// Generic Kraus sum on a density matrix, via the embedded gate kernels.
inline void apply_channel_generic(Eigen::MatrixXcd& rho, int n,
                                  const KrausChannel& ch,
                                  std::span<const int> targets,
                                  bool adjoint = false) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  Eigen::MatrixXcd term(rho.rows(), rho.cols());
  for (const auto& k : ch.ops) {
    term = rho;
    if (ch.arity == 1) {
      const Eigen::Matrix2cd m = adjoint ? Eigen::Matrix2cd(k.adjoint())
                                         : Eigen::Matrix2cd(k);
      left_1q_rho(term, n, targets[0], m);
      right_1q_rho_dagger(term, n, targets[0], m);
    } else {
      const Eigen::Matrix4cd m = adjoint ? Eigen::Matrix4cd(k.adjoint())
                                         : Eigen::Matrix4cd(k);
      left_2q_rho(term, n, targets[0], targets[1], m);
      right_2q_rho_dagger(term, n, targets[0], targets[1], m);
    }
    acc += term;
  }
  rho.swap(acc);
}

/// Closed-form single-qubit depolarizing action (self-adjoint map).
inline void apply_depolarizing_fast(Eigen::MatrixXcd& rho, int n, int q,
                                    double p) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = bit_mask(n, q);
  const double half_p = p / 2.0, keep = 1.0 - p;
  for (std::size_t c = 0; c < dim; ++c) {
    if (c & mask) continue;
    const std::size_t c1 = c | mask;
    cplx* col0 = rho.data() + c * dim;
    cplx* col1 = rho.data() + c1 * dim;
    for (std::size_t r = 0; r < dim; ++r) {
      if (r & mask) continue;
      const std::size_t r1 = r | mask;
      const cplx d00 = col0[r], d11 = col1[r1];
      col0[r] = d00 + half_p * (d11 - d00);
      col1[r1] = d11 + half_p * (d00 - d11);
      col1[r] *= keep;
      col0[r1] *= keep;
    }
  }
}

/// Closed-form thermal-relaxation action; `adjoint` applies the dual map.
inline void apply_relaxation_fast(Eigen::MatrixXcd& rho, int n, int q,
                                  double e1, double e2, double pe,
                                  bool adjoint) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = bit_mask(n, q);
  // Population map: new00 = A*old00 + B*old11, new11 = C*old00 + D*old11.
  double A = 1.0 - (1.0 - e1) * pe;
  double B = (1.0 - e1) * (1.0 - pe);
  double C = (1.0 - e1) * pe;
  double D = e1 + (1.0 - e1) * pe;
  if (adjoint) {
    std::swap(B, C);
  }
  for (std::size_t c = 0; c < dim; ++c) {
    if (c & mask) continue;
    const std::size_t c1 = c | mask;
    cplx* col0 = rho.data() + c * dim;
    cplx* col1 = rho.data() + c1 * dim;
    for (std::size_t r = 0; r < dim; ++r) {
      if (r & mask) continue;
      const std::size_t r1 = r | mask;
      const cplx d00 = col0[r], d11 = col1[r1];
      col0[r] = A * d00 + B * d11;
      col1[r1] = C * d00 + D * d11;
      col1[r] *= e2;
      col0[r1] *= e2;
    }
  }
}

/// Channel application on a raw density matrix, dispatching to fast paths.
inline void apply_channel_rho(Eigen::MatrixXcd& rho, int n,
                              const KrausChannel& ch,
                              std::span<const int> targets) {
  switch (ch.tag) {
    case KrausChannel::Tag::Depolarizing:
      if (ch.arity == 1) {
        apply_depolarizing_fast(rho, n, targets[0], ch.depol_p);
        return;
      }
      break;
    case KrausChannel::Tag::Relaxation:
      apply_relaxation_fast(rho, n, targets[0], ch.relax_e1, ch.relax_e2,
                            ch.relax_pe, false);
      return;
    case KrausChannel::Tag::General:
      break;
  }
  apply_channel_generic(rho, n, ch, targets);
}

/// Heisenberg-picture (adjoint) channel action: O -> sum K^dagger O K.
inline void apply_channel_obs(Eigen::MatrixXcd& obs, int n,
                              const KrausChannel& ch,
                              std::span<const int> targets) {
  switch (ch.tag) {
    case KrausChannel::Tag::Depolarizing:
      if (ch.arity == 1) {
        // The single-qubit depolarizing map is self-adjoint.
        apply_depolarizing_fast(obs, n, targets[0], ch.depol_p);
        return;
      }
      break;
    case KrausChannel::Tag::Relaxation:
      apply_relaxation_fast(obs, n, targets[0], ch.relax_e1, ch.relax_e2,
                            ch.relax_pe, true);
      return;
    case KrausChannel::Tag::General:
      break;
  }
  apply_channel_generic(obs, n, ch, targets, /*adjoint=*/true);
}

}  // namespace detail

/**
 * Applies a Kraus channel to the given qubits. A pure input is promoted to
 * the mixed representation first; the trace is preserved by construction.
 */
inline QubitState apply_channel(const QubitState& state,
                                const KrausChannel& ch,
                                std::span<const int> targets) {
  check_targets(state.n_qubits(), targets, ch.arity);
  QubitState mixed = state.to_mixed();
  Eigen::MatrixXcd rho = mixed.density();
  detail::apply_channel_rho(rho, mixed.n_qubits(), ch, targets);
  return QubitState::from_density(std::move(rho));
}

}  // namespace qmlsim
