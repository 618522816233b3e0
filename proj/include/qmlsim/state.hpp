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
#include <map>
#include <span>
#include <string>

#include "qmlsim/errors.hpp"
#include "qmlsim/gates.hpp"
#include "qmlsim/rng.hpp"

namespace qmlsim {

/// Dense simulation is exact and fast at the target scale; beyond this the
/// mixed representation alone would exceed a quarter of a GiB.
inline constexpr int kMaxQubits = 12;

namespace detail {

inline std::size_t bit_mask(int n_qubits, int qubit) {
  // Qubit 0 is the most significant bit of a basis-state index.
  return std::size_t{1} << (n_qubits - 1 - qubit);
}

/// In-place 1-qubit unitary on a statevector.
inline void apply_1q_vec(cplx* a, int n, int q, const Eigen::Matrix2cd& u) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = bit_mask(n, q);
  const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & mask) continue;
    const std::size_t j = i | mask;
    const cplx a0 = a[i], a1 = a[j];
    a[i] = u00 * a0 + u01 * a1;
    a[j] = u10 * a0 + u11 * a1;
  }
}

/// In-place 2-qubit unitary on a statevector; u is in |q_a q_b> ordering.
inline void apply_2q_vec(cplx* a, int n, int qa, int qb,
                         const Eigen::Matrix4cd& u) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t ma = bit_mask(n, qa), mb = bit_mask(n, qb);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & (ma | mb)) continue;
    const std::size_t idx[4] = {base, base | mb, base | ma, base | ma | mb};
    cplx in[4];
    for (int t = 0; t < 4; ++t) in[t] = a[idx[t]];
    for (int r = 0; r < 4; ++r) {
      cplx acc = 0;
      for (int c = 0; c < 4; ++c) acc += u(r, c) * in[c];
      a[idx[r]] = acc;
    }
  }
}

/// rho <- U rho (left multiplication by an embedded 1-qubit unitary).
inline void left_1q_rho(Eigen::MatrixXcd& rho, int n, int q,
                        const Eigen::Matrix2cd& u) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = bit_mask(n, q);
  const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  for (std::size_t c = 0; c < dim; ++c) {
    cplx* col = rho.data() + c * dim;
    for (std::size_t r = 0; r < dim; ++r) {
      if (r & mask) continue;
      const std::size_t r1 = r | mask;
      const cplx a0 = col[r], a1 = col[r1];
      col[r] = u00 * a0 + u01 * a1;
      col[r1] = u10 * a0 + u11 * a1;
    }
  }
}

/// rho <- rho U^dagger for the same embedded unitary.
inline void right_1q_rho_dagger(Eigen::MatrixXcd& rho, int n, int q,
                                const Eigen::Matrix2cd& u) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t mask = bit_mask(n, q);
  const cplx c00 = std::conj(u(0, 0)), c01 = std::conj(u(0, 1));
  const cplx c10 = std::conj(u(1, 0)), c11 = std::conj(u(1, 1));
  for (std::size_t c = 0; c < dim; ++c) {
    if (c & mask) continue;
    const std::size_t c1 = c | mask;
    cplx* col0 = rho.data() + c * dim;
    cplx* col1 = rho.data() + c1 * dim;
    for (std::size_t r = 0; r < dim; ++r) {
      const cplx a0 = col0[r], a1 = col1[r];
      col0[r] = c00 * a0 + c01 * a1;
      col1[r] = c10 * a0 + c11 * a1;
    }
  }
}

inline void left_2q_rho(Eigen::MatrixXcd& rho, int n, int qa, int qb,
                        const Eigen::Matrix4cd& u) {
  const std::size_t dim = std::size_t{1} << n;
  for (std::size_t c = 0; c < dim; ++c)
    apply_2q_vec(rho.data() + c * dim, n, qa, qb, u);
}

inline void right_2q_rho_dagger(Eigen::MatrixXcd& rho, int n, int qa, int qb,
                                const Eigen::Matrix4cd& u) {
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t ma = bit_mask(n, qa), mb = bit_mask(n, qb);
  const Eigen::Matrix4cd ud = u.adjoint();
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & (ma | mb)) continue;
    const std::size_t idx[4] = {base, base | mb, base | ma, base | ma | mb};
    for (std::size_t r = 0; r < dim; ++r) {
      cplx in[4];
      for (int t = 0; t < 4; ++t) in[t] = rho(r, idx[t]);
      for (int cc = 0; cc < 4; ++cc) {
        cplx acc = 0;
        for (int k = 0; k < 4; ++k) acc += in[k] * ud(k, cc);
        rho(r, idx[cc]) = acc;
      }
    }
  }
}

/// rho <- U rho U^dagger.
inline void conjugate_1q_rho(Eigen::MatrixXcd& rho, int n, int q,
                             const Eigen::Matrix2cd& u) {
  left_1q_rho(rho, n, q, u);
  right_1q_rho_dagger(rho, n, q, u);
}

inline void conjugate_2q_rho(Eigen::MatrixXcd& rho, int n, int qa, int qb,
                             const Eigen::Matrix4cd& u) {
  left_2q_rho(rho, n, qa, qb, u);
  right_2q_rho_dagger(rho, n, qa, qb, u);
}

/// obs <- U^dagger obs U (Heisenberg-picture update).
inline void conjugate_1q_obs(Eigen::MatrixXcd& obs, int n, int q,
                             const Eigen::Matrix2cd& u) {
  const Eigen::Matrix2cd ud = u.adjoint();
  left_1q_rho(obs, n, q, ud);
  right_1q_rho_dagger(obs, n, q, ud);
}

inline void conjugate_2q_obs(Eigen::MatrixXcd& obs, int n, int qa, int qb,
                             const Eigen::Matrix4cd& u) {
  const Eigen::Matrix4cd ud = u.adjoint();
  left_2q_rho(obs, n, qa, qb, ud);
  right_2q_rho_dagger(obs, n, qa, qb, ud);
}

}  // namespace detail

/// Measurement outcomes aggregated over repeated shots.
struct ShotCounts {
  std::map<std::string, long long> counts;  // bitstring -> count, zero-free
  long long total = 0;

  long long count_of(const std::string& key) const {
    const auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
  }
};

/**
 * An n-qubit quantum state in one of two representations: a pure state held
 * as 2^n complex amplitudes, or a mixed state held as a dense 2^n x 2^n
 * density matrix. Values are immutable from the caller's perspective; all
 * operations return new states.
 */
class QubitState {
 public:
  static QubitState zero(int n_qubits) {
    check_width(n_qubits);
    QubitState s;
    s.n_ = n_qubits;
    s.pure_ = true;
    s.psi_ = Eigen::VectorXcd::Zero(std::int64_t{1} << n_qubits);
    s.psi_(0) = 1.0;
    return s;
  }

  static QubitState from_amplitudes(Eigen::VectorXcd amplitudes) {
    const int n = width_from_dim(amplitudes.size());
    if (std::abs(amplitudes.squaredNorm() - 1.0) > 1e-10)
      throw Error("statevector is not normalized");
    QubitState s;
    s.n_ = n;
    s.pure_ = true;
    s.psi_ = std::move(amplitudes);
    return s;
  }

  static QubitState from_density(Eigen::MatrixXcd rho) {
    if (rho.rows() != rho.cols()) throw Error("density matrix is not square");
    const int n = width_from_dim(rho.rows());
    if (std::abs(rho.trace().real() - 1.0) > 1e-10 ||
        std::abs(rho.trace().imag()) > 1e-10)
      throw Error("density matrix trace is not 1");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
      throw Error("density matrix is not Hermitian");
    QubitState s;
    s.n_ = n;
    s.pure_ = false;
    s.rho_ = std::move(rho);
    return s;
  }

  int n_qubits() const { return n_; }
  bool is_pure() const { return pure_; }

  const Eigen::VectorXcd& amplitudes() const {
    if (!pure_) throw Error("state is mixed; no amplitude vector");
    return psi_;
  }

  const Eigen::MatrixXcd& density() const {
    if (pure_) throw Error("state is pure; call to_mixed() first");
    return rho_;
  }

  /// Promotes to the density-matrix representation (|psi><psi| for pure).
  QubitState to_mixed() const {
    if (!pure_) return *this;
    QubitState s;
    s.n_ = n_;
    s.pure_ = false;
    s.rho_ = psi_ * psi_.adjoint();
    return s;
  }

 private:
  static void check_width(int n) {
    if (n < 1 || n > kMaxQubits)
      throw Error("qubit count " + std::to_string(n) + " outside [1, " +
                  std::to_string(kMaxQubits) + "]");
  }

  static int width_from_dim(std::int64_t dim) {
    int n = 0;
    while ((std::int64_t{1} << n) < dim && n <= kMaxQubits) ++n;
    if ((std::int64_t{1} << n) != dim)
      throw Error("dimension " + std::to_string(dim) + " is not a power of 2");
    check_width(n);
    return n;
  }

  int n_ = 0;
  bool pure_ = true;
  Eigen::VectorXcd psi_;
  Eigen::MatrixXcd rho_;

  friend QubitState apply_gate(const QubitState&, GateKind,
                               std::span<const int>, std::span<const double>);
};

inline void check_targets(int n_qubits, std::span<const int> targets,
                          int arity) {
  if (static_cast<int>(targets.size()) != arity)
    throw Error("expected " + std::to_string(arity) + " target qubits, got " +
                std::to_string(targets.size()));
  for (const int q : targets)
    if (q < 0 || q >= n_qubits)
      throw Error("target qubit " + std::to_string(q) + " out of range");
  if (arity == 2 && targets[0] == targets[1])
    throw Error("target qubits must be distinct");
}

/// Unitary action: |psi> -> U|psi>, or rho -> U rho U^dagger.
inline QubitState apply_gate(const QubitState& state, GateKind kind,
                             std::span<const int> targets,
                             std::span<const double> params = {}) {
  check_targets(state.n_qubits(), targets, gate_arity(kind));
  QubitState out = state;
  if (gate_arity(kind) == 1) {
    const Eigen::Matrix2cd u = gate_matrix_1q(kind, params);
    if (out.pure_)
      detail::apply_1q_vec(out.psi_.data(), out.n_, targets[0], u);
    else
      detail::conjugate_1q_rho(out.rho_, out.n_, targets[0], u);
  } else {
    const Eigen::Matrix4cd u = gate_matrix_2q(kind);
    if (out.pure_)
      detail::apply_2q_vec(out.psi_.data(), out.n_, targets[0], targets[1], u);
    else
      detail::conjugate_2q_rho(out.rho_, out.n_, targets[0], targets[1], u);
  }
  return out;
}

/// Exact <Z> of one qubit, with the |0> -> +1 sign convention.
inline double expectation_z(const QubitState& state, int qubit) {
  if (qubit < 0 || qubit >= state.n_qubits())
    throw Error("qubit index " + std::to_string(qubit) + " out of range");
  const std::size_t dim = std::size_t{1} << state.n_qubits();
  const std::size_t mask = detail::bit_mask(state.n_qubits(), qubit);
  double z = 0;
  if (state.is_pure()) {
    const auto& a = state.amplitudes();
    for (std::size_t i = 0; i < dim; ++i)
      z += (i & mask) ? -std::norm(a(i)) : std::norm(a(i));
  } else {
    const auto& rho = state.density();
    for (std::size_t i = 0; i < dim; ++i)
      z += (i & mask) ? -rho(i, i).real() : rho(i, i).real();
  }
  return z;
}

/// Exact marginal probability of reading |1> on one qubit.
inline double probability_one(const QubitState& state, int qubit) {
  return (1.0 - expectation_z(state, qubit)) / 2.0;
}

/**
 * Samples the exact marginal distribution of a single qubit. Deterministic
 * given the seed; the bitstring keys are "0" and "1" and zero counts are
 * omitted.
 */
inline ShotCounts sample_shots(const QubitState& state, int qubit,
                               long long shots, std::uint64_t seed) {
  if (shots < 1) throw Error("shot count must be positive");
  const double p1 = probability_one(state, qubit);
  Rng rng(seed);
  long long ones = 0;
  for (long long s = 0; s < shots; ++s) ones += rng.bernoulli(p1) ? 1 : 0;
  ShotCounts out;
  out.total = shots;
  if (shots - ones > 0) out.counts["0"] = shots - ones;
  if (ones > 0) out.counts["1"] = ones;
  return out;
}

inline void check_confusion(const Eigen::Matrix2d& confusion) {
  for (int r = 0; r < 2; ++r) {
    if (std::abs(confusion(r, 0) + confusion(r, 1) - 1.0) > 1e-10)
      throw Error("readout confusion matrix rows must sum to 1");
    if (confusion(r, 0) < 0 || confusion(r, 1) < 0)
      throw Error("readout confusion entries must be non-negative");
  }
}

/// Exact readout-error action on a (p0, p1) outcome distribution.
inline std::pair<double, double> apply_readout_error(
    std::pair<double, double> probs, const Eigen::Matrix2d& confusion) {
  check_confusion(confusion);
  const auto [p0, p1] = probs;
  return {p0 * confusion(0, 0) + p1 * confusion(1, 0),
          p0 * confusion(0, 1) + p1 * confusion(1, 1)};
}

/// Per-shot resampled readout error on counts; the total is preserved.
inline ShotCounts apply_readout_error(const ShotCounts& counts,
                                      const Eigen::Matrix2d& confusion,
                                      std::uint64_t seed) {
  check_confusion(confusion);
  Rng rng(seed);
  long long zeros = 0, ones = 0;
  for (const auto& [key, count] : counts.counts) {
    if (key != "0" && key != "1")
      throw Error("readout error expects single-qubit counts");
    const int row = key == "0" ? 0 : 1;
    for (long long s = 0; s < count; ++s) {
      if (rng.bernoulli(confusion(row, 1)))
        ++ones;
      else
        ++zeros;
    }
  }
  ShotCounts out;
  out.total = counts.total;
  if (zeros > 0) out.counts["0"] = zeros;
  if (ones > 0) out.counts["1"] = ones;
  return out;
}

/// Checks the representation invariants, throwing on violation.
inline void validate_state(const QubitState& state) {
  if (state.is_pure()) {
    if (std::abs(state.amplitudes().squaredNorm() - 1.0) > 1e-10)
      throw NumericError("pure-state norm drifted from 1");
    return;
  }
  const auto& rho = state.density();
  if (std::abs(rho.trace().real() - 1.0) > 1e-10)
    throw NumericError("density-matrix trace drifted from 1");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw NumericError("density matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(rho);
  if (solver.eigenvalues().minCoeff() < -1e-9)
    throw NumericError("density matrix has a negative eigenvalue");
}

}  // namespace qmlsim
