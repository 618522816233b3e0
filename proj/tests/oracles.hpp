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

// Independent dense-matrix helpers used as oracles. They compose circuits by
// explicit basis-index arithmetic rather than through the simulator kernels,
// so agreement between the two routes is meaningful.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qmlsim/circuit.hpp"
#include "qmlsim/rng.hpp"

namespace oracle {

using qmlsim::cplx;

/// Embeds a 1-qubit matrix at qubit q of an n-qubit register (q0 = MSB).
inline Eigen::MatrixXcd embed_1q(const Eigen::Matrix2cd& u, int n, int q) {
  const std::size_t dim = std::size_t{1} << n;
  const int shift = n - 1 - q;
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      if ((r & ~(std::size_t{1} << shift)) != (c & ~(std::size_t{1} << shift)))
        continue;
      full(r, c) = u((r >> shift) & 1, (c >> shift) & 1);
    }
  return full;
}

/// Embeds a 2-qubit matrix (|ab> ordering) at qubits (a, b).
inline Eigen::MatrixXcd embed_2q(const Eigen::Matrix4cd& u, int n, int a,
                                 int b) {
  const std::size_t dim = std::size_t{1} << n;
  const int sa = n - 1 - a, sb = n - 1 - b;
  const std::size_t rest_mask =
      (dim - 1) & ~((std::size_t{1} << sa) | (std::size_t{1} << sb));
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      if ((r & rest_mask) != (c & rest_mask)) continue;
      const int ri = static_cast<int>(((r >> sa) & 1) * 2 + ((r >> sb) & 1));
      const int ci = static_cast<int>(((c >> sa) & 1) * 2 + ((c >> sb) & 1));
      full(r, c) = u(ri, ci);
    }
  return full;
}

/// Dense circuit unitary by embedded-matrix products.
inline Eigen::MatrixXcd reference_unitary(const qmlsim::Circuit& c,
                                          std::span<const double> slots = {}) {
  const std::size_t dim = std::size_t{1} << c.n_qubits();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& op : c.ops()) {
    const auto& g = op.gate;
    if (g.arity() == 1)
      u = embed_1q(g.matrix_1q(slots), c.n_qubits(), g.targets[0]) * u;
    else
      u = embed_2q(qmlsim::gate_matrix_2q(g.kind), c.n_qubits(), g.targets[0],
                   g.targets[1]) *
          u;
  }
  return u;
}

/// Max elementwise distance between two matrices up to one global phase.
inline double phase_distance(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  cplx overlap = 0;
  for (long r = 0; r < a.rows(); ++r)
    for (long c = 0; c < a.cols(); ++c) overlap += std::conj(a(r, c)) * b(r, c);
  if (std::abs(overlap) < 1e-14) return 1.0;
  overlap /= std::abs(overlap);
  return (b - overlap * a).cwiseAbs().maxCoeff();
}

inline double phase_distance(const Eigen::VectorXcd& a,
                             const Eigen::VectorXcd& b) {
  cplx overlap = a.adjoint() * b;
  if (std::abs(overlap) < 1e-14) return 1.0;
  overlap /= std::abs(overlap);
  return (b - overlap * a).cwiseAbs().maxCoeff();
}

/// Random circuit over the full gate alphabet.
inline qmlsim::Circuit random_circuit(int n_qubits, int n_gates,
                                      qmlsim::Rng& rng,
                                      bool two_qubit_gates = true) {
  qmlsim::Circuit c(n_qubits);
  while (static_cast<int>(c.ops().size()) < n_gates) {
    const auto kind =
        static_cast<qmlsim::GateKind>(rng.uniform_int(0, 10));
    if (qmlsim::gate_arity(kind) == 2) {
      if (!two_qubit_gates || n_qubits < 2) continue;
      const int a = rng.uniform_int(0, n_qubits - 1);
      int b = rng.uniform_int(0, n_qubits - 1);
      if (a == b) b = (b + 1) % n_qubits;
      c.add2(kind, a, b);
    } else {
      qmlsim::Gate g;
      g.kind = kind;
      g.targets = {rng.uniform_int(0, n_qubits - 1), -1};
      for (int p = 0; p < qmlsim::gate_param_count(kind); ++p)
        g.params[p] = qmlsim::Param(rng.uniform(-qmlsim::kPi, qmlsim::kPi));
      c.add(g);
    }
  }
  return c;
}

inline Eigen::VectorXcd random_state(int n_qubits, qmlsim::Rng& rng) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  Eigen::VectorXcd v(dim);
  for (std::size_t i = 0; i < dim; ++i) v(i) = cplx(rng.normal(), rng.normal());
  v /= v.norm();
  return v;
}

}  // namespace oracle
