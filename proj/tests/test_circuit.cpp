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

#include "oracles.hpp"
#include "qmlsim/circuit.hpp"

using namespace qmlsim;

TEST_CASE("statevector executor matches the dense oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 8; ++trial) {
    const auto c = oracle::random_circuit(3, 10, rng);
    const auto psi = run_statevector(c);
    const Eigen::MatrixXcd u = oracle::reference_unitary(c);
    Eigen::VectorXcd expected = u.col(0);
    REQUIRE((psi - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("circuit_unitary matches the dense oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 6; ++trial) {
    const auto c = oracle::random_circuit(3, 9, rng);
    REQUIRE((circuit_unitary(c) - oracle::reference_unitary(c))
                .cwiseAbs()
                .maxCoeff() < 1e-10);
  }
}

TEST_CASE("density executor equals outer product on noiseless circuits") {
  Rng rng(6);
  for (int trial = 0; trial < 6; ++trial) {
    const auto c = oracle::random_circuit(3, 12, rng);
    const auto psi = run_statevector(c);
    const auto rho = run_density(c);
    REQUIRE((rho - psi * psi.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("slot binding and on-the-fly resolution agree") {
  Circuit c(2);
  c.add(GateKind::RY, 0, Param(0.0, 0));
  c.add2(GateKind::CNOT, 0, 1);
  c.add(GateKind::Rot, 1, Param(0.1, 1), Param(-0.2, 2), Param(0.0, 3));
  const std::vector<double> slots{0.3, 0.5, 0.7, -1.1};
  const auto bound = bind_slots(c, slots);
  REQUIRE(bound.n_slots() == 0);
  REQUIRE((run_statevector(c, slots) - run_statevector(bound))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  REQUIRE_THROWS_AS(run_statevector(c), Error);  // unbound slot
}

TEST_CASE("metadata of the empty circuit") {
  const Circuit c(3);
  const auto meta = circuit_metadata(c);
  REQUIRE(meta.depth == 0);
  REQUIRE(meta.n_qubits == 0);
  REQUIRE(meta.total_gates == 0);
  REQUIRE(meta.gate_counts.empty());
}

TEST_CASE("metadata of a single two-qubit gate") {
  Circuit c(3);
  c.add2(GateKind::ECR, 0, 1);
  const auto meta = circuit_metadata(c);
  REQUIRE(meta.depth == 1);
  REQUIRE(meta.n_qubits == 2);
  REQUIRE(meta.gate_counts.at("ecr") == 1);
}

TEST_CASE("metadata counts and depth are mutually consistent") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = oracle::random_circuit(4, 25, rng);
    const auto meta = circuit_metadata(c);
    long long total = 0;
    for (const auto& [name, count] : meta.gate_counts) total += count;
    REQUIRE(total == meta.total_gates);
    REQUIRE(total == static_cast<long long>(c.ops().size()));
    REQUIRE(meta.depth <= meta.total_gates);
    REQUIRE(meta.depth >= 1);
  }
}

TEST_CASE("depth follows the longest dependency chain") {
  Circuit c(3);
  c.add(GateKind::H, 0);
  c.add(GateKind::H, 1);  // parallel with the first
  c.add2(GateKind::CNOT, 0, 1);
  c.add(GateKind::X, 2);  // independent wire
  const auto meta = circuit_metadata(c);
  REQUIRE(meta.depth == 2);
}

TEST_CASE("text round trip preserves gates and angles") {
  Rng rng(10);
  const auto c = oracle::random_circuit(3, 14, rng);
  const auto text = to_text(c);
  const auto parsed = from_text(text);
  REQUIRE(parsed.n_qubits() == c.n_qubits());
  REQUIRE(parsed.ops().size() == c.ops().size());
  REQUIRE((run_statevector(parsed) - run_statevector(c)).cwiseAbs().maxCoeff() <
          1e-12);
  REQUIRE(to_text(parsed) == text);
}

TEST_CASE("text parser reports malformed input") {
  REQUIRE_THROWS_AS(from_text(""), DataError);
  REQUIRE_THROWS_AS(from_text("H 0\n"), DataError);  // missing header
  REQUIRE_THROWS_AS(from_text("qubits 2\nFOO 0\n"), DataError);
  REQUIRE_THROWS_AS(from_text("qubits 2\nCNOT 0\n"), DataError);
  REQUIRE_THROWS_AS(from_text("qubits 2\nRY 0\n"), DataError);
}

TEST_CASE("qasm emission covers the native set") {
  Circuit c(2);
  c.add(GateKind::RZ, 0, Param(1.5));
  c.add(GateKind::SX, 0);
  c.add(GateKind::X, 1);
  c.add2(GateKind::ECR, 0, 1);
  const auto qasm = to_qasm3(c);
  REQUIRE(qasm.find("OPENQASM 3.0;") != std::string::npos);
  REQUIRE(qasm.find("qubit[2] q;") != std::string::npos);
  REQUIRE(qasm.find("rz(1.5) q[0];") != std::string::npos);
  REQUIRE(qasm.find("ecr q[0], q[1];") != std::string::npos);
}

TEST_CASE("append merges gates and slot spaces") {
  Circuit a(2);
  a.add(GateKind::RY, 0, Param(0.0, 0));
  Circuit b(2);
  b.add(GateKind::RY, 1, Param(0.0, 1));
  a.append(b);
  REQUIRE(a.n_slots() == 2);
  REQUIRE(a.ops().size() == 2);
  Circuit w(3);
  REQUIRE_THROWS_AS(a.append(w), Error);
}
