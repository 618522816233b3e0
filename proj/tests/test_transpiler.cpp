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
#include "qmlsim/transpiler.hpp"

using namespace qmlsim;

namespace {
const std::set<std::string> kIbmNatives{"rz", "sx", "x", "ecr"};
}

TEST_CASE("native rz passes through untouched") {
  Circuit c(1);
  c.add(GateKind::RZ, 0, Param(0.37));
  const auto out = decompose_to_native(c, kIbmNatives);
  REQUIRE(out.ops().size() == 1);
  REQUIRE(out.ops()[0].gate.kind == GateKind::RZ);
  REQUIRE(out.ops()[0].gate.params[0].value == Catch::Approx(0.37));
}

TEST_CASE("H lowers to the rz(pi/2) sx rz(pi/2) sequence") {
  Circuit c(1);
  c.add(GateKind::H, 0);
  const auto out = decompose_to_native(c, kIbmNatives);
  REQUIRE(out.ops().size() == 3);
  REQUIRE(out.ops()[0].gate.kind == GateKind::RZ);
  REQUIRE(out.ops()[0].gate.params[0].value == Catch::Approx(kPi / 2));
  REQUIRE(out.ops()[1].gate.kind == GateKind::SX);
  REQUIRE(out.ops()[2].gate.kind == GateKind::RZ);
  REQUIRE(out.ops()[2].gate.params[0].value == Catch::Approx(kPi / 2));
  REQUIRE(oracle::phase_distance(circuit_unitary(c), circuit_unitary(out)) <
          1e-10);
}

TEST_CASE("CNOT lowers to one ECR plus single-qubit natives") {
  Circuit c(2);
  c.add2(GateKind::CNOT, 0, 1);
  const auto out = decompose_to_native(c, kIbmNatives);
  const auto meta = circuit_metadata(out);
  REQUIRE(meta.gate_counts.at("ecr") == 1);
  REQUIRE(oracle::phase_distance(circuit_unitary(c), circuit_unitary(out)) <
          1e-10);
}

TEST_CASE("CZ, SWAP and ECR all lower correctly over the IBM-style set") {
  for (const auto kind : {GateKind::CZ, GateKind::SWAP, GateKind::ECR}) {
    Circuit c(2);
    c.add2(kind, 0, 1);
    const auto out = decompose_to_native(c, kIbmNatives);
    for (const auto& op : out.ops())
      REQUIRE(kIbmNatives.count(gate_name(op.gate.kind)) == 1);
    REQUIRE(oracle::phase_distance(circuit_unitary(c), circuit_unitary(out)) <
            1e-10);
  }
}

TEST_CASE("ECR lowers through CNOT or CZ when those are native") {
  for (const std::set<std::string> natives :
       {std::set<std::string>{"rz", "sx", "cnot"},
        std::set<std::string>{"rz", "sx", "cz"}}) {
    Circuit c(2);
    c.add2(GateKind::ECR, 0, 1);
    const auto out = decompose_to_native(c, natives);
    for (const auto& op : out.ops())
      REQUIRE(natives.count(gate_name(op.gate.kind)) == 1);
    REQUIRE(oracle::phase_distance(circuit_unitary(c), circuit_unitary(out)) <
            1e-10);
  }
}

TEST_CASE("unsupported lowering requests fail loudly") {
  Circuit c(2);
  c.add2(GateKind::CNOT, 0, 1);
  REQUIRE_THROWS_AS(decompose_to_native(c, {"rz", "sx"}), Error);
  Circuit h(1);
  h.add(GateKind::H, 0);
  REQUIRE_THROWS_AS(decompose_to_native(h, {"rz", "ecr"}), Error);
}

TEST_CASE("slotted rotations keep their slot on a single rz") {
  Rng rng(5);
  for (const auto kind : {GateKind::RX, GateKind::RY, GateKind::RZ}) {
    Circuit c(1);
    c.add(kind, 0, Param(0.0, 0));
    const auto out = decompose_to_native(c, kIbmNatives);
    int slotted = 0;
    for (const auto& op : out.ops())
      for (int p = 0; p < op.gate.n_params(); ++p)
        if (op.gate.params[p].slot == 0) ++slotted;
    REQUIRE(slotted == 1);
    // binding before or after decomposition gives the same unitary
    for (int trial = 0; trial < 5; ++trial) {
      const std::vector<double> w{rng.uniform(-2 * kPi, 2 * kPi)};
      REQUIRE(oracle::phase_distance(circuit_unitary(bind_slots(c, w)),
                                     circuit_unitary(out, w)) < 1e-10);
    }
  }
  Circuit rot(1);
  rot.add(GateKind::Rot, 0, Param(0.0, 0), Param(0.0, 1), Param(0.0, 2));
  const auto out = decompose_to_native(rot, kIbmNatives);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<double> w{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi),
                                rng.uniform(-kPi, kPi)};
    REQUIRE(oracle::phase_distance(circuit_unitary(bind_slots(rot, w)),
                                   circuit_unitary(out, w)) < 1e-10);
  }
}

TEST_CASE("random circuits survive decomposition up to global phase") {
  Rng rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = rng.uniform_int(1, 3);
    const auto c = oracle::random_circuit(n, 10, rng);
    const auto out = decompose_to_native(c, kIbmNatives);
    REQUIRE(oracle::phase_distance(circuit_unitary(c), circuit_unitary(out)) <
            1e-8);
  }
}

TEST_CASE("router leaves conforming circuits untouched") {
  const auto dev = line_device(3);
  Circuit c(3);
  c.add2(GateKind::ECR, 0, 1);
  c.add(GateKind::SX, 2);
  c.add2(GateKind::ECR, 1, 2);
  const auto rr = route(c, dev);
  REQUIRE(rr.n_swaps == 0);
  REQUIRE(rr.circuit.ops().size() == c.ops().size());
  REQUIRE(rr.final_layout.v2p == std::vector<int>{0, 1, 2});
}

TEST_CASE("distance-2 interaction costs exactly one swap on a line") {
  // Greedy walk on 0-1-2: one swap moves the first operand next to the
  // second, after which the gate is executable.
  const auto dev = line_device(3);
  Circuit c(3);
  c.add2(GateKind::ECR, 0, 2);
  const auto rr = route(c, dev);
  REQUIRE(rr.n_swaps == 1);
  int ecr_count = 0;
  for (const auto& op : rr.circuit.ops())
    if (op.gate.kind == GateKind::ECR) {
      ++ecr_count;
      REQUIRE(dev.coupled(op.gate.targets[0], op.gate.targets[1]));
    }
  REQUIRE(ecr_count == 1);
}

TEST_CASE("routing is deterministic for a fixed seed") {
  const auto dev = heavy_hex_127_device();
  Rng rng(21);
  const auto c = oracle::random_circuit(5, 30, rng);
  const auto native = decompose_to_native(c, dev.native_gates);
  const auto a = route(native, dev, std::nullopt, 77);
  const auto b = route(native, dev, std::nullopt, 77);
  REQUIRE(to_text(a.circuit) == to_text(b.circuit));
  REQUIRE(a.final_layout.v2p == b.final_layout.v2p);
}

TEST_CASE("transpile preserves the unitary modulo the layout permutation") {
  Rng rng(13);
  const auto dev = line_device(3);
  for (int trial = 0; trial < 15; ++trial) {
    const auto c = oracle::random_circuit(3, 8, rng);
    const auto result = transpile(c, dev, {std::nullopt, rng.next_u64(), false});
    // every two-qubit gate must respect the coupling map
    for (const auto& op : result.circuit.ops())
      if (op.gate.arity() == 2)
        REQUIRE(dev.coupled(op.gate.targets[0], op.gate.targets[1]));
    const auto v = circuit_unitary(result.circuit);
    const auto u = oracle::reference_unitary(c);
    const auto p0 = layout_permutation_matrix(result.initial_layout, 3);
    const auto pf = layout_permutation_matrix(result.final_layout, 3);
    REQUIRE(oracle::phase_distance(Eigen::MatrixXcd(pf * u * p0.adjoint()), v) <
            1e-8);
  }
}

TEST_CASE("transpiling an already-native routed circuit changes nothing") {
  const auto dev = line_device(3);
  Circuit c(3);
  c.add(GateKind::RZ, 0, Param(0.5));
  c.add(GateKind::SX, 1);
  c.add2(GateKind::ECR, 1, 2);
  c.add(GateKind::X, 2);
  const auto once = transpile(c, dev, {});
  REQUIRE(once.n_swaps == 0);
  const auto twice = transpile(once.circuit, dev, {});
  REQUIRE(to_text(once.circuit) == to_text(twice.circuit));
}

TEST_CASE("noise schedule attaches one entry per acted qubit") {
  const auto dev = heavy_hex_127_device();
  Circuit c(3);
  c.add(GateKind::SX, 0);
  c.add2(GateKind::ECR, 0, 1);
  c.add(GateKind::RZ, 2, Param(0.1));
  const auto noisy = noise_schedule(c, dev, Layout::identity(3));
  REQUIRE(noise_attachment_count(noisy) == 1 + 2 + 1);
  // sx on qubit 0: exactly one depolarizing and one relaxation channel
  const auto& att = noisy.ops()[0].noise;
  REQUIRE(att.size() == 1);
  REQUIRE(att[0].qubit == 0);
  REQUIRE(att[0].depolarizing.tag == KrausChannel::Tag::Depolarizing);
  REQUIRE(att[0].relaxation.tag == KrausChannel::Tag::Relaxation);
  REQUIRE(att[0].depolarizing.depol_p > 0.0);
  // rz is a frame change on this device: zero error and duration
  REQUIRE(noisy.ops()[2].noise[0].depolarizing.is_identity());
  REQUIRE(noisy.ops()[2].noise[0].relaxation.is_identity());
  // readout confusion tagged on the layout image
  REQUIRE(noisy.readout().size() == 3);
}

TEST_CASE("zero-noise schedules leave the simulation exact") {
  const auto dev = line_device(2);
  Circuit c(2);
  c.add(GateKind::SX, 0);
  c.add2(GateKind::ECR, 0, 1);
  const auto noisy = noise_schedule(c, dev, Layout::identity(2));
  REQUIRE(noise_attachment_count(noisy) == 3);
  for (const auto& op : noisy.ops())
    for (const auto& att : op.noise) {
      REQUIRE(att.depolarizing.is_identity());
      REQUIRE(att.relaxation.is_identity());
    }
  const auto rho = run_density(noisy);
  const auto psi = run_statevector(c);
  REQUIRE((rho - psi * psi.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("missing gate properties are a data error") {
  auto dev = line_device(2);
  dev.gate_props.clear();
  Circuit c(2);
  c.add(GateKind::SX, 0);
  REQUIRE_THROWS_AS(noise_schedule(c, dev, Layout::identity(2)), DataError);
}

TEST_CASE("layouts must be injective and on-device") {
  const auto dev = line_device(3);
  Circuit c(2);
  c.add2(GateKind::ECR, 0, 1);
  Layout bad;
  bad.v2p = {0, 0};
  REQUIRE_THROWS_AS(route(c, dev, bad), Error);
  Layout off;
  off.v2p = {0, 5};
  REQUIRE_THROWS_AS(route(c, dev, off), Error);
  Circuit wide(4);
  wide.add2(GateKind::ECR, 0, 3);
  REQUIRE_THROWS_AS(route(wide, line_device(3)), Error);
}
