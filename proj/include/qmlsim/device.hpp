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
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmlsim/errors.hpp"
#include "qmlsim/gates.hpp"
#include "qmlsim/rng.hpp"

namespace qmlsim {

struct QubitProps {
  double t1_s = 0.0;
  double t2_s = 0.0;
  Eigen::Matrix2d readout_confusion = Eigen::Matrix2d::Identity();
};

struct GateProps {
  std::string gate;
  std::vector<int> qubits;  // empty = applies to any qubit tuple
  double duration_s = 0.0;
  double error = 0.0;
};

/**
 * Static description of a target device: which qubit pairs interact, which
 * gates run natively, and the noise figures attached to qubits and gates.
 * Times are seconds in memory; the file schema uses microseconds for T1/T2
 * and nanoseconds for gate durations.
 */
struct DeviceSpec {
  static constexpr int kSchemaVersion = 1;

  std::string name;
  int n_qubits = 0;
  std::vector<std::pair<int, int>> coupling_map;
  std::set<std::string> native_gates;
  std::vector<QubitProps> qubit_props;
  std::vector<GateProps> gate_props;

  bool coupled(int a, int b) const {
    for (const auto& [u, v] : coupling_map)
      if ((u == a && v == b) || (u == b && v == a)) return true;
    return false;
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(n_qubits);
    for (const auto& [u, v] : coupling_map) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    for (auto& row : adj) std::sort(row.begin(), row.end());
    return adj;
  }

  /// Most specific gate-property match: exact qubit tuple (either order for
  /// pairs), then the wildcard entry with an empty qubit list.
  const GateProps* find_gate_props(const std::string& gate,
                                   std::span<const int> qubits) const {
    const GateProps* wildcard = nullptr;
    for (const auto& gp : gate_props) {
      if (gp.gate != gate) continue;
      if (gp.qubits.empty()) {
        wildcard = &gp;
        continue;
      }
      if (gp.qubits.size() != qubits.size()) continue;
      const bool fwd = std::equal(gp.qubits.begin(), gp.qubits.end(),
                                  qubits.begin());
      const bool rev =
          qubits.size() == 2 && gp.qubits[0] == qubits[1] &&
          gp.qubits[1] == qubits[0];
      if (fwd || rev) return &gp;
    }
    return wildcard;
  }
};

inline void validate_device_spec(const DeviceSpec& spec) {
  if (spec.n_qubits < 1) throw DataError("device needs at least one qubit");
  for (const auto& [a, b] : spec.coupling_map) {
    if (a < 0 || a >= spec.n_qubits || b < 0 || b >= spec.n_qubits)
      throw DataError("coupling edge references a qubit out of range");
    if (a == b) throw DataError("coupling edge cannot be a self loop");
  }
  if (static_cast<int>(spec.qubit_props.size()) != spec.n_qubits)
    throw DataError("qubit_props must have one entry per qubit");
  for (int q = 0; q < spec.n_qubits; ++q) {
    const auto& qp = spec.qubit_props[q];
    if (qp.t1_s <= 0 || qp.t2_s <= 0)
      throw DataError("qubit " + std::to_string(q) +
                      ": T1 and T2 must be positive");
    if (qp.t2_s > 2.0 * qp.t1_s + 1e-15 * qp.t1_s)
      throw DataError("qubit " + std::to_string(q) + ": T2 exceeds 2*T1");
    for (int r = 0; r < 2; ++r) {
      const double sum = qp.readout_confusion(r, 0) + qp.readout_confusion(r, 1);
      if (std::abs(sum - 1.0) > 1e-10 || qp.readout_confusion(r, 0) < 0 ||
          qp.readout_confusion(r, 1) < 0)
        throw DataError("qubit " + std::to_string(q) +
                        ": readout confusion rows must be stochastic");
    }
  }
  for (const auto& gp : spec.gate_props) {
    if (!gate_from_name(gp.gate))
      throw DataError("gate_props references unknown gate `" + gp.gate + "`");
    if (gp.error < 0.0 || gp.error > 1.0)
      throw DataError("gate error probability outside [0,1]");
    if (gp.duration_s < 0.0) throw DataError("gate duration must be >= 0");
    for (const int q : gp.qubits)
      if (q < 0 || q >= spec.n_qubits)
        throw DataError("gate_props qubit out of range");
  }
  for (const auto& g : spec.native_gates)
    if (!gate_from_name(g))
      throw DataError("native gate `" + g + "` is not in the gate alphabet");

  // The device graph must be connected so any circuit can be routed.
  if (spec.n_qubits > 1) {
    const auto adj = spec.adjacency();
    std::vector<bool> seen(spec.n_qubits, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int visited = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (const int v : adj[u])
        if (!seen[v]) {
          seen[v] = true;
          ++visited;
          stack.push_back(v);
        }
    }
    if (visited != spec.n_qubits)
      throw DataError("device coupling map is disconnected");
  }
}

inline nlohmann::ordered_json device_spec_to_json(const DeviceSpec& spec) {
  nlohmann::ordered_json j;
  j["schema_version"] = DeviceSpec::kSchemaVersion;
  j["name"] = spec.name;
  j["n_qubits"] = spec.n_qubits;
  j["coupling_map"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : spec.coupling_map)
    j["coupling_map"].push_back({a, b});
  j["native_gates"] = spec.native_gates;
  j["qubit_props"] = nlohmann::ordered_json::array();
  for (const auto& qp : spec.qubit_props) {
    nlohmann::ordered_json q;
    q["t1_us"] = qp.t1_s * 1e6;
    q["t2_us"] = qp.t2_s * 1e6;
    q["readout_confusion"] = {
        {qp.readout_confusion(0, 0), qp.readout_confusion(0, 1)},
        {qp.readout_confusion(1, 0), qp.readout_confusion(1, 1)}};
    j["qubit_props"].push_back(q);
  }
  j["gate_props"] = nlohmann::ordered_json::array();
  for (const auto& gp : spec.gate_props) {
    nlohmann::ordered_json g;
    g["gate"] = gp.gate;
    g["qubits"] = gp.qubits;
    g["duration_ns"] = gp.duration_s * 1e9;
    g["error"] = gp.error;
    j["gate_props"].push_back(g);
  }
  return j;
}

inline DeviceSpec device_spec_from_json(const nlohmann::json& j) {
  DeviceSpec spec;
  try {
    if (j.at("schema_version").get<int>() != DeviceSpec::kSchemaVersion)
      throw DataError("unsupported device schema version");
    spec.name = j.at("name").get<std::string>();
    spec.n_qubits = j.at("n_qubits").get<int>();
    for (const auto& e : j.at("coupling_map")) {
      if (!e.is_array() || e.size() != 2)
        throw DataError("coupling_map entries must be qubit pairs");
      spec.coupling_map.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    for (const auto& g : j.at("native_gates"))
      spec.native_gates.insert(g.get<std::string>());
    for (const auto& q : j.at("qubit_props")) {
      QubitProps qp;
      qp.t1_s = q.at("t1_us").get<double>() * 1e-6;
      qp.t2_s = q.at("t2_us").get<double>() * 1e-6;
      const auto& rc = q.at("readout_confusion");
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          qp.readout_confusion(r, c) = rc.at(r).at(c).get<double>();
      spec.qubit_props.push_back(qp);
    }
    for (const auto& g : j.at("gate_props")) {
      GateProps gp;
      gp.gate = g.at("gate").get<std::string>();
      gp.qubits = g.at("qubits").get<std::vector<int>>();
      gp.duration_s = g.at("duration_ns").get<double>() * 1e-9;
      gp.error = g.at("error").get<double>();
      spec.gate_props.push_back(gp);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("device spec schema violation: ") + e.what());
  }
  validate_device_spec(spec);
  return spec;
}

inline DeviceSpec load_device_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open device spec: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("device spec is not valid JSON: " + std::string(e.what()));
  }
  return device_spec_from_json(j);
}

inline void save_device_spec(const DeviceSpec& spec,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write device spec: " + path.string());
  out << device_spec_to_json(spec).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Built-in device generators
// ---------------------------------------------------------------------------

inline std::set<std::string> all_gate_names() {
  return {"h", "x", "sx", "rx", "ry", "rz", "rot", "cnot", "cz", "ecr", "swap"};
}

namespace detail {

inline void fill_ideal_props(DeviceSpec& spec) {
  QubitProps qp;
  qp.t1_s = 1.0;  // effectively infinite at circuit time scales
  qp.t2_s = 1.0;
  spec.qubit_props.assign(spec.n_qubits, qp);
  for (const auto& g : spec.native_gates)
    spec.gate_props.push_back(GateProps{g, {}, 0.0, 0.0});
}

}  // namespace detail

/// Idealized device: every pair coupled, every gate native, zero noise.
inline DeviceSpec all_to_all_device(int n_qubits) {
  DeviceSpec spec;
  spec.name = "all-to-all-" + std::to_string(n_qubits);
  spec.n_qubits = n_qubits;
  for (int a = 0; a < n_qubits; ++a)
    for (int b = a + 1; b < n_qubits; ++b) spec.coupling_map.emplace_back(a, b);
  spec.native_gates = all_gate_names();
  detail::fill_ideal_props(spec);
  validate_device_spec(spec);
  return spec;
}

/// Nearest-neighbor line with the {rz, sx, x, ecr} native set and zero noise.
inline DeviceSpec line_device(int n_qubits) {
  DeviceSpec spec;
  spec.name = "line-" + std::to_string(n_qubits);
  spec.n_qubits = n_qubits;
  for (int q = 0; q + 1 < n_qubits; ++q) spec.coupling_map.emplace_back(q, q + 1);
  spec.native_gates = {"rz", "sx", "x", "ecr"};
  detail::fill_ideal_props(spec);
  validate_device_spec(spec);
  return spec;
}

/**
 * 127-qubit heavy-hex-style lattice with the {rz, sx, x, ecr} native set.
 *
 * Seven rows of qubits laid over columns 0..14 (the first row drops column
 * 14, the last drops column 0), joined by bridge qubits every fourth column,
 * the bridge columns alternating offset 0 and offset 2 between consecutive
 * row pairs. Every qubit has degree at most 3. Calibration-style noise
 * figures are drawn from a fixed seed so the generator is reproducible.
 */
inline DeviceSpec heavy_hex_127_device() {
  DeviceSpec spec;
  spec.name = "heavy-hex-127";
  spec.native_gates = {"rz", "sx", "x", "ecr"};

  constexpr int kRows = 7;
  constexpr int kCols = 15;
  // id grid: row-major ids for row qubits, bridges interleaved.
  std::vector<std::vector<int>> row_id(kRows, std::vector<int>(kCols, -1));
  int next = 0;
  std::vector<std::array<int, 2>> bridge_edges;  // filled after ids are known
  for (int r = 0; r < kRows; ++r) {
    const int c_lo = (r == kRows - 1) ? 1 : 0;
    const int c_hi = (r == 0) ? kCols - 2 : kCols - 1;
    for (int c = c_lo; c <= c_hi; ++c) row_id[r][c] = next++;
    if (r + 1 < kRows) {
      // Bridge row between r and r+1.
      const int offset = (r % 2 == 0) ? 0 : 2;
      for (int c = offset; c < kCols; c += 4) {
        const int bridge = next++;
        bridge_edges.push_back({bridge, r * kCols + c});       // column marker
        bridge_edges.push_back({bridge, (r + 1) * kCols + c});  // column marker
      }
    }
  }
  spec.n_qubits = next;

  for (int r = 0; r < kRows; ++r)
    for (int c = 0; c + 1 < kCols; ++c)
      if (row_id[r][c] >= 0 && row_id[r][c + 1] >= 0)
        spec.coupling_map.emplace_back(row_id[r][c], row_id[r][c + 1]);
  for (const auto& [bridge, marker] : bridge_edges) {
    const int r = marker / kCols, c = marker % kCols;
    if (row_id[r][c] >= 0) spec.coupling_map.emplace_back(bridge, row_id[r][c]);
  }

  Rng rng(0x9d5f0c1e2b3a4756ULL);
  for (int q = 0; q < spec.n_qubits; ++q) {
    QubitProps qp;
    qp.t1_s = rng.uniform(150e-6, 350e-6);
    qp.t2_s = qp.t1_s * rng.uniform(0.6, 1.8);
    const double p01 = rng.uniform(0.005, 0.03);
    const double p10 = rng.uniform(0.01, 0.05);
    qp.readout_confusion << 1.0 - p01, p01, p10, 1.0 - p10;
    spec.qubit_props.push_back(qp);
    spec.gate_props.push_back(
        GateProps{"sx", {q}, 36e-9, rng.uniform(1e-4, 6e-4)});
    spec.gate_props.push_back(
        GateProps{"x", {q}, 36e-9, rng.uniform(1e-4, 6e-4)});
  }
  spec.gate_props.push_back(GateProps{"rz", {}, 0.0, 0.0});
  for (const auto& [a, b] : spec.coupling_map)
    spec.gate_props.push_back(
        GateProps{"ecr", {a, b}, 660e-9, rng.uniform(4e-3, 1.2e-2)});

  validate_device_spec(spec);
  return spec;
}

/// Pathological probe device: depolarizing probability 1 after every gate.
inline DeviceSpec fully_depolarizing_device(int n_qubits) {
  DeviceSpec spec = all_to_all_device(n_qubits);
  spec.name = "full-depolarizing-" + std::to_string(n_qubits);
  for (auto& gp : spec.gate_props) gp.error = 1.0;
  validate_device_spec(spec);
  return spec;
}

/// Probe device dominated by relaxation: gate durations far beyond T1.
inline DeviceSpec strong_relaxation_device(int n_qubits) {
  DeviceSpec spec = all_to_all_device(n_qubits);
  spec.name = "strong-relaxation-" + std::to_string(n_qubits);
  for (auto& qp : spec.qubit_props) {
    qp.t1_s = 1e-6;
    qp.t2_s = 1e-6;
  }
  for (auto& gp : spec.gate_props) gp.duration_s = 50e-6;
  validate_device_spec(spec);
  return spec;
}

/// Resolves a CLI device token: a built-in name, or a spec file path.
inline DeviceSpec resolve_device(const std::string& token) {
  const auto parse_n = [&token](const std::string& prefix,
                                int fallback) -> std::optional<int> {
    if (token == prefix) return fallback;
    if (token.rfind(prefix + ":", 0) == 0)
      return std::stoi(token.substr(prefix.size() + 1));
    return std::nullopt;
  };
  if (const auto n = parse_n("all-to-all", 12)) return all_to_all_device(*n);
  if (const auto n = parse_n("line", 8)) return line_device(*n);
  if (token == "heavy-hex-127") return heavy_hex_127_device();
  if (const auto n = parse_n("full-depolarizing", 8))
    return fully_depolarizing_device(*n);
  if (const auto n = parse_n("strong-relaxation", 8))
    return strong_relaxation_device(*n);
  return load_device_spec(token);
}

}  // namespace qmlsim
