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
#include <complex>
#include <optional>
#include <span>
#include <string>

#include "qmlsim/errors.hpp"

namespace qmlsim {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/**
 * Supported gate alphabet.
 *
 * Basis-state convention used throughout the library: qubit 0 is the most
 * significant bit of a basis-state index, so |q0 q1 ... q_{n-1}> maps to the
 * integer whose leading bit is q0. Two-qubit gate matrices below are written
 * in the |ab> ordering of their (first, second) target.
 */
enum class GateKind { H, X, SX, RX, RY, RZ, Rot, CNOT, CZ, ECR, SWAP };

inline int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::ECR:
    case GateKind::SWAP:
      return 2;
    default:
      return 1;
  }
}

inline int gate_param_count(GateKind k) {
  switch (k) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
      return 1;
    case GateKind::Rot:
      return 3;
    default:
      return 0;
  }
}

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "h";
    case GateKind::X: return "x";
    case GateKind::SX: return "sx";
    case GateKind::RX: return "rx";
    case GateKind::RY: return "ry";
    case GateKind::RZ: return "rz";
    case GateKind::Rot: return "rot";
    case GateKind::CNOT: return "cnot";
    case GateKind::CZ: return "cz";
    case GateKind::ECR: return "ecr";
    case GateKind::SWAP: return "swap";
  }
  return "?";
}

inline std::optional<GateKind> gate_from_name(std::string name) {
  for (auto& c : name) c = static_cast<char>(std::tolower(c));
  if (name == "h") return GateKind::H;
  if (name == "x") return GateKind::X;
  if (name == "sx") return GateKind::SX;
  if (name == "rx") return GateKind::RX;
  if (name == "ry") return GateKind::RY;
  if (name == "rz") return GateKind::RZ;
  if (name == "rot") return GateKind::Rot;
  if (name == "cnot" || name == "cx") return GateKind::CNOT;
  if (name == "cz") return GateKind::CZ;
  if (name == "ecr") return GateKind::ECR;
  if (name == "swap") return GateKind::SWAP;
  return std::nullopt;
}

inline Eigen::Matrix2cd rx_matrix(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Eigen::Matrix2cd m;
  m << cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0);
  return m;
}

inline Eigen::Matrix2cd ry_matrix(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Eigen::Matrix2cd m;
  m << cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0);
  return m;
}

inline Eigen::Matrix2cd rz_matrix(double theta) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::exp(cplx(0, -theta / 2));
  m(1, 1) = std::exp(cplx(0, theta / 2));
  return m;
}

/// Single-qubit gate matrix. `params` length must match gate_param_count().
inline Eigen::Matrix2cd gate_matrix_1q(GateKind k,
                                       std::span<const double> params = {}) {
  if (static_cast<int>(params.size()) != gate_param_count(k))
    throw Error(std::string("gate ") + gate_name(k) + ": expected " +
                std::to_string(gate_param_count(k)) + " parameters, got " +
                std::to_string(params.size()));
  Eigen::Matrix2cd m;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  switch (k) {
    case GateKind::H:
      m << inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2;
      return m;
    case GateKind::X:
      m << 0, 1, 1, 0;
      return m;
    case GateKind::SX:
      m << cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5);
      return m;
    case GateKind::RX:
      return rx_matrix(params[0]);
    case GateKind::RY:
      return ry_matrix(params[0]);
    case GateKind::RZ:
      return rz_matrix(params[0]);
    case GateKind::Rot:
      // Rot(a, b, c) applies RZ(a) first, then RY(b), then RZ(c).
      return rz_matrix(params[2]) * ry_matrix(params[1]) * rz_matrix(params[0]);
    default:
      throw Error(std::string("gate ") + gate_name(k) + " is not single-qubit");
  }
}

/// Two-qubit gate matrix in the |ab> basis of its (first, second) target.
inline Eigen::Matrix4cd gate_matrix_2q(GateKind k) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  switch (k) {
    case GateKind::CNOT:
      m(0, 0) = 1;
      m(1, 1) = 1;
      m(2, 3) = 1;
      m(3, 2) = 1;
      return m;
    case GateKind::CZ:
      m(0, 0) = 1;
      m(1, 1) = 1;
      m(2, 2) = 1;
      m(3, 3) = -1;
      return m;
    case GateKind::SWAP:
      m(0, 0) = 1;
      m(1, 2) = 1;
      m(2, 1) = 1;
      m(3, 3) = 1;
      return m;
    case GateKind::ECR: {
      // Echoed cross-resonance: (IX - XY) / sqrt(2), first target as control.
      const double r = 1.0 / std::sqrt(2.0);
      m(0, 1) = r;
      m(0, 3) = cplx(0, r);
      m(1, 0) = r;
      m(1, 2) = cplx(0, -r);
      m(2, 1) = cplx(0, r);
      m(2, 3) = r;
      m(3, 0) = cplx(0, -r);
      m(3, 2) = r;
      return m;
    }
    default:
      throw Error(std::string("gate ") + gate_name(k) + " is not two-qubit");
  }
}

}  // namespace qmlsim
