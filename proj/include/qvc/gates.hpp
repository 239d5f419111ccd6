#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qvc {

// Named gates understood by the engines.  The qubit set is Clifford; the
// qutrit set is the generalized-Clifford analogue (shift/phase/sum/difference
// and the d=3 discrete Fourier transform).
enum class GateKind {
  // qubit (d = 2)
  X,
  Y,
  Z,
  H,
  CNOT,
  CZ,
  SWAP,
  // qutrit (d = 3)
  Shift,       // X|j> = |j+1>
  Shift2,      // X^2
  Phase,       // Z|j> = w^j |j>, w = exp(2 pi i/3)
  Phase2,      // Z^2
  Sum,         // |i,j> -> |i, j+i>
  Diff,        // |i,j> -> |i, j-i>
  Fourier,     // F|j> = 3^{-1/2} sum_k w^{jk} |k>
  FourierInv,  // F^dagger
};

inline int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::SWAP:
    case GateKind::Sum:
    case GateKind::Diff:
      return 2;
    default:
      return 1;
  }
}

inline int gate_dimension(GateKind k) {
  switch (k) {
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::H:
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::SWAP:
      return 2;
    default:
      return 3;
  }
}

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CZ: return "CZ";
    case GateKind::SWAP: return "SWAP";
    case GateKind::Shift: return "SHIFT";
    case GateKind::Shift2: return "SHIFT2";
    case GateKind::Phase: return "PHASE";
    case GateKind::Phase2: return "PHASE2";
    case GateKind::Sum: return "SUM";
    case GateKind::Diff: return "DIFF";
    case GateKind::Fourier: return "FOURIER";
    case GateKind::FourierInv: return "FOURIERINV";
  }
  return "?";
}

inline GateKind gate_from_name(const std::string& name) {
  if (name == "X") return GateKind::X;
  if (name == "Y") return GateKind::Y;
  if (name == "Z") return GateKind::Z;
  if (name == "H") return GateKind::H;
  if (name == "CNOT") return GateKind::CNOT;
  if (name == "CZ") return GateKind::CZ;
  if (name == "SWAP") return GateKind::SWAP;
  if (name == "SHIFT") return GateKind::Shift;
  if (name == "SHIFT2") return GateKind::Shift2;
  if (name == "PHASE") return GateKind::Phase;
  if (name == "PHASE2") return GateKind::Phase2;
  if (name == "SUM") return GateKind::Sum;
  if (name == "DIFF") return GateKind::Diff;
  if (name == "FOURIER") return GateKind::Fourier;
  if (name == "FOURIERINV") return GateKind::FourierInv;
  throw std::invalid_argument("unknown gate name: " + name);
}

struct GateOp {
  GateKind kind;
  std::array<int, 2> targets{-1, -1};

  GateOp(GateKind k, int q) : kind(k), targets{q, -1} {
    if (gate_arity(k) != 1) throw std::invalid_argument("gate needs two targets");
  }
  GateOp(GateKind k, int q1, int q2) : kind(k), targets{q1, q2} {
    if (gate_arity(k) != 2) throw std::invalid_argument("gate takes one target");
    if (q1 == q2) throw std::invalid_argument("two-qudit gate targets must differ");
  }
};

}  // namespace qvc
