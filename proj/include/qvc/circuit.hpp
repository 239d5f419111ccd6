#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qvc/gates.hpp"

namespace qvc {

// Plain-text gate list.  File format: one gate per line, `GATE q` or
// `GATE q1,q2`; lines starting with '#' are comments, blank lines ignored.
// All gates in one circuit must share a local dimension.
struct Circuit {
  std::vector<GateOp> ops;

  int local_dimension() const {
    return ops.empty() ? 2 : gate_dimension(ops.front().kind);
  }

  int num_qudits() const {
    int hi = -1;
    for (const auto& op : ops)
      for (int i = 0; i < gate_arity(op.kind); ++i) hi = std::max(hi, op.targets[i]);
    return hi + 1;
  }

  void push(GateKind k, int q) { push_checked(GateOp(k, q)); }
  void push(GateKind k, int q1, int q2) { push_checked(GateOp(k, q1, q2)); }

  void push_checked(const GateOp& op) {
    if (!ops.empty() && gate_dimension(op.kind) != local_dimension())
      throw std::invalid_argument("Circuit: mixed local dimensions");
    ops.push_back(op);
  }

  // gate-by-gate inverse in reversed order
  Circuit inverse() const {
    Circuit inv;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it)
      inv.ops.push_back(invert_op(*it));
    return inv;
  }

  template <typename Engine>
  void apply_to(Engine& engine) const {
    for (const auto& op : ops) engine.apply_gate(op);
  }

  std::string serialize(const std::string& header = "") const {
    std::ostringstream out;
    if (!header.empty()) {
      std::istringstream lines(header);
      std::string line;
      while (std::getline(lines, line)) out << "# " << line << "\n";
    }
    for (const auto& op : ops) {
      out << gate_name(op.kind) << ' ' << op.targets[0];
      if (gate_arity(op.kind) == 2) out << ',' << op.targets[1];
      out << "\n";
    }
    return out.str();
  }

  static Circuit parse(const std::string& text) {
    Circuit c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::size_t b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      std::istringstream ls(line.substr(b));
      std::string name, rest;
      ls >> name >> rest;
      if (rest.empty()) throw parse_error(lineno, "missing targets");
      GateKind kind = gate_from_name(name);
      int q1 = -1, q2 = -1;
      std::size_t comma = rest.find(',');
      try {
        if (comma == std::string::npos) {
          q1 = std::stoi(rest);
        } else {
          q1 = std::stoi(rest.substr(0, comma));
          q2 = std::stoi(rest.substr(comma + 1));
        }
      } catch (const std::exception&) {
        throw parse_error(lineno, "bad target list: " + rest);
      }
      if (gate_arity(kind) == 1) {
        if (comma != std::string::npos) throw parse_error(lineno, "gate takes one target");
        c.push_checked(GateOp(kind, q1));
      } else {
        if (comma == std::string::npos) throw parse_error(lineno, "gate needs two targets");
        c.push_checked(GateOp(kind, q1, q2));
      }
    }
    return c;
  }

  static Circuit load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open circuit file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

 private:
  static std::invalid_argument parse_error(int lineno, const std::string& msg) {
    return std::invalid_argument("circuit line " + std::to_string(lineno) + ": " + msg);
  }

  static GateOp invert_op(const GateOp& op) {
    GateKind k = op.kind;
    switch (k) {
      case GateKind::Shift: k = GateKind::Shift2; break;
      case GateKind::Shift2: k = GateKind::Shift; break;
      case GateKind::Phase: k = GateKind::Phase2; break;
      case GateKind::Phase2: k = GateKind::Phase; break;
      case GateKind::Sum: k = GateKind::Diff; break;
      case GateKind::Diff: k = GateKind::Sum; break;
      case GateKind::Fourier: k = GateKind::FourierInv; break;
      case GateKind::FourierInv: k = GateKind::Fourier; break;
      default: break;  // X, Y, Z, H, CNOT, CZ, SWAP are self-inverse
    }
    GateOp out = op;
    out.kind = k;
    return out;
  }
};

}  // namespace qvc
