#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qvc/dense_state.hpp"
#include "qvc/gates.hpp"
#include "qvc/pauli.hpp"
#include "qvc/rng.hpp"

namespace qvc {

// Aaronson-Gottesman stabilizer tableau with destabilizers, packed 64 bits
// per word.  Rows 0..n-1 are destabilizers, rows n..2n-1 stabilizers; row i
// represents (-1)^sign * prod_j P_j with P encoded by (x,z) bits and
// Y = i X Z.  Gate application is O(n), measurement O(n^2).
class StabilizerState {
 public:
  explicit StabilizerState(int n) : n_(n), words_((n + 63) / 64) {
    if (n <= 0) throw std::invalid_argument("StabilizerState: need at least one qubit");
    x_.assign(2 * static_cast<std::size_t>(n) * words_, 0);
    z_.assign(2 * static_cast<std::size_t>(n) * words_, 0);
    sign_.assign(2 * static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
      set_x(i, i, true);          // destabilizer i = X_i
      set_z(n + i, i, true);      // stabilizer i = Z_i
    }
  }

  int num_qubits() const { return n_; }

  // ---- gates -------------------------------------------------------------

  void apply_gate(const GateOp& op) {
    if (gate_dimension(op.kind) != 2)
      throw std::invalid_argument("stabilizer engine: qubit gates only");
    for (int i = 0; i < gate_arity(op.kind); ++i) check_index(op.targets[i]);
    switch (op.kind) {
      case GateKind::X: gate_x(op.targets[0]); break;
      case GateKind::Y: gate_y(op.targets[0]); break;
      case GateKind::Z: gate_z(op.targets[0]); break;
      case GateKind::H: gate_h(op.targets[0]); break;
      case GateKind::CNOT: gate_cnot(op.targets[0], op.targets[1]); break;
      case GateKind::CZ:
        gate_h(op.targets[1]);
        gate_cnot(op.targets[0], op.targets[1]);
        gate_h(op.targets[1]);
        break;
      case GateKind::SWAP:
        gate_cnot(op.targets[0], op.targets[1]);
        gate_cnot(op.targets[1], op.targets[0]);
        gate_cnot(op.targets[0], op.targets[1]);
        break;
      default:
        throw std::invalid_argument("stabilizer engine: unsupported gate");
    }
  }

  void apply_gate(GateKind k, int q) { apply_gate(GateOp(k, q)); }
  void apply_gate(GateKind k, int q1, int q2) { apply_gate(GateOp(k, q1, q2)); }

  void apply_pauli(const PauliOperator& p) {
    PauliRow row = to_row(p);
    // conjugating the tableau by a Pauli only flips row signs
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i)
      if (anticommutes(i, row)) sign_[i] ^= 1;
  }

  // ---- measurement -------------------------------------------------------

  // Measure a Hermitian Pauli observable; returns 0 for eigenvalue +1 and
  // 1 for -1, collapsing the state on a random outcome.
  int measure_pauli(const PauliOperator& p, RngStream& rng) {
    PauliRow row = to_row(p);
    int pivot = -1;
    for (int i = n_; i < 2 * n_; ++i)
      if (anticommutes(i, row)) { pivot = i; break; }
    if (pivot < 0) return deterministic_outcome(row);

    for (int i = 0; i < 2 * n_; ++i)
      if (i != pivot && anticommutes(i, row)) rowsum(i, pivot);
    copy_row(pivot - n_, pivot);  // old stabilizer becomes the destabilizer
    int outcome = rng.bit() ? 1 : 0;
    write_row(pivot, row, row.sign ^ (outcome != 0));
    return outcome;
  }

  // Sign of P when P is (up to sign) a stabilizer element; nullopt when the
  // measurement would be random.  Does not disturb the state.
  std::optional<int> deterministic_sign(const PauliOperator& p) const {
    PauliRow row = to_row(p);
    for (int i = n_; i < 2 * n_; ++i)
      if (anticommutes(i, row)) return std::nullopt;
    return const_cast<StabilizerState*>(this)->deterministic_outcome(row);
  }

  // Identify which Bell state qubits (a, b) are in, assuming the pair is
  // unentangled with the rest so both Z_aZ_b and X_aX_b are deterministic.
  BellLabel bell_identify(int a, int b) const {
    auto zz = deterministic_sign(two_qubit_obs(a, b, false));
    auto xx = deterministic_sign(two_qubit_obs(a, b, true));
    if (!zz || !xx)
      throw std::invalid_argument("bell_identify: pair is not in a definite Bell state");
    return bell_label_from_bits(*xx != 0, *zz != 0);
  }

  // Bell-basis measurement of qubits (a, b): collapses via the commuting
  // observables Z_aZ_b and X_aX_b.
  BellLabel measure_bell(int a, int b, RngStream& rng) {
    int zz = measure_pauli(two_qubit_obs(a, b, false), rng);
    int xx = measure_pauli(two_qubit_obs(a, b, true), rng);
    return bell_label_from_bits(xx != 0, zz != 0);
  }

  PauliOperator stabilizer_row(int i) const { return row_to_pauli(n_ + i); }
  PauliOperator destabilizer_row(int i) const { return row_to_pauli(i); }

  // ---- conversion --------------------------------------------------------

  DenseState to_dense() const {
    if (static_cast<std::size_t>(n_) > 20)
      throw std::invalid_argument("to_dense: register too large");
    // locate one computational-basis state in the support by measuring a copy
    StabilizerState copy = *this;
    RngStream probe(0x51ab1715);
    std::size_t support = 0;
    for (int q = 0; q < n_; ++q) {
      int bit = copy.measure_pauli(PauliOperator::z_on(n_, q), probe);
      if (bit) support |= std::size_t(1) << q;
    }
    DenseState v = DenseState::basis(n_, 2, support);
    // project onto the joint +1 eigenspace: v <- prod_i (I + S_i)/2 v
    for (int i = 0; i < n_; ++i) {
      DenseState sv = v;
      sv.apply_pauli(stabilizer_row(i));
      std::vector<cplx> amps(v.dim());
      for (std::size_t k = 0; k < v.dim(); ++k)
        amps[k] = 0.5 * (v.amplitudes()[k] + sv.amplitudes()[k]);
      double nrm = 0;
      for (auto& a : amps) nrm += std::norm(a);
      if (nrm < 1e-300) throw std::runtime_error("to_dense: inconsistent tableau");
      double s = 1.0 / std::sqrt(nrm);
      for (auto& a : amps) a *= s;
      v = DenseState::from_amplitudes(n_, 2, std::move(amps));
    }
    v.fix_global_phase();
    return v;
  }

 private:
  struct PauliRow {
    std::vector<std::uint64_t> x, z;
    int sign;  // 0 or 1
  };

  // Conjugation updates act column-wise on every row at once.
  void gate_x(int q) {
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i)
      sign_[i] ^= get_z(i, q);
  }
  void gate_z(int q) {
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i)
      sign_[i] ^= get_x(i, q);
  }
  void gate_y(int q) {
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i)
      sign_[i] ^= get_x(i, q) ^ get_z(i, q);
  }
  void gate_h(int q) {
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i) {
      bool x = get_x(i, q), z = get_z(i, q);
      sign_[i] ^= x & z;
      set_x(i, q, z);
      set_z(i, q, x);
    }
  }
  void gate_cnot(int c, int t) {
    for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(n_); ++i) {
      bool xc = get_x(i, c), zc = get_z(i, c);
      bool xt = get_x(i, t), zt = get_z(i, t);
      sign_[i] ^= xc & zt & (xt ^ zc ^ 1);
      set_x(i, t, xt ^ xc);
      set_z(i, c, zc ^ zt);
    }
  }

  // ---- bit plumbing ------------------------------------------------------

  std::size_t base(std::size_t row) const { return row * words_; }
  bool get_x(std::size_t row, int q) const {
    return (x_[base(row) + q / 64] >> (q % 64)) & 1;
  }
  bool get_z(std::size_t row, int q) const {
    return (z_[base(row) + q / 64] >> (q % 64)) & 1;
  }
  void set_x(std::size_t row, int q, bool v) {
    std::uint64_t m = std::uint64_t(1) << (q % 64);
    if (v) x_[base(row) + q / 64] |= m; else x_[base(row) + q / 64] &= ~m;
  }
  void set_z(std::size_t row, int q, bool v) {
    std::uint64_t m = std::uint64_t(1) << (q % 64);
    if (v) z_[base(row) + q / 64] |= m; else z_[base(row) + q / 64] &= ~m;
  }

  PauliOperator two_qubit_obs(int a, int b, bool use_x) const {
    check_index(a);
    check_index(b);
    PauliOperator p(n_, 2);
    if (use_x) { p.x_exp[a] = 1; p.x_exp[b] = 1; }
    else       { p.z_exp[a] = 1; p.z_exp[b] = 1; }
    return p;
  }

  void check_index(int q) const {
    if (q < 0 || q >= n_) throw std::out_of_range("qubit index out of range");
  }

  PauliRow to_row(const PauliOperator& p) const {
    if (p.n != n_ || p.d != 2)
      throw std::invalid_argument("stabilizer engine: malformed observable");
    PauliRow row;
    row.x.assign(words_, 0);
    row.z.assign(words_, 0);
    int xz = 0;
    for (int q = 0; q < n_; ++q) {
      if (p.x_exp[q]) row.x[q / 64] |= std::uint64_t(1) << (q % 64);
      if (p.z_exp[q]) row.z[q / 64] |= std::uint64_t(1) << (q % 64);
      xz += p.x_exp[q] * p.z_exp[q];
    }
    // operator = i^phase X^x Z^z; Hermitian canonical form carries i^{xz}
    int rel = ((p.phase - xz) % 4 + 4) % 4;
    if (rel % 2 != 0)
      throw std::invalid_argument("stabilizer engine: observable is not Hermitian");
    row.sign = rel == 2 ? 1 : 0;
    return row;
  }

  PauliOperator row_to_pauli(std::size_t row) const {
    PauliOperator p(n_, 2);
    int xz = 0;
    for (int q = 0; q < n_; ++q) {
      p.x_exp[q] = get_x(row, q);
      p.z_exp[q] = get_z(row, q);
      xz += p.x_exp[q] * p.z_exp[q];
    }
    p.phase = ((sign_[row] ? 2 : 0) + xz) % 4;
    return p;
  }

  bool anticommutes(std::size_t row, const PauliRow& r) const {
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < words_; ++w)
      acc ^= (x_[base(row) + w] & r.z[w]) ^ (z_[base(row) + w] & r.x[w]);
    return std::popcount(acc) & 1;
  }

  void copy_row(std::size_t dst, std::size_t src) {
    for (std::size_t w = 0; w < words_; ++w) {
      x_[base(dst) + w] = x_[base(src) + w];
      z_[base(dst) + w] = z_[base(src) + w];
    }
    sign_[dst] = sign_[src];
  }

  void write_row(std::size_t row, const PauliRow& r, int sign) {
    for (std::size_t w = 0; w < words_; ++w) {
      x_[base(row) + w] = r.x[w];
      z_[base(row) + w] = r.z[w];
    }
    sign_[row] = sign & 1;
  }

  // phase exponent (mod 4, in units of i) of the product R_a * R_b restricted
  // to the per-qubit Hermitian forms; counts +1/-1 contributions bitwise
  static int product_phase_words(const std::uint64_t* x1, const std::uint64_t* z1,
                                 const std::uint64_t* x2, const std::uint64_t* z2,
                                 std::size_t words) {
    int cnt = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t a = x1[w], b = z1[w], c = x2[w], d = z2[w];
      std::uint64_t plus = (a & ~b & c & d) | (~a & b & c & ~d) | (a & b & ~c & d);
      std::uint64_t minus = (a & ~b & ~c & d) | (~a & b & c & d) | (a & b & c & ~d);
      cnt += std::popcount(plus) - std::popcount(minus);
    }
    return ((cnt % 4) + 4) % 4;
  }

  // row h *= row i (both Hermitian and commuting, so the result is Hermitian)
  void rowsum(std::size_t h, std::size_t i) {
    int g = product_phase_words(&x_[base(i)], &z_[base(i)], &x_[base(h)], &z_[base(h)], words_);
    int r = 2 * sign_[h] + 2 * sign_[i] + g;
    sign_[h] = ((r % 4) + 4) % 4 == 2 ? 1 : 0;
    for (std::size_t w = 0; w < words_; ++w) {
      x_[base(h) + w] ^= x_[base(i) + w];
      z_[base(h) + w] ^= z_[base(i) + w];
    }
  }

  int deterministic_outcome(const PauliRow& row) {
    // P = +/- product of stabilizers i where destabilizer i anticommutes
    std::vector<std::uint64_t> ax(words_, 0), az(words_, 0);
    int phase = 0;
    for (int i = 0; i < n_; ++i) {
      if (!anticommutes(i, row)) continue;
      std::size_t s = n_ + i;
      phase += product_phase_words(&ax[0], &az[0], &x_[base(s)], &z_[base(s)], words_);
      phase += 2 * sign_[s];
      for (std::size_t w = 0; w < words_; ++w) {
        ax[w] ^= x_[base(s) + w];
        az[w] ^= z_[base(s) + w];
      }
    }
    for (std::size_t w = 0; w < words_; ++w)
      if (ax[w] != row.x[w] || az[w] != row.z[w])
        throw std::invalid_argument("measure_pauli: observable outside the stabilizer span");
    int rel = ((phase % 4) + 4) % 4;
    if (rel % 2 != 0) throw std::runtime_error("measure_pauli: phase bookkeeping error");
    int acc_sign = rel == 2 ? 1 : 0;
    return acc_sign ^ row.sign;
  }

  int n_;
  std::size_t words_;
  std::vector<std::uint64_t> x_;
  std::vector<std::uint64_t> z_;
  std::vector<std::uint8_t> sign_;
};

}  // namespace qvc
