#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qvc {

// n-qudit generalized Pauli operator over local dimension d (2 or 3):
//
//   P = w^phase * prod_q  X_q^{x_exp[q]} Z_q^{z_exp[q]},   w = exp(i*pi/d)
//
// with all exponents in Z_d and the global phase exponent in Z_{2d}.
// For d = 2 this reproduces I, X, Z and Y = i X Z; for d = 3 the shift/phase
// operators X|j> = |j+1 mod 3>, Z|j> = exp(2 pi i j / 3)|j>.
struct PauliOperator {
  int n = 0;
  int d = 2;
  std::vector<std::uint8_t> x_exp;
  std::vector<std::uint8_t> z_exp;
  int phase = 0;  // exponent of w = exp(i*pi/d), reduced mod 2d

  PauliOperator() = default;
  PauliOperator(int n_, int d_ = 2)
      : n(n_), d(d_), x_exp(n_, 0), z_exp(n_, 0), phase(0) {
    if (d_ != 2 && d_ != 3) throw std::invalid_argument("PauliOperator: d must be 2 or 3");
    if (n_ < 0) throw std::invalid_argument("PauliOperator: negative size");
  }

  static PauliOperator identity(int n, int d = 2) { return PauliOperator(n, d); }

  static PauliOperator single(int n, int qudit, int x, int z, int d = 2, int phase = 0) {
    PauliOperator p(n, d);
    if (qudit < 0 || qudit >= n) throw std::out_of_range("PauliOperator::single: qudit index");
    p.x_exp[qudit] = static_cast<std::uint8_t>(((x % d) + d) % d);
    p.z_exp[qudit] = static_cast<std::uint8_t>(((z % d) + d) % d);
    p.phase = ((phase % (2 * d)) + 2 * d) % (2 * d);
    return p;
  }

  static PauliOperator x_on(int n, int q, int d = 2) { return single(n, q, 1, 0, d); }
  static PauliOperator z_on(int n, int q, int d = 2) { return single(n, q, 0, 1, d); }
  // qubit Y = i X Z
  static PauliOperator y_on(int n, int q) { return single(n, q, 1, 1, 2, 1); }

  bool is_identity() const {
    for (int q = 0; q < n; ++q)
      if (x_exp[q] != 0 || z_exp[q] != 0) return false;
    return true;
  }

  int weight() const {
    int w = 0;
    for (int q = 0; q < n; ++q)
      if (x_exp[q] != 0 || z_exp[q] != 0) ++w;
    return w;
  }

  // Composition this * other (apply `other` first when acting on kets).
  // Z^b X^c = omega^{bc} X^c Z^b with omega = w^2 gives the phase bookkeeping.
  PauliOperator operator*(const PauliOperator& other) const {
    require_compatible(other);
    PauliOperator out(n, d);
    int ph = phase + other.phase;
    for (int q = 0; q < n; ++q) {
      ph += 2 * static_cast<int>(z_exp[q]) * static_cast<int>(other.x_exp[q]);
      out.x_exp[q] = static_cast<std::uint8_t>((x_exp[q] + other.x_exp[q]) % d);
      out.z_exp[q] = static_cast<std::uint8_t>((z_exp[q] + other.z_exp[q]) % d);
    }
    out.phase = ph % (2 * d);
    return out;
  }

  PauliOperator adjoint() const {
    PauliOperator out(n, d);
    int ph = -phase;
    for (int q = 0; q < n; ++q) {
      // (X^a Z^b)^dag = Z^-b X^-a = omega^{ab} X^-a Z^-b
      ph += 2 * static_cast<int>(x_exp[q]) * static_cast<int>(z_exp[q]);
      out.x_exp[q] = static_cast<std::uint8_t>((d - x_exp[q]) % d);
      out.z_exp[q] = static_cast<std::uint8_t>((d - z_exp[q]) % d);
    }
    out.phase = ((ph % (2 * d)) + 2 * d) % (2 * d);
    return out;
  }

  // P Q = omega^{sym(P,Q)} Q P; zero means the operators commute.
  int commutation_exponent(const PauliOperator& other) const {
    require_compatible(other);
    int s = 0;
    for (int q = 0; q < n; ++q)
      s += static_cast<int>(z_exp[q]) * static_cast<int>(other.x_exp[q]) -
           static_cast<int>(x_exp[q]) * static_cast<int>(other.z_exp[q]);
    return ((s % d) + d) % d;
  }

  bool commutes_with(const PauliOperator& other) const {
    return commutation_exponent(other) == 0;
  }

  std::complex<double> phase_factor() const {
    double angle = 3.141592653589793 * static_cast<double>(phase) / static_cast<double>(d);
    return {std::cos(angle), std::sin(angle)};
  }

  bool operator==(const PauliOperator& o) const {
    return n == o.n && d == o.d && phase == o.phase && x_exp == o.x_exp && z_exp == o.z_exp;
  }

  // e.g. "+XIZ" for qubits, "+X1Z2.I.Z1" style for qudits
  std::string to_string() const {
    std::string s;
    switch (phase % (2 * d)) {
      case 0: s = "+"; break;
      default: s = "w^" + std::to_string(phase) + " "; break;
    }
    for (int q = 0; q < n; ++q) {
      int x = x_exp[q], z = z_exp[q];
      if (d == 2) {
        if (x == 0 && z == 0) s += 'I';
        else if (x == 1 && z == 0) s += 'X';
        else if (x == 0 && z == 1) s += 'Z';
        else s += 'Y';  // up to phase
      } else {
        if (q) s += '.';
        if (x == 0 && z == 0) s += "I";
        else {
          if (x) s += "X" + std::to_string(x);
          if (z) s += "Z" + std::to_string(z);
        }
      }
    }
    return s;
  }

 private:
  void require_compatible(const PauliOperator& other) const {
    if (n != other.n || d != other.d)
      throw std::invalid_argument("PauliOperator: size or dimension mismatch");
  }
};

// Bell-pair label in (z-bit, x-bit) encoding:
//   PhiPlus=(0,0)  PhiMinus=(1,0)  PsiPlus=(0,1)  PsiMinus=(1,1)
// The z-bit flips when Z is applied to one half, the x-bit when X is applied.
enum class BellLabel : std::uint8_t {
  PhiPlus = 0,
  PhiMinus = 1,
  PsiPlus = 2,
  PsiMinus = 3,
};

inline BellLabel bell_label_from_bits(bool z_bit, bool x_bit) {
  return static_cast<BellLabel>((z_bit ? 1 : 0) | (x_bit ? 2 : 0));
}
inline bool bell_z_bit(BellLabel l) { return (static_cast<int>(l) & 1) != 0; }
inline bool bell_x_bit(BellLabel l) { return (static_cast<int>(l) & 2) != 0; }

inline const char* bell_label_name(BellLabel l) {
  switch (l) {
    case BellLabel::PhiPlus: return "Phi+";
    case BellLabel::PhiMinus: return "Phi-";
    case BellLabel::PsiPlus: return "Psi+";
    case BellLabel::PsiMinus: return "Psi-";
  }
  return "?";
}

}  // namespace qvc
