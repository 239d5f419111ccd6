#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "qvc/gates.hpp"
#include "qvc/pauli.hpp"
#include "qvc/rng.hpp"

namespace qvc {

using cplx = std::complex<double>;

inline constexpr double kAmpTol = 1e-9;   // amplitude equality
inline constexpr double kNormTol = 1e-7;  // normalization drift after long circuits

// Complex amplitude vector over n qudits of local dimension d (2 or 3).
// Register indices are little-endian into the amplitude vector: qudit q holds
// digit (index / d^q) mod d.
class DenseState {
 public:
  static constexpr std::size_t kCapQubits = std::size_t(1) << 14;  // 2^14
  static constexpr std::size_t kCapQutrits = 19683;                // 3^9

  DenseState(int n, int d = 2, std::size_t cap_override = 0)
      : n_(n), d_(d), cap_override_(cap_override) {
    if (d != 2 && d != 3) throw std::invalid_argument("DenseState: d must be 2 or 3");
    if (n < 0) throw std::invalid_argument("DenseState: negative size");
    std::size_t dim = 1;
    for (int q = 0; q < n; ++q) {
      dim *= static_cast<std::size_t>(d);
      if (dim > cap()) throw std::invalid_argument("DenseState: dimension exceeds cap");
    }
    amp_.assign(dim, cplx(0.0, 0.0));
    amp_[0] = 1.0;
  }

  static DenseState basis(int n, int d, std::size_t index) {
    DenseState s(n, d);
    if (index >= s.dim()) throw std::out_of_range("DenseState::basis: index");
    s.amp_[0] = 0.0;
    s.amp_[index] = 1.0;
    return s;
  }

  static DenseState from_amplitudes(int n, int d, std::vector<cplx> amps,
                                    std::size_t cap_override = 0) {
    DenseState s(n, d, cap_override);
    if (amps.size() != s.dim()) throw std::invalid_argument("from_amplitudes: size mismatch");
    s.amp_ = std::move(amps);
    s.check_norm();
    return s;
  }

  // Haar-ish random pure state (gaussian amplitudes, normalized)
  static DenseState random(int n, int d, RngStream& rng) {
    DenseState s(n, d);
    for (auto& a : s.amp_) a = cplx(rng.gaussian(), rng.gaussian());
    s.normalize();
    return s;
  }

  int num_qudits() const { return n_; }
  int dimension() const { return d_; }
  std::size_t dim() const { return amp_.size(); }
  const std::vector<cplx>& amplitudes() const { return amp_; }
  cplx amplitude(std::size_t i) const { return amp_.at(i); }

  std::size_t cap() const {
    if (cap_override_ != 0) return cap_override_;
    return d_ == 2 ? kCapQubits : kCapQutrits;
  }

  // Raise (or lower) the dimension cap for this state; 0 restores the default.
  void set_cap(std::size_t cap) { cap_override_ = cap; }

  int digit(std::size_t index, int qudit) const {
    return static_cast<int>((index / stride(qudit)) % static_cast<std::size_t>(d_));
  }

  std::size_t stride(int qudit) const {
    std::size_t s = 1;
    for (int q = 0; q < qudit; ++q) s *= static_cast<std::size_t>(d_);
    return s;
  }

  // ---- gates -------------------------------------------------------------

  void apply_gate(const GateOp& op) {
    if (gate_dimension(op.kind) != d_)
      throw std::invalid_argument("apply_gate: gate dimension does not match state");
    for (int i = 0; i < gate_arity(op.kind); ++i) check_index(op.targets[i]);
    switch (op.kind) {
      case GateKind::X: permute1(op.targets[0], [](int j) { return j ^ 1; }); break;
      case GateKind::Z:
        phase1(op.targets[0], [](int j) { return j == 1 ? cplx(-1, 0) : cplx(1, 0); });
        break;
      case GateKind::Y: {
        int q = op.targets[0];
        // Y = i X Z
        phase1(q, [](int j) { return j == 1 ? cplx(-1, 0) : cplx(1, 0); });
        permute1(q, [](int j) { return j ^ 1; });
        scale(cplx(0, 1));
        break;
      }
      case GateKind::H: {
        static const double s = 0.7071067811865476;
        apply_matrix1(op.targets[0], {cplx(s), cplx(s), cplx(s), cplx(-s)});
        break;
      }
      case GateKind::CNOT:
      case GateKind::Sum:
        sum_gate(op.targets[0], op.targets[1], 1);
        break;
      case GateKind::Diff:
        sum_gate(op.targets[0], op.targets[1], d_ - 1);
        break;
      case GateKind::CZ: {
        int c = op.targets[0], t = op.targets[1];
        for (std::size_t i = 0; i < amp_.size(); ++i)
          if (digit(i, c) == 1 && digit(i, t) == 1) amp_[i] = -amp_[i];
        break;
      }
      case GateKind::SWAP: {
        int a = op.targets[0], b = op.targets[1];
        for (std::size_t i = 0; i < amp_.size(); ++i) {
          int da = digit(i, a), db = digit(i, b);
          if (da < db) {
            std::size_t j = i + (db - da) * stride(a) - (db - da) * stride(b);
            std::swap(amp_[i], amp_[j]);
          }
        }
        break;
      }
      case GateKind::Shift: permute1(op.targets[0], [this](int j) { return (j + 1) % d_; }); break;
      case GateKind::Shift2: permute1(op.targets[0], [this](int j) { return (j + 2) % d_; }); break;
      case GateKind::Phase:
        phase1(op.targets[0], [](int j) { return omega3(j); });
        break;
      case GateKind::Phase2:
        phase1(op.targets[0], [](int j) { return omega3(2 * j); });
        break;
      case GateKind::Fourier: fourier1(op.targets[0], +1); break;
      case GateKind::FourierInv: fourier1(op.targets[0], -1); break;
    }
  }

  void apply_gate(GateKind k, int q) { apply_gate(GateOp(k, q)); }
  void apply_gate(GateKind k, int q1, int q2) { apply_gate(GateOp(k, q1, q2)); }

  // General k-qudit unitary, row-major (d^k x d^k), acting on `targets`
  // (targets[0] is the least significant digit of the matrix index).
  void apply_matrix(std::span<const cplx> matrix, std::span<const int> targets) {
    const int k = static_cast<int>(targets.size());
    std::size_t dk = 1;
    for (int i = 0; i < k; ++i) {
      check_index(targets[i]);
      dk *= static_cast<std::size_t>(d_);
    }
    if (matrix.size() != dk * dk) throw std::invalid_argument("apply_matrix: size mismatch");
    std::vector<std::size_t> strides(k);
    for (int i = 0; i < k; ++i) strides[i] = stride(targets[i]);
    std::vector<cplx> block(dk);
    std::vector<std::size_t> offs(dk);
    for (std::size_t r = 0; r < dk; ++r) {
      std::size_t off = 0, rr = r;
      for (int i = 0; i < k; ++i) {
        off += (rr % d_) * strides[i];
        rr /= d_;
      }
      offs[r] = off;
    }
    // iterate over base indices with zeros at all target digits
    for (std::size_t base = 0; base < amp_.size(); ++base) {
      bool is_base = true;
      for (int i = 0; i < k; ++i)
        if (digit(base, targets[i]) != 0) { is_base = false; break; }
      if (!is_base) continue;
      for (std::size_t r = 0; r < dk; ++r) block[r] = amp_[base + offs[r]];
      for (std::size_t r = 0; r < dk; ++r) {
        cplx acc(0, 0);
        for (std::size_t c = 0; c < dk; ++c) acc += matrix[r * dk + c] * block[c];
        amp_[base + offs[r]] = acc;
      }
    }
  }

  void apply_pauli(const PauliOperator& p) {
    if (p.n != n_ || p.d != d_) throw std::invalid_argument("apply_pauli: mismatch");
    std::vector<cplx> out(amp_.size());
    const cplx global = p.phase_factor();
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (amp_[i] == cplx(0, 0)) continue;
      std::size_t j = i;
      cplx ph = global;
      for (int q = 0; q < n_; ++q) {
        int dg = digit(i, q);
        if (p.z_exp[q]) ph *= (d_ == 2) ? (dg && (p.z_exp[q] & 1) ? cplx(-1, 0) : cplx(1, 0))
                                        : omega3(dg * p.z_exp[q]);
        if (p.x_exp[q]) {
          int nd = (dg + p.x_exp[q]) % d_;
          j += (nd - dg) * static_cast<std::ptrdiff_t>(stride(q));
        }
      }
      out[j] += ph * amp_[i];
    }
    amp_ = std::move(out);
  }

  // ---- measurement -------------------------------------------------------

  // Measure a generalized Pauli observable.  Requires P^d = I (phase chosen
  // accordingly), so eigenvalues are omega^k; returns the phase index k
  // (qubits: k=0 -> +1, k=1 -> -1) and collapses the state.
  int measure_pauli(const PauliOperator& p, RngStream& rng) {
    if (p.n != n_ || p.d != d_) throw std::invalid_argument("measure_pauli: mismatch");
    if (p.is_identity() && p.phase == 0) return 0;
    // check order: P^d must be +I
    {
      PauliOperator acc = p;
      for (int i = 1; i < d_; ++i) acc = acc * p;
      if (!acc.is_identity() || acc.phase != 0)
        throw std::invalid_argument("measure_pauli: observable is not order-d Hermitian form");
    }
    // powers of P applied to the state
    std::vector<std::vector<cplx>> pow(d_);
    pow[0] = amp_;
    DenseState scratch = *this;
    for (int j = 1; j < d_; ++j) {
      scratch.apply_pauli(p);
      pow[j] = scratch.amp_;
    }
    std::vector<double> prob(d_, 0.0);
    std::vector<std::vector<cplx>> proj(d_);
    for (int k = 0; k < d_; ++k) {
      proj[k].assign(amp_.size(), cplx(0, 0));
      for (int j = 0; j < d_; ++j) {
        cplx w = (d_ == 2) ? cplx(j * k % 2 ? -1.0 : 1.0, 0.0) : omega3(-j * k);
        for (std::size_t i = 0; i < amp_.size(); ++i) proj[k][i] += w * pow[j][i];
      }
      double nrm = 0;
      for (auto& a : proj[k]) {
        a /= static_cast<double>(d_);
        nrm += std::norm(a);
      }
      prob[k] = nrm;
    }
    int outcome = sample_index(prob, rng);
    amp_ = std::move(proj[outcome]);
    normalize();
    return outcome;
  }

  // computational-basis measurement of one qudit
  int measure_qudit(int q, RngStream& rng) {
    check_index(q);
    std::vector<double> prob(d_, 0.0);
    for (std::size_t i = 0; i < amp_.size(); ++i) prob[digit(i, q)] += std::norm(amp_[i]);
    int outcome = sample_index(prob, rng);
    project_qudit(q, outcome);
    return outcome;
  }

  void project_qudit(int q, int value) {
    check_index(q);
    double nrm = 0;
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (digit(i, q) != value)
        amp_[i] = 0;
      else
        nrm += std::norm(amp_[i]);
    }
    if (nrm < 1e-300) throw std::runtime_error("project_qudit: zero-probability branch");
    double s = 1.0 / std::sqrt(nrm);
    for (auto& a : amp_) a *= s;
  }

  // trace out a qudit after measuring it in the computational basis,
  // returning the observed digit (used for discard-and-substitute flows)
  int remove_qudit(int q, RngStream& rng) {
    int outcome = measure_qudit(q, rng);
    std::vector<cplx> out(amp_.size() / d_);
    std::size_t w = 0;
    for (std::size_t i = 0; i < amp_.size(); ++i)
      if (digit(i, q) == outcome) out[w++] = amp_[i];
    amp_ = std::move(out);
    --n_;
    return outcome;
  }

  // append a fresh qudit in |digit> as the new highest index
  void append_qudit(int value = 0) {
    std::size_t old = amp_.size();
    if (old * d_ > cap()) throw std::invalid_argument("append_qudit: cap exceeded");
    std::vector<cplx> out(old * d_, cplx(0, 0));
    std::copy(amp_.begin(), amp_.end(), out.begin() + value * old);
    amp_ = std::move(out);
    ++n_;
  }

  // ---- metrics -----------------------------------------------------------

  cplx inner_product(const DenseState& other) const {
    require_same_shape(other);
    cplx acc(0, 0);
    for (std::size_t i = 0; i < amp_.size(); ++i)
      acc += std::conj(amp_[i]) * other.amp_[i];
    return acc;
  }

  double norm_sq() const {
    double s = 0;
    for (const auto& a : amp_) s += std::norm(a);
    return s;
  }

  void normalize() {
    double s = std::sqrt(norm_sq());
    if (s < 1e-300) throw std::runtime_error("normalize: zero state");
    for (auto& a : amp_) a /= s;
  }

  void check_norm() const {
    if (std::abs(norm_sq() - 1.0) > kNormTol)
      throw std::runtime_error("DenseState: normalization drift beyond tolerance");
  }

  // canonical form: first nonzero amplitude real positive
  void fix_global_phase() {
    for (const auto& a : amp_) {
      if (std::abs(a) > kAmpTol) {
        cplx ph = std::conj(a) / std::abs(a);
        for (auto& b : amp_) b *= ph;
        return;
      }
    }
  }

  // reduced density matrix over `keep` (row-major, keep[0] least significant)
  std::vector<cplx> density_matrix(std::span<const int> keep) const {
    const int k = static_cast<int>(keep.size());
    std::size_t dk = 1;
    for (int i = 0; i < k; ++i) {
      check_index(keep[i]);
      dk *= static_cast<std::size_t>(d_);
    }
    std::vector<cplx> rho(dk * dk, cplx(0, 0));
    std::size_t drem = amp_.size() / dk;
    // amplitude table indexed (remainder, kept-subindex)
    std::vector<cplx> table(amp_.size(), cplx(0, 0));
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      std::size_t sub = 0, mul = 1;
      for (int t = 0; t < k; ++t) {
        sub += static_cast<std::size_t>(digit(i, keep[t])) * mul;
        mul *= d_;
      }
      std::size_t rem = 0;
      mul = 1;
      for (int q = 0; q < n_; ++q) {
        bool kept = false;
        for (int t = 0; t < k; ++t)
          if (keep[t] == q) { kept = true; break; }
        if (!kept) {
          rem += static_cast<std::size_t>(digit(i, q)) * mul;
          mul *= d_;
        }
      }
      table[rem * dk + sub] = amp_[i];
    }
    for (std::size_t rem = 0; rem < drem; ++rem)
      for (std::size_t a = 0; a < dk; ++a) {
        cplx va = table[rem * dk + a];
        if (va == cplx(0, 0)) continue;
        for (std::size_t b = 0; b < dk; ++b)
          rho[a * dk + b] += va * std::conj(table[rem * dk + b]);
      }
    return rho;
  }

  bool approx_equal(const DenseState& other, double tol = kAmpTol) const {
    require_same_shape(other);
    for (std::size_t i = 0; i < amp_.size(); ++i)
      if (std::abs(amp_[i] - other.amp_[i]) > tol) return false;
    return true;
  }

 private:
  static cplx omega3(int e) {
    static const cplx w(-0.5, 0.8660254037844386);
    static const cplx w2(-0.5, -0.8660254037844386);
    switch (((e % 3) + 3) % 3) {
      case 0: return cplx(1, 0);
      case 1: return w;
      default: return w2;
    }
  }

  int sample_index(const std::vector<double>& prob, RngStream& rng) {
    double total = 0;
    for (double p : prob) total += p;
    double u = rng.uniform_double() * total;
    double acc = 0;
    for (std::size_t k = 0; k + 1 < prob.size(); ++k) {
      acc += prob[k];
      if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(prob.size()) - 1;
  }

  template <typename F>
  void permute1(int q, F&& newdigit) {
    std::size_t st = stride(q);
    std::vector<cplx> out(amp_.size());
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      int dg = digit(i, q);
      std::size_t j = i + (newdigit(dg) - dg) * static_cast<std::ptrdiff_t>(st);
      out[j] = amp_[i];
    }
    amp_ = std::move(out);
  }

  template <typename F>
  void phase1(int q, F&& factor) {
    for (std::size_t i = 0; i < amp_.size(); ++i) amp_[i] *= factor(digit(i, q));
  }

  void apply_matrix1(int q, const std::array<cplx, 4>& m) {
    std::size_t st = stride(q);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (digit(i, q) != 0) continue;
      cplx a = amp_[i], b = amp_[i + st];
      amp_[i] = m[0] * a + m[1] * b;
      amp_[i + st] = m[2] * a + m[3] * b;
    }
  }

  void fourier1(int q, int sign) {
    std::size_t st = stride(q);
    const double s = 0.5773502691896258;  // 1/sqrt(3)
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (digit(i, q) != 0) continue;
      cplx a0 = amp_[i], a1 = amp_[i + st], a2 = amp_[i + 2 * st];
      for (int r = 0; r < 3; ++r) {
        cplx acc = a0 + omega3(sign * r) * a1 + omega3(sign * 2 * r) * a2;
        amp_[i + r * st] = s * acc;
      }
    }
  }

  void sum_gate(int control, int target, int mult) {
    // |i, j> -> |i, j + mult*i mod d>
    std::vector<cplx> out(amp_.size());
    std::size_t st = stride(target);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      int ci = digit(i, control);
      int tj = digit(i, target);
      int nj = (tj + mult * ci) % d_;
      std::size_t j = i + (nj - tj) * static_cast<std::ptrdiff_t>(st);
      out[j] = amp_[i];
    }
    amp_ = std::move(out);
  }

  void scale(cplx f) {
    for (auto& a : amp_) a *= f;
  }

  void check_index(int q) const {
    if (q < 0 || q >= n_) throw std::out_of_range("qudit index out of range");
  }

  void require_same_shape(const DenseState& other) const {
    if (n_ != other.n_ || d_ != other.d_)
      throw std::invalid_argument("DenseState: shape mismatch");
  }

  int n_;
  int d_;
  std::size_t cap_override_ = 0;
  std::vector<cplx> amp_;
};

// |<a|b>|^2
inline double fidelity(const DenseState& a, const DenseState& b) {
  return std::norm(a.inner_product(b));
}

}  // namespace qvc
