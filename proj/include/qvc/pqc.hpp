#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qvc/channels.hpp"
#include "qvc/dense_state.hpp"
#include "qvc/rng.hpp"
#include "qvc/stats.hpp"
#include "qvc/transcript.hpp"

namespace qvc {

// 2n-bit classical Pauli key; position 2i holds the X exponent for qubit i,
// position 2i+1 the Z exponent.  The encryption unitary on qubit i is
// Z^{z bit} X^{x bit}.
struct ClassicalPauliKey {
  std::vector<std::uint8_t> bits;

  int n() const { return static_cast<int>(bits.size()) / 2; }
  int x_bit(int qubit) const { return bits.at(2 * qubit); }
  int z_bit(int qubit) const { return bits.at(2 * qubit + 1); }

  static ClassicalPauliKey zero(int n) {
    ClassicalPauliKey k;
    k.bits.assign(2 * n, 0);
    return k;
  }

  static ClassicalPauliKey random(int n, RngStream& rng) {
    ClassicalPauliKey k;
    k.bits.resize(2 * n);
    for (auto& b : k.bits) b = rng.bit() ? 1 : 0;
    return k;
  }
};

// Applies U_K: per qubit X^{x bit} then Z^{z bit}.
template <typename State>
void pqc_encrypt(State& st, const ClassicalPauliKey& key, std::span<const int> wires) {
  if (static_cast<int>(wires.size()) != key.n())
    throw std::invalid_argument("pqc_encrypt: key length mismatch");
  for (int i = 0; i < key.n(); ++i) {
    if (key.x_bit(i)) st.apply_gate(GateKind::X, wires[i]);
    if (key.z_bit(i)) st.apply_gate(GateKind::Z, wires[i]);
  }
}

// U_K^dagger; equal to U_K up to a global phase, applied in inverse order.
template <typename State>
void pqc_decrypt(State& st, const ClassicalPauliKey& key, std::span<const int> wires) {
  if (static_cast<int>(wires.size()) != key.n())
    throw std::invalid_argument("pqc_decrypt: key length mismatch");
  for (int i = 0; i < key.n(); ++i) {
    if (key.z_bit(i)) st.apply_gate(GateKind::Z, wires[i]);
    if (key.x_bit(i)) st.apply_gate(GateKind::X, wires[i]);
  }
}

template <typename State>
void pqc_encrypt(State& st, const ClassicalPauliKey& key) {
  std::vector<int> wires(key.n());
  for (int i = 0; i < key.n(); ++i) wires[i] = i;
  pqc_encrypt(st, key, wires);
}

template <typename State>
void pqc_decrypt(State& st, const ClassicalPauliKey& key) {
  std::vector<int> wires(key.n());
  for (int i = 0; i < key.n(); ++i) wires[i] = i;
  pqc_decrypt(st, key, wires);
}

// Test-qubit augmentation: r x-tests (prepared |0>, X-flipped by the key,
// measured in Z) and r z-tests (prepared |+>, Z-flipped, measured in X).
// Subsets are drawn fresh per transmission and announced only after receipt.
struct TestQubitLayout {
  int n = 0;
  int r = 0;
  std::vector<std::uint8_t> flip;          // 2r bits: x-test flips then z-test flips
  std::vector<std::vector<int>> s_x;       // r subsets of data indices, CNOT into x_i
  std::vector<std::vector<int>> s_z;       // r subsets of data indices, CNOT from z_i
  std::vector<std::vector<int>> t_x;       // r subsets of z-test indices, CNOT into x_i

  // wire layout on the (n+2r)-qubit cipher-text
  int data_wire(int i) const { return i; }
  int x_test_wire(int i) const { return n + i; }
  int z_test_wire(int i) const { return n + r + i; }
  int total_wires() const { return n + 2 * r; }

  static TestQubitLayout random(int n, int r, RngStream& rng) {
    if (n < 1 || r < 1) throw std::invalid_argument("TestQubitLayout: n, r must be >= 1");
    TestQubitLayout lay;
    lay.n = n;
    lay.r = r;
    lay.flip.resize(2 * r);
    for (auto& b : lay.flip) b = rng.bit() ? 1 : 0;
    // subsets may be empty; conditioning on nonempty would lift some planted
    // errors' acceptance probability above 2^-r
    auto draw = [&](int universe) {
      std::vector<int> subset;
      for (int j = 0; j < universe; ++j)
        if (rng.bit()) subset.push_back(j);
      return subset;
    };
    for (int i = 0; i < r; ++i) {
      lay.s_x.push_back(draw(n));
      lay.s_z.push_back(draw(n));
      lay.t_x.push_back(draw(r));
    }
    return lay;
  }
};

// Encode order: data encryption, test preparation flips, then the CNOT
// groups (S_x members into x_i; z_i into S_z members; T_x members into x_i).
// Decode is the strict inverse.
template <typename State>
void mpqc_encode(State& st, const ClassicalPauliKey& key, const TestQubitLayout& lay) {
  std::vector<int> data(lay.n);
  for (int i = 0; i < lay.n; ++i) data[i] = lay.data_wire(i);
  pqc_encrypt(st, key, data);
  for (int i = 0; i < lay.r; ++i)
    if (lay.flip[i]) st.apply_gate(GateKind::X, lay.x_test_wire(i));
  for (int i = 0; i < lay.r; ++i) {
    st.apply_gate(GateKind::H, lay.z_test_wire(i));
    if (lay.flip[lay.r + i]) st.apply_gate(GateKind::Z, lay.z_test_wire(i));
  }
  for (int i = 0; i < lay.r; ++i)
    for (int j : lay.s_x[i]) st.apply_gate(GateKind::CNOT, lay.data_wire(j), lay.x_test_wire(i));
  for (int i = 0; i < lay.r; ++i)
    for (int j : lay.s_z[i]) st.apply_gate(GateKind::CNOT, lay.z_test_wire(i), lay.data_wire(j));
  for (int i = 0; i < lay.r; ++i)
    for (int j : lay.t_x[i]) st.apply_gate(GateKind::CNOT, lay.z_test_wire(j), lay.x_test_wire(i));
}

// Inverts the encode circuit, measures every test against its flip bit, and
// decrypts the data.  Returns the accept verdict; the decoded data stays in
// `st` on the data wires.
template <typename State>
bool mpqc_decode_accept(State& st, const ClassicalPauliKey& key, const TestQubitLayout& lay,
                        RngStream& rng) {
  for (int i = lay.r - 1; i >= 0; --i)
    for (auto it = lay.t_x[i].rbegin(); it != lay.t_x[i].rend(); ++it)
      st.apply_gate(GateKind::CNOT, lay.z_test_wire(*it), lay.x_test_wire(i));
  for (int i = lay.r - 1; i >= 0; --i)
    for (auto it = lay.s_z[i].rbegin(); it != lay.s_z[i].rend(); ++it)
      st.apply_gate(GateKind::CNOT, lay.z_test_wire(i), lay.data_wire(*it));
  for (int i = lay.r - 1; i >= 0; --i)
    for (auto it = lay.s_x[i].rbegin(); it != lay.s_x[i].rend(); ++it)
      st.apply_gate(GateKind::CNOT, lay.data_wire(*it), lay.x_test_wire(i));

  const int total = embedded_size(st);
  bool accept = true;
  for (int i = 0; i < lay.r; ++i) {
    int got = st.measure_pauli(PauliOperator::z_on(total, lay.x_test_wire(i)), rng);
    if (got != lay.flip[i]) accept = false;
  }
  for (int i = 0; i < lay.r; ++i) {
    int got = st.measure_pauli(PauliOperator::x_on(total, lay.z_test_wire(i)), rng);
    if (got != lay.flip[lay.r + i]) accept = false;
  }
  std::vector<int> data(lay.n);
  for (int i = 0; i < lay.n; ++i) data[i] = lay.data_wire(i);
  pqc_decrypt(st, key, data);
  return accept;
}

// Classical acceptance rule, validated against the engine exhaustively in
// tests: the Pauli error frame is conjugated through the decode CNOTs over
// GF(2); accept iff no x-test carries a residual X and no z-test a residual
// Z.  Errors are given on the (n+2r)-wire cipher-text.
inline bool mpqc_accept_classical(const TestQubitLayout& lay,
                                  const std::vector<std::uint8_t>& x_err,
                                  const std::vector<std::uint8_t>& z_err) {
  if (static_cast<int>(x_err.size()) != lay.total_wires() ||
      static_cast<int>(z_err.size()) != lay.total_wires())
    throw std::invalid_argument("mpqc_accept_classical: error length mismatch");
  std::vector<std::uint8_t> x = x_err, z = z_err;
  // push the error frame through the decode CNOTs; per CNOT(c, t) an X on
  // the control copies to the target and a Z on the target copies to the
  // control
  auto cnot = [&](int c, int t) {
    x[t] = static_cast<std::uint8_t>(x[t] ^ x[c]);
    z[c] = static_cast<std::uint8_t>(z[c] ^ z[t]);
  };
  for (int i = lay.r - 1; i >= 0; --i)
    for (auto it = lay.t_x[i].rbegin(); it != lay.t_x[i].rend(); ++it)
      cnot(lay.z_test_wire(*it), lay.x_test_wire(i));
  for (int i = lay.r - 1; i >= 0; --i)
    for (auto it = lay.s_z[i].rbegin(); it != lay.s_z[i].rend(); ++it)
      cnot(lay.z_test_wire(i), lay.data_wire(*it));
  for (int i = lay.r - 1; i >= 0; --i)
    for (auto it = lay.s_x[i].rbegin(); it != lay.s_x[i].rend(); ++it)
      cnot(lay.data_wire(*it), lay.x_test_wire(i));
  // an x-test flips iff it carries a residual X, a z-test iff a residual Z
  for (int i = 0; i < lay.r; ++i) {
    if (x[lay.x_test_wire(i)] & 1) return false;
    if (z[lay.z_test_wire(i)] & 1) return false;
  }
  return true;
}

// Transcript-checked round bookkeeping: the layout's subsets are secrets
// until Bob acknowledges receipt of the quantum transmission.
inline void announce_layout(Transcript& transcript, const TestQubitLayout& lay) {
  std::vector<std::uint8_t> blob;
  auto put = [&](const std::vector<std::vector<int>>& family) {
    for (const auto& subset : family) {
      for (int j : subset) blob.push_back(static_cast<std::uint8_t>(j));
      blob.push_back(0xff);
    }
  };
  put(lay.s_x);
  put(lay.s_z);
  put(lay.t_x);
  transcript.announce("alice", "test-subsets", std::move(blob), true);
}

// ---- accepted-state analysis -----------------------------------------------

struct AcceptanceAnalysis {
  std::string channel_name;
  int n = 0;
  int r = 0;
  int trials = 0;
  double prob_accept = 0.0;
  double max_nontrivial_c = 0.0;
  double eve_entropy_bound_bits = 0.0;
  std::vector<double> per_error_c;  // aligned with the channel's explicit list
};

namespace detail {

inline double entropy_of_density(const std::vector<cplx>& rho, int dim) {
  Eigen::MatrixXcd m(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) m(a, b) = rho[a * dim + b];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
  double h = 0.0;
  for (int a = 0; a < dim; ++a) {
    double lam = solver.eigenvalues()(a);
    if (lam > 1e-15) h -= lam * std::log2(lam);
  }
  return h;
}

}  // namespace detail

// Monte Carlo over fresh layouts: per-error acceptance rates c_i, the overall
// accept probability, and the Eve-information bound (entropy of the
// normalized accepted data state, maximized over 64 random probes plus the
// computational basis, n <= 3).  The channel must be an explicit list over
// the data qubits.
inline AcceptanceAnalysis analyze_acceptance(const PauliChannel& channel, int n, int r,
                                             int trials, RngStream& rng) {
  if (trials < 1000) throw std::invalid_argument("analyze_acceptance: trials must be >= 1000");
  if (channel.size() != n)
    throw std::invalid_argument("analyze_acceptance: channel acts on the data qubits");
  const auto& entries = channel.entries();
  AcceptanceAnalysis out;
  out.channel_name = channel.name();
  out.n = n;
  out.r = r;
  out.trials = trials;

  // acceptance of each error, averaged over fresh random layouts; per layout
  // the verdict is deterministic
  std::vector<std::int64_t> accepted(entries.size(), 0);
  for (int t = 0; t < trials; ++t) {
    TestQubitLayout lay = TestQubitLayout::random(n, r, rng);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      std::vector<std::uint8_t> xe(lay.total_wires(), 0), ze(lay.total_wires(), 0);
      for (int q = 0; q < n; ++q) {
        xe[q] = entries[e].first.x_exp[q];
        ze[q] = entries[e].first.z_exp[q];
      }
      if (mpqc_accept_classical(lay, xe, ze)) ++accepted[e];
    }
  }
  std::vector<double> c(entries.size(), 0.0);
  for (std::size_t e = 0; e < entries.size(); ++e)
    c[e] = static_cast<double>(accepted[e]) / static_cast<double>(trials);
  out.per_error_c = c;
  for (std::size_t e = 0; e < entries.size(); ++e) {
    out.prob_accept += entries[e].second * c[e];
    if (!entries[e].first.is_identity())
      out.max_nontrivial_c = std::max(out.max_nontrivial_c, c[e]);
  }

  // Eve bound: entropy of sum_i e_i c_i P_i |psi><psi| P_i / (normalization),
  // maximized over probe states
  if (n > 3) throw std::invalid_argument("analyze_acceptance: Eve bound limited to n <= 3");
  const int dim = 1 << n;
  double best = 0.0;
  RngStream probe_rng = rng.substream(0xe7e);
  for (int p = 0; p < 64 + dim; ++p) {
    DenseState psi = p < dim ? DenseState::basis(n, 2, static_cast<std::size_t>(p))
                             : DenseState::random(n, 2, probe_rng);
    std::vector<cplx> rho(static_cast<std::size_t>(dim) * dim, cplx(0, 0));
    double norm = 0.0;
    for (std::size_t e = 0; e < entries.size(); ++e) {
      double w = entries[e].second * c[e];
      if (w <= 0.0) continue;
      DenseState branch = psi;
      branch.apply_pauli(entries[e].first);
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          rho[static_cast<std::size_t>(a) * dim + b] +=
              w * branch.amplitude(a) * std::conj(branch.amplitude(b));
      norm += w;
    }
    if (norm <= 0.0) continue;
    for (auto& v : rho) v /= norm;
    best = std::max(best, detail::entropy_of_density(rho, dim));
  }
  out.eve_entropy_bound_bits = best;
  return out;
}

// ---- authentication --------------------------------------------------------

struct AuthenticationOutcome {
  bool accept = false;
  double fidelity = 0.0;  // of the accepted data state to the input, else 0
};

// Authentication round: the mpqc pipeline with identity data encryption on
// the dense engine.  `tamper` is a Pauli channel over either the data qubits
// or the full (n+2r)-qubit transmission.
inline AuthenticationOutcome authenticate_message(const DenseState& rho_in,
                                                  const TestQubitLayout& lay,
                                                  const PauliChannel& tamper, RngStream& rng) {
  const int n = rho_in.num_qudits();
  if (lay.n != n) throw std::invalid_argument("authenticate_message: layout size mismatch");
  const std::size_t cap = std::size_t(1) << (lay.total_wires() + 1);
  // place the message on the data wires, tests start |0>
  std::vector<cplx> amps(std::size_t(1) << lay.total_wires(), cplx(0, 0));
  for (std::size_t i = 0; i < rho_in.dim(); ++i) amps[i] = rho_in.amplitude(i);
  DenseState st = DenseState::from_amplitudes(lay.total_wires(), 2, std::move(amps), cap);
  ClassicalPauliKey zero = ClassicalPauliKey::zero(n);
  mpqc_encode(st, zero, lay);
  std::vector<int> wires(tamper.size());
  for (int i = 0; i < tamper.size(); ++i) wires[i] = i;
  if (tamper.size() != n && tamper.size() != lay.total_wires())
    throw std::invalid_argument("authenticate_message: channel size mismatch");
  apply_pauli_channel(st, tamper, wires, rng);
  AuthenticationOutcome out;
  out.accept = mpqc_decode_accept(st, zero, lay, rng);
  if (out.accept) {
    std::vector<int> data(n);
    for (int i = 0; i < n; ++i) data[i] = i;
    auto rho = st.density_matrix(data);
    const int dim = 1 << n;
    cplx f(0, 0);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        f += std::conj(rho_in.amplitude(a)) * rho[static_cast<std::size_t>(a) * dim + b] *
             rho_in.amplitude(b);
    out.fidelity = f.real();
  }
  return out;
}

// Wholesale forgery: Eve replaces the transmission with her own state; Bob's
// acceptance then hinges on guessing the secret flip key.
inline bool authenticate_forgery_accepts(const DenseState& eve_state, int n, int r,
                                         RngStream& rng) {
  TestQubitLayout lay = TestQubitLayout::random(n, r, rng);
  if (eve_state.num_qudits() != lay.total_wires())
    throw std::invalid_argument("authenticate_forgery_accepts: state size mismatch");
  DenseState st = eve_state;
  return mpqc_decode_accept(st, ClassicalPauliKey::zero(n), lay, rng);
}

// Classical-key cost of authenticating the two classical messages of the
// round (Alice's (2nr+r^2)-bit announcement, Bob's 1-bit verdict), base-2
// logs, rounded up.
struct WegmanCarterKeySize {
  std::int64_t alice_bits = 0;
  std::int64_t bob_bits = 0;
};

inline WegmanCarterKeySize wegman_carter_key_size(std::int64_t n, std::int64_t r) {
  if (n < 1 || r < 1) throw std::invalid_argument("wegman_carter_key_size: n, r must be >= 1");
  auto key_bits = [](double r_, double message_bits) {
    double lg = std::log2(message_bits);
    double lglg = std::log2(lg);
    return static_cast<std::int64_t>(std::ceil(4.0 * (r_ + lglg) * lg));
  };
  double alice_msg = 2.0 * static_cast<double>(n) * static_cast<double>(r) +
                     static_cast<double>(r) * static_cast<double>(r);
  double bob_msg = 2.0 * static_cast<double>(r) + static_cast<double>(r) * static_cast<double>(r);
  WegmanCarterKeySize out;
  out.alice_bits = key_bits(static_cast<double>(r), alice_msg);
  out.bob_bits = key_bits(static_cast<double>(r), bob_msg);
  return out;
}

}  // namespace qvc
