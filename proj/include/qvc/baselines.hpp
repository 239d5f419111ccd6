#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qvc/dense_state.hpp"
#include "qvc/pauli.hpp"
#include "qvc/rng.hpp"
#include "qvc/transcript.hpp"

namespace qvc {

// ---- classical one-time pad ------------------------------------------------

inline std::vector<std::uint8_t> classical_otp_encrypt(const std::vector<std::uint8_t>& message,
                                                       const std::vector<std::uint8_t>& key) {
  if (message.size() != key.size())
    throw std::invalid_argument("classical_otp: message/key length mismatch");
  std::vector<std::uint8_t> cipher(message.size());
  for (std::size_t i = 0; i < message.size(); ++i) cipher[i] = (message[i] ^ key[i]) & 1;
  return cipher;
}

inline std::vector<std::uint8_t> classical_otp_decrypt(const std::vector<std::uint8_t>& cipher,
                                                       const std::vector<std::uint8_t>& key) {
  return classical_otp_encrypt(cipher, key);
}

// ---- eavesdrop-detecting channel -------------------------------------------
// M' = M followed by r subset parities of M; each bit of K1 (+) M' travels in
// the Z or X basis chosen by the matching bit of K2.  Subsets are announced
// only after Bob acknowledges receipt of the qubits.

struct EdcAttack {
  enum class Kind { None, InterceptResend, FlipOne };
  Kind kind = Kind::None;
  int intercept_count = 0;  // qubits intercepted in a random basis
  int flip_position = 0;    // cipher position whose bit value is flipped
};

struct EdcResult {
  bool accept = false;
  std::vector<std::uint8_t> decoded;  // Bob's message estimate (n bits)
};

inline EdcResult edc_send(const std::vector<std::uint8_t>& message, int r,
                          const std::vector<std::uint8_t>& key1,
                          const std::vector<std::uint8_t>& key2, const EdcAttack& attack,
                          RngStream& rng, Transcript* transcript = nullptr) {
  const int n = static_cast<int>(message.size());
  const int m = n + r;
  if (static_cast<int>(key1.size()) != m || static_cast<int>(key2.size()) != m)
    throw std::invalid_argument("edc_send: keys must have n + r bits");
  // Alice draws the parity subsets up front but announces them only later.
  std::vector<std::vector<int>> subsets(r);
  for (int p = 0; p < r; ++p) {
    do {
      subsets[p].clear();
      for (int i = 0; i < n; ++i)
        if (rng.bit()) subsets[p].push_back(i);
    } while (subsets[p].empty());
  }
  std::vector<std::uint8_t> mprime(message);
  for (int p = 0; p < r; ++p) {
    std::uint8_t par = 0;
    for (int i : subsets[p]) par ^= message[i];
    mprime.push_back(par);
  }
  // cipher bits in transit; basis per position from key2
  std::vector<std::uint8_t> wire(m);
  for (int i = 0; i < m; ++i) wire[i] = (mprime[i] ^ key1[i]) & 1;
  // channel attacks, modeled on the measurement statistics
  if (attack.kind == EdcAttack::Kind::InterceptResend) {
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    for (int i = 0; i < attack.intercept_count && i < m; ++i) {
      int j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m - i)));
      std::swap(order[i], order[j]);
      int pos = order[i];
      bool eve_basis = rng.bit();
      // wrong basis: Eve resends an eigenstate of the other basis and Bob's
      // readout in the keyed basis is uniformly random
      if (eve_basis != (key2[pos] & 1)) wire[pos] = rng.bit() ? 1 : 0;
    }
  } else if (attack.kind == EdcAttack::Kind::FlipOne) {
    wire[attack.flip_position % m] ^= 1;
  }
  // Bob receives and acknowledges; only then does Alice reveal the subsets
  if (transcript) {
    transcript->acknowledge_receipt("bob");
    for (int p = 0; p < r; ++p) {
      std::vector<std::uint8_t> payload;
      for (int i : subsets[p]) payload.push_back(static_cast<std::uint8_t>(i));
      transcript->announce("alice", "parity-subset", payload, true);
    }
  }
  EdcResult out;
  std::vector<std::uint8_t> decoded(m);
  for (int i = 0; i < m; ++i) decoded[i] = (wire[i] ^ key1[i]) & 1;
  out.decoded.assign(decoded.begin(), decoded.begin() + n);
  out.accept = true;
  for (int p = 0; p < r; ++p) {
    std::uint8_t par = 0;
    for (int i : subsets[p]) par ^= decoded[i];
    if (par != decoded[n + p]) out.accept = false;
  }
  return out;
}

// ---- teleportation ---------------------------------------------------------

struct TeleportResult {
  int k1 = 0;  // bit-flip correction, broadcast
  int k2 = 0;  // phase-flip correction, broadcast
  double fidelity = 0.0;
  DenseState bob = DenseState(1, 2);  // single-qubit corrected state
};

// Bell measurement of (source, ancilla): CNOT then H, computational readout.
// Bob holds X^{k1} Z^{k2} |psi> and applies X^{k1} then Z^{k2}.
inline TeleportResult teleport(const DenseState& psi, RngStream& rng,
                               Transcript* transcript = nullptr, bool correct = true) {
  if (psi.num_qudits() != 1 || psi.dimension() != 2)
    throw std::invalid_argument("teleport: expects a single-qubit state");
  std::vector<cplx> amps(8, cplx(0, 0));
  amps[0] = psi.amplitude(0);
  amps[1] = psi.amplitude(1);
  DenseState st = DenseState::from_amplitudes(3, 2, std::move(amps));
  st.apply_gate(GateKind::H, 1);
  st.apply_gate(GateKind::CNOT, 1, 2);
  st.apply_gate(GateKind::CNOT, 0, 1);
  st.apply_gate(GateKind::H, 0);
  TeleportResult out;
  out.k2 = st.measure_pauli(PauliOperator::z_on(3, 0), rng);
  out.k1 = st.measure_pauli(PauliOperator::z_on(3, 1), rng);
  if (transcript)
    transcript->announce("alice", "bell-outcome",
                         {static_cast<std::uint8_t>(out.k1), static_cast<std::uint8_t>(out.k2)});
  if (correct) {
    if (out.k1) st.apply_gate(GateKind::X, 2);
    if (out.k2) st.apply_gate(GateKind::Z, 2);
  }
  int keep = 2;
  auto rho = st.density_matrix(std::span<const int>(&keep, 1));
  cplx f = std::conj(psi.amplitude(0)) * (rho[0] * psi.amplitude(0) + rho[1] * psi.amplitude(1)) +
           std::conj(psi.amplitude(1)) * (rho[2] * psi.amplitude(0) + rho[3] * psi.amplitude(1));
  out.fidelity = f.real();
  // extract Bob's pure qubit from the post-measurement register
  std::vector<cplx> bob_amps(2);
  // measured wires are in definite computational states; read the two
  // surviving amplitudes directly
  std::size_t base = static_cast<std::size_t>(out.k2) + 2 * static_cast<std::size_t>(out.k1);
  bob_amps[0] = st.amplitude(base);
  bob_amps[1] = st.amplitude(base + 4);
  double nrm = std::sqrt(std::norm(bob_amps[0]) + std::norm(bob_amps[1]));
  bob_amps[0] /= nrm;
  bob_amps[1] /= nrm;
  out.bob = DenseState::from_amplitudes(1, 2, std::move(bob_amps));
  return out;
}

// ---- superdense coding -----------------------------------------------------

struct SuperdenseResult {
  int c1 = 0;
  int c2 = 0;
  std::vector<cplx> transmitted_reduced;  // 2x2 reduced state of the qubit in flight
};

inline SuperdenseResult superdense(int c1, int c2, RngStream& rng) {
  DenseState st(2, 2);
  st.apply_gate(GateKind::H, 0);
  st.apply_gate(GateKind::CNOT, 0, 1);
  if (c1) st.apply_gate(GateKind::X, 0);
  if (c2) st.apply_gate(GateKind::Z, 0);
  SuperdenseResult out;
  std::vector<int> keep = {0};
  out.transmitted_reduced = st.density_matrix(keep);
  st.apply_gate(GateKind::CNOT, 0, 1);
  st.apply_gate(GateKind::H, 0);
  out.c2 = st.measure_pauli(PauliOperator::z_on(2, 0), rng);
  out.c1 = st.measure_pauli(PauliOperator::z_on(2, 1), rng);
  return out;
}

// ---- entanglement-based key distribution -----------------------------------

struct EbitKeyResult {
  std::vector<std::uint8_t> alice;
  std::vector<std::uint8_t> bob;
};

inline EbitKeyResult ebit_key_distribution(int count, RngStream& rng) {
  EbitKeyResult out;
  out.alice.reserve(count);
  out.bob.reserve(count);
  for (int i = 0; i < count; ++i) {
    DenseState st(2, 2);
    st.apply_gate(GateKind::H, 0);
    st.apply_gate(GateKind::CNOT, 0, 1);
    int a = st.measure_pauli(PauliOperator::z_on(2, 0), rng);
    int b = st.measure_pauli(PauliOperator::z_on(2, 1), rng);
    out.alice.push_back(static_cast<std::uint8_t>(a));
    out.bob.push_back(static_cast<std::uint8_t>(b));
  }
  return out;
}

// ---- BB84 ------------------------------------------------------------------
// Noiseless channel plus an optional intercept-resend eavesdropper who
// measures each intercepted qubit in a random basis.  Zero tolerance: any
// tested mismatch aborts.

struct Bb84Result {
  bool aborted = false;
  double observed_error_rate = 0.0;
  int sifted = 0;
  int tested = 0;
  std::vector<std::uint8_t> key;  // sifted untested bits
};

inline Bb84Result bb84_round(int count, double intercept_prob, double test_fraction,
                             RngStream& rng) {
  Bb84Result out;
  std::vector<std::uint8_t> sift_bits_a, sift_bits_b;
  for (int i = 0; i < count; ++i) {
    int bit = rng.bit();
    int basis = rng.bit();
    int arriving = bit;
    if (rng.uniform_double() < intercept_prob) {
      int eve_basis = rng.bit();
      if (eve_basis != basis) {
        // Eve's readout is random; Bob's subsequent readout in the original
        // basis is random again
        arriving = rng.bit();
      }
    }
    int bob_basis = rng.bit();
    int bob_bit = bob_basis == basis ? arriving : rng.bit();
    if (bob_basis == basis) {
      sift_bits_a.push_back(static_cast<std::uint8_t>(bit));
      sift_bits_b.push_back(static_cast<std::uint8_t>(bob_bit));
    }
  }
  out.sifted = static_cast<int>(sift_bits_a.size());
  int mismatches = 0;
  for (int i = 0; i < out.sifted; ++i) {
    if (rng.uniform_double() < test_fraction) {
      ++out.tested;
      if (sift_bits_a[i] != sift_bits_b[i]) ++mismatches;
    } else {
      out.key.push_back(sift_bits_a[i]);
    }
  }
  out.observed_error_rate = out.tested > 0 ? mismatches / static_cast<double>(out.tested) : 0.0;
  out.aborted = mismatches > 0;
  return out;
}

}  // namespace qvc
