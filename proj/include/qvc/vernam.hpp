#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qvc/channels.hpp"
#include "qvc/circuit.hpp"
#include "qvc/dense_state.hpp"
#include "qvc/key_register.hpp"
#include "qvc/polar.hpp"
#include "qvc/rng.hpp"
#include "qvc/stabilizer_state.hpp"
#include "qvc/stats.hpp"

namespace qvc {

// 2n-bit syndrome string: bit 2i flags a Z error on message qubit i (pair 2i
// turned Phi-), bit 2i+1 flags an X error (pair 2i+1 turned Phi-).
struct SyndromeVector {
  std::vector<std::uint8_t> bits;

  explicit SyndromeVector(int n2 = 0) : bits(n2, 0) {}

  bool is_zero() const {
    for (auto b : bits)
      if (b) return false;
    return true;
  }

  bool operator==(const SyndromeVector& o) const { return bits == o.bits; }

  // nibble k encodes bits [4k, 4k+4), bit 4k least significant; nibble 0 first
  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (std::size_t k = 0; k < bits.size(); k += 4) {
      int v = 0;
      for (std::size_t j = 0; j < 4 && k + j < bits.size(); ++j)
        v |= (bits[k + j] ? 1 : 0) << j;
      s += digits[v];
    }
    return s;
  }

  static SyndromeVector from_error(const std::vector<std::uint8_t>& x_err,
                                   const std::vector<std::uint8_t>& z_err) {
    SyndromeVector v(static_cast<int>(2 * x_err.size()));
    for (std::size_t i = 0; i < x_err.size(); ++i) {
      v.bits[2 * i] = z_err[i] ? 1 : 0;
      v.bits[2 * i + 1] = x_err[i] ? 1 : 0;
    }
    return v;
  }

  static SyndromeVector from_pauli(const PauliOperator& p) {
    SyndromeVector v(2 * p.n);
    for (int i = 0; i < p.n; ++i) {
      v.bits[2 * i] = p.z_exp[i] ? 1 : 0;
      v.bits[2 * i + 1] = p.x_exp[i] ? 1 : 0;
    }
    return v;
  }
};

// Wire assignment for one cipher instance on a shared engine state.
struct QvcWireMap {
  std::vector<int> message;                   // n message wires
  std::vector<std::pair<int, int>> pair;      // per pair: (alice wire, bob wire)

  int n() const { return static_cast<int>(message.size()); }

  // message wires [0, n); pair p on wires (n + 2p, n + 2p + 1)
  static QvcWireMap standard(int n, int extra_pairs = 0) {
    QvcWireMap w;
    w.message.resize(n);
    for (int i = 0; i < n; ++i) w.message[i] = i;
    int pairs = 2 * n + extra_pairs;
    w.pair.reserve(pairs);
    for (int p = 0; p < pairs; ++p) w.pair.emplace_back(n + 2 * p, n + 2 * p + 1);
    return w;
  }

  int total_wires() const {
    int m = 0;
    for (int w : message) m = std::max(m, w + 1);
    for (auto [a, b] : pair) m = std::max({m, a + 1, b + 1});
    return m;
  }
};

// Prepares every pair wire couple as Phi+.
template <typename State>
void prepare_pairs(State& st, const QvcWireMap& w) {
  for (auto [a, b] : w.pair) {
    st.apply_gate(GateKind::H, a);
    st.apply_gate(GateKind::CNOT, a, b);
  }
}

// Per message qubit i: CNOT from the alice half of pair 2i, then CZ from the
// alice half of pair 2i+1.
template <typename State>
void qvc_encode(State& st, const QvcWireMap& w) {
  for (int i = 0; i < w.n(); ++i) {
    st.apply_gate(GateKind::CNOT, w.pair[2 * i].first, w.message[i]);
    st.apply_gate(GateKind::CZ, w.pair[2 * i + 1].first, w.message[i]);
  }
}

// Inverse order: CZ from the bob half of pair 2i+1, then CNOT from the bob
// half of pair 2i.
template <typename State>
void qvc_decode(State& st, const QvcWireMap& w) {
  for (int i = 0; i < w.n(); ++i) {
    st.apply_gate(GateKind::CZ, w.pair[2 * i + 1].second, w.message[i]);
    st.apply_gate(GateKind::CNOT, w.pair[2 * i].second, w.message[i]);
  }
}

// ---- parity machinery ------------------------------------------------------

// BXOR from a fresh ancilla pair onto every subset member, then both parties
// measure the ancilla halves in the +/- basis and announce; the XOR of the
// announcements is the subset's z-bit parity.  Subset pairs stay undisturbed
// in the Phi+/- basis.
inline int subset_parity(EbitKeyRegister& reg, std::span<const int> subset,
                         int ancilla_pair, RngStream& rng) {
  if (subset.empty()) throw std::invalid_argument("subset_parity: empty subset");
  for (int p : subset) reg.bxor(ancilla_pair, p);
  auto [a, b] = reg.measure_pm(ancilla_pair, rng);
  return a ^ b;
}

// Independent 1/2 inclusion over the key pairs, resampling empty draws.
inline std::vector<int> random_subset(int num_pairs, RngStream& rng) {
  std::vector<int> subset;
  do {
    subset.clear();
    for (int p = 0; p < num_pairs; ++p)
      if (rng.bit()) subset.push_back(p);
  } while (subset.empty());
  return subset;
}

struct PreliminaryResult {
  bool pass = false;
  std::vector<int> parities;
};

// r random subsets of the key pairs; pass iff every parity is even.
inline PreliminaryResult preliminary_test(EbitKeyRegister& reg, int r, RngStream& rng) {
  if (r < 1) throw std::invalid_argument("preliminary_test: r must be >= 1");
  PreliminaryResult out;
  out.pass = true;
  for (int k = 0; k < r; ++k) {
    std::vector<int> subset = random_subset(reg.num_key_pairs(), rng);
    int ancilla = reg.allocate_ancilla();
    int parity = subset_parity(reg, subset, ancilla, rng);
    out.parities.push_back(parity);
    if (parity) out.pass = false;
  }
  return out;
}

// Smallest r2 with 1/(4 delta^2 r2) <= eps.
inline int chebyshev_sample_size(double delta, double eps) {
  if (delta <= 0.0 || eps <= 0.0)
    throw std::invalid_argument("chebyshev_sample_size: parameters must be positive");
  double raw = 1.0 / (4.0 * delta * delta * eps);
  int r2 = static_cast<int>(std::ceil(raw - 1e-12));
  return std::max(r2, 1);
}

struct WeightEstimate {
  double alpha_hat = 0.0;
  std::vector<int> sampled;            // pair indices, consumed
  std::vector<std::uint8_t> sampled_bits;  // their revealed z-bits
};

// Samples r2 distinct pairs without replacement, measures each in the +/-
// basis on both sides, and takes the Phi- fraction.
inline WeightEstimate estimate_weight(EbitKeyRegister& reg, int r2, RngStream& rng) {
  int m = reg.num_key_pairs();
  if (r2 < 1 || r2 > m) throw std::invalid_argument("estimate_weight: r2 out of range");
  // partial Fisher-Yates over the pair indices
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  WeightEstimate est;
  int ones = 0;
  for (int k = 0; k < r2; ++k) {
    int j = k + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m - k)));
    std::swap(idx[k], idx[j]);
    auto [a, b] = reg.measure_pm(idx[k], rng);
    int bit = a ^ b;
    est.sampled.push_back(idx[k]);
    est.sampled_bits.push_back(static_cast<std::uint8_t>(bit));
    ones += bit;
  }
  est.alpha_hat = static_cast<double>(ones) / static_cast<double>(r2);
  return est;
}

// ---- hashing identification ------------------------------------------------

struct HashResult {
  SyndromeVector v;
  bool ok = false;
  int subsets_used = 0;  // r3
};

// Identifies the full 2n-bit syndrome by structured subset parities.  The
// committed budget is ceil(2n H(alpha_hat + delta)) + 40 subsets, or the
// summed per-position entropy plus the same slack when priors are supplied
// (e.g. separate X-flag and Z-flag rates).  The full budget is consumed even
// if decoding converges early: the committed hash material is spent either
// way, which keeps ebit accounting honest.  `known` marks positions already
// revealed by consumed pairs (-1 = unknown).
inline HashResult hash_identify(EbitKeyRegister& reg, double alpha_hat, double delta,
                                RngStream& rng,
                                const std::vector<double>& position_priors = {},
                                const std::vector<int>& known = {}) {
  if (alpha_hat < 0.0 || delta <= 0.0 || alpha_hat + delta >= 0.5)
    throw std::invalid_argument("hash_identify: requires 0 <= alphaHat and alphaHat + delta < 1/2");
  const int m = reg.num_key_pairs();
  HashResult out;
  out.v = SyndromeVector(m);
  if (!known.empty() && static_cast<int>(known.size()) != m)
    throw std::invalid_argument("hash_identify: known-vector size mismatch");

  std::vector<double> priors(m, std::min(alpha_hat + 0.0, 0.5));
  if (!position_priors.empty()) {
    if (static_cast<int>(position_priors.size()) != m)
      throw std::invalid_argument("hash_identify: prior size mismatch");
    priors = position_priors;
  }
  double prior_entropy = 0.0;
  int unknown = 0;
  for (int j = 0; j < m; ++j) {
    if (!known.empty() && known[j] >= 0) {
      priors[j] = known[j] ? 1.0 : 0.0;
    } else {
      priors[j] = std::clamp(priors[j], 1e-4, 0.5);
      prior_entropy += binary_entropy(std::min(priors[j] + delta, 0.5));
      ++unknown;
    }
  }
  int budget = position_priors.empty()
                   ? static_cast<int>(std::ceil(unknown * binary_entropy(alpha_hat + delta))) + 40
                   : static_cast<int>(std::ceil(prior_entropy)) + 40;

  SubsetParityIdentifier::Oracle oracle = [&](const std::vector<std::uint8_t>& mask) {
    int parity = 0;
    std::vector<int> subset;
    for (int j = 0; j < m; ++j) {
      if (!mask[j]) continue;
      if (!known.empty() && known[j] >= 0)
        parity ^= known[j];
      else
        subset.push_back(j);
    }
    if (!subset.empty()) {
      int ancilla = reg.allocate_ancilla();
      parity ^= subset_parity(reg, subset, ancilla, rng);
    }
    return parity;
  };

  auto res = SubsetParityIdentifier::identify(priors, budget, oracle, rng);
  out.v.bits = res.v;
  out.ok = res.ok;
  out.subsets_used = res.subsets_used;
  // burn the remaining committed subsets so consumption equals the budget
  if (out.ok && out.subsets_used < budget) {
    std::vector<int> open;
    for (int j = 0; j < m; ++j)
      if (known.empty() || known[j] < 0) open.push_back(j);
    while (out.subsets_used < budget && !open.empty()) {
      std::vector<int> subset;
      do {
        subset.clear();
        for (int j : open)
          if (rng.bit()) subset.push_back(j);
      } while (subset.empty());
      int ancilla = reg.allocate_ancilla();
      subset_parity(reg, subset, ancilla, rng);
      ++out.subsets_used;
    }
  }
  return out;
}

// ---- recycling round -------------------------------------------------------

struct RecycleParams {
  int r = 4;          // preliminary-test subsets
  double delta = 0.05;
  double eps = 0.05;  // weight-estimate failure tolerance
};

struct RecycleReport {
  std::string stage;  // "passed-preliminary" or "hashed"
  int r = 0;
  int r2 = 0;
  int r3 = 0;
  double alpha_hat = 0.0;
  std::string syndrome_hex;
  int ebits_consumed = 0;
  int ebits_recycled = 0;
  bool accepted = false;
};

struct RecycleOutcome {
  RecycleReport report;
  bool preliminary_pass = false;
  bool erroneous = false;           // harness: true syndrome was nonzero
  bool correction_correct = false;  // harness: identified == ground truth
  SyndromeVector correction;
};

namespace detail {

// Shared post-transmission protocol: preliminary test, then (on fail) weight
// estimation and hashing identification with measure-out fallback.  Repairs
// flagged unconsumed pairs so recycled pairs are Phi+ again.
template <typename RepairFn>
RecycleOutcome run_recycle_protocol(EbitKeyRegister& reg, const RecycleParams& params,
                                    const SyndromeVector& truth, RngStream& rng,
                                    const RepairFn& repair_pair) {
  const int m = reg.num_key_pairs();
  RecycleOutcome out;
  out.correction = SyndromeVector(m);
  out.erroneous = !truth.is_zero();
  out.report.r = params.r;

  PreliminaryResult prelim = preliminary_test(reg, params.r, rng);
  out.preliminary_pass = prelim.pass;
  if (prelim.pass) {
    out.report.stage = "passed-preliminary";
    out.report.accepted = true;
    out.report.alpha_hat = 0.0;
    out.correction_correct = !out.erroneous;  // accepted as error-free
  } else {
    out.report.stage = "hashed";
    int r2 = std::min(chebyshev_sample_size(params.delta, params.eps), m);
    WeightEstimate est = estimate_weight(reg, r2, rng);
    out.report.r2 = r2;
    out.report.alpha_hat = est.alpha_hat;

    std::vector<int> known(m, -1);
    for (std::size_t k = 0; k < est.sampled.size(); ++k)
      known[est.sampled[k]] = est.sampled_bits[k];

    // class priors: Z flags live at even positions, X flags at odd
    double cnt[2] = {0, 0}, ones[2] = {0, 0};
    for (std::size_t k = 0; k < est.sampled.size(); ++k) {
      int cls = est.sampled[k] & 1;
      cnt[cls] += 1.0;
      ones[cls] += est.sampled_bits[k];
    }
    std::vector<double> priors(m);
    for (int j = 0; j < m; ++j) {
      int cls = j & 1;
      priors[j] = cnt[cls] > 0 ? ones[cls] / cnt[cls] : est.alpha_hat;
    }

    bool identified = false;
    if (est.alpha_hat + params.delta < 0.5) {
      HashResult hr = hash_identify(reg, std::max(est.alpha_hat, 1e-3), params.delta,
                                    rng, priors, known);
      out.report.r3 = hr.subsets_used;
      if (hr.ok) {
        out.correction = hr.v;
        identified = true;
      }
    }
    if (!identified) {
      // measure every remaining pair out; exact but recycles nothing
      for (int p = 0; p < m; ++p) {
        if (known[p] >= 0) {
          out.correction.bits[p] = static_cast<std::uint8_t>(known[p]);
        } else {
          auto [a, b] = reg.measure_pm(p, rng);
          out.correction.bits[p] = static_cast<std::uint8_t>(a ^ b);
        }
      }
    }
    out.report.accepted = true;
    out.correction_correct = out.correction == truth;
  }

  // repair flagged unconsumed pairs back to Phi+
  for (int p = 0; p < m; ++p)
    if (!reg.consumed(p) && out.correction.bits[p]) repair_pair(p);

  out.report.ebits_consumed = reg.count_consumed() + reg.ancillas_used();
  out.report.ebits_recycled = m - reg.count_consumed();
  out.report.syndrome_hex = out.correction.to_hex();
  return out;
}

inline int ancilla_pool_size(int n, const RecycleParams& params) {
  // preliminary + worst-case hashing budget (<= 2n + 40 incl. verification)
  return params.r + 2 * n + 48;
}

}  // namespace detail

// Classical Bell-label round: trajectory-samples the channel, runs the full
// two-stage procedure on labels.  Used for high-trial statistics.
inline RecycleOutcome recycle_round_labels(int n, const PauliChannel& channel,
                                           const RecycleParams& params, RngStream& rng) {
  if (channel.size() != n) throw std::invalid_argument("recycle_round_labels: size mismatch");
  LabelKeyRegister reg(n, detail::ancilla_pool_size(n, params));
  PauliOperator err = channel.sample(rng);
  std::vector<std::uint8_t> x_err(err.x_exp.begin(), err.x_exp.end());
  std::vector<std::uint8_t> z_err(err.z_exp.begin(), err.z_exp.end());
  reg.imprint_error(x_err, z_err);
  SyndromeVector truth = SyndromeVector::from_error(x_err, z_err);
  return detail::run_recycle_protocol(reg, params, truth, rng,
                                      [&](int pair) { reg.phase_flip(pair); });
}

// Full-engine round: message prepared by `message_prep` on a stabilizer
// state, encoded, attacked, decoded, corrected.  fidelity_one is the exact
// check that the corrected message equals the prepared one.
struct EngineRecycleOutcome {
  RecycleOutcome outcome;
  bool fidelity_one = false;
};

inline EngineRecycleOutcome recycle_round_tableau(int n, const Circuit& message_prep,
                                                  const PauliChannel& channel,
                                                  const RecycleParams& params,
                                                  RngStream& rng) {
  if (channel.size() != n) throw std::invalid_argument("recycle_round_tableau: size mismatch");
  const int pool = detail::ancilla_pool_size(n, params);
  QvcWireMap wires = QvcWireMap::standard(n, pool);
  StabilizerState st(wires.total_wires());
  prepare_pairs(st, wires);
  message_prep.apply_to(st);
  qvc_encode(st, wires);
  PauliOperator sampled = apply_pauli_channel(st, channel, wires.message, rng);
  qvc_decode(st, wires);

  std::vector<std::pair<int, int>> pair_wires = wires.pair;
  TableauKeyRegister reg(&st, n, std::move(pair_wires));
  SyndromeVector truth = SyndromeVector::from_pauli(sampled);

  EngineRecycleOutcome out;
  out.outcome = detail::run_recycle_protocol(reg, params, truth, rng, [&](int pair) {
    st.apply_gate(GateKind::Z, wires.pair[pair].first);
  });

  // apply the Pauli correction to the decoded message
  for (int i = 0; i < n; ++i) {
    if (out.outcome.correction.bits[2 * i + 1])
      st.apply_gate(GateKind::X, wires.message[i]);
    if (out.outcome.correction.bits[2 * i])
      st.apply_gate(GateKind::Z, wires.message[i]);
  }
  // exact fidelity-1 check: invert the preparation and verify the message
  // register is back to |0...0>
  Circuit inv = message_prep.inverse();
  inv.apply_to(st);
  out.fidelity_one = true;
  for (int i = 0; i < n; ++i) {
    auto s = st.deterministic_sign(PauliOperator::z_on(st.num_qubits(), wires.message[i]));
    if (!s.has_value() || *s != 0) {
      out.fidelity_one = false;
      break;
    }
  }
  return out;
}

// ---- recovery without the cipher-text --------------------------------------

struct RecoveryOutcome {
  int s1 = 0;  // +/- parity of the first key pair
  int s2 = 0;  // +/- parity of the second key pair
  double corrected_fidelity = 0.0;
};

// Single-qubit message |psi> was encoded and the cipher-text qubit lost in
// transit.  Bob substitutes a fresh |0>, runs the decode circuit, and the +/-
// parities of the two key pairs pick one of four equal-weight branches; the
// correction X^{s2} Z^{s1} restores |psi> exactly in every branch.
inline RecoveryOutcome recover_without_ciphertext(const DenseState& psi, RngStream& rng) {
  if (psi.num_qudits() != 1 || psi.dimension() != 2)
    throw std::invalid_argument("recover_without_ciphertext: expects a single qubit");
  cplx a = psi.amplitude(0), b = psi.amplitude(1);
  DenseState st(5, 2);
  QvcWireMap enc;
  enc.message = {0};
  enc.pair = {{1, 2}, {3, 4}};
  prepare_pairs(st, enc);
  // completion unitary taking |0> to psi
  std::vector<cplx> u = {a, -std::conj(b), b, std::conj(a)};
  int wire0 = 0;
  st.apply_matrix(u, std::span<const int>(&wire0, 1));
  qvc_encode(st, enc);

  st.remove_qudit(0, rng);  // the lost cipher-text, traced out via measurement
  st.append_qudit(0);       // Bob's substitute |0>
  QvcWireMap dec;
  dec.message = {4};
  dec.pair = {{0, 1}, {2, 3}};
  qvc_decode(st, dec);

  RecoveryOutcome out;
  out.s1 = st.measure_pauli(PauliOperator::x_on(5, 0), rng) ^
           st.measure_pauli(PauliOperator::x_on(5, 1), rng);
  out.s2 = st.measure_pauli(PauliOperator::x_on(5, 2), rng) ^
           st.measure_pauli(PauliOperator::x_on(5, 3), rng);
  if (out.s2) st.apply_gate(GateKind::X, 4);
  if (out.s1) st.apply_gate(GateKind::Z, 4);
  int keep = 4;
  auto rho = st.density_matrix(std::span<const int>(&keep, 1));
  cplx f = std::conj(a) * (rho[0] * a + rho[1] * b) +
           std::conj(b) * (rho[2] * a + rho[3] * b);
  out.corrected_fidelity = f.real();
  return out;
}

}  // namespace qvc
