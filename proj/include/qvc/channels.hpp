#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qvc/dense_state.hpp"
#include "qvc/pauli.hpp"
#include "qvc/rng.hpp"
#include "qvc/stats.hpp"

namespace qvc {

// Per-qubit error distribution over {I, X, Z, XZ}.
struct SingleQubitPauliProbs {
  double pi = 1.0;
  double px = 0.0;
  double pz = 0.0;
  double pxz = 0.0;

  void validate() const {
    double s = pi + px + pz + pxz;
    if (pi < 0 || px < 0 || pz < 0 || pxz < 0 || std::fabs(s - 1.0) > 1e-12)
      throw std::invalid_argument(
          "SingleQubitPauliProbs: probabilities must be nonnegative and sum to 1");
  }

  double entropy_bits() const {
    const double p[4] = {pi, px, pz, pxz};
    return shannon_entropy(std::span<const double>(p, 4));
  }
};

// Probability distribution over qubit Pauli errors on an n-qubit cipher-text.
// Either an explicit list of (operator, probability) entries or an i.i.d.
// per-qubit product distribution (used for the named presets at any n).
class PauliChannel {
 public:
  static PauliChannel explicit_list(int n,
                                    std::vector<std::pair<PauliOperator, double>> entries,
                                    std::string name = "custom") {
    if (n <= 0) throw std::invalid_argument("PauliChannel: size must be positive");
    double total = 0.0;
    for (const auto& [op, p] : entries) {
      if (op.n != n || op.d != 2)
        throw std::invalid_argument("PauliChannel: operator size or dimension mismatch");
      if (p < 0.0) throw std::invalid_argument("PauliChannel: negative probability");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12)
      throw std::invalid_argument("PauliChannel: probabilities must sum to 1");
    PauliChannel ch;
    ch.n_ = n;
    ch.entries_ = std::move(entries);
    ch.name_ = std::move(name);
    return ch;
  }

  static PauliChannel iid(int n, SingleQubitPauliProbs probs, std::string name = "custom-iid") {
    if (n <= 0) throw std::invalid_argument("PauliChannel: size must be positive");
    probs.validate();
    PauliChannel ch;
    ch.n_ = n;
    ch.iid_ = probs;
    ch.is_iid_ = true;
    ch.name_ = std::move(name);
    return ch;
  }

  int size() const { return n_; }
  const std::string& name() const { return name_; }
  bool is_iid() const { return is_iid_; }

  const SingleQubitPauliProbs& qubit_probs() const {
    if (!is_iid_) throw std::logic_error("PauliChannel: not an i.i.d. channel");
    return iid_;
  }

  const std::vector<std::pair<PauliOperator, double>>& entries() const {
    if (is_iid_) throw std::logic_error("PauliChannel: i.i.d. channel has no explicit list");
    return entries_;
  }

  PauliOperator sample(RngStream& rng) const {
    if (is_iid_) {
      PauliOperator p(n_, 2);
      for (int q = 0; q < n_; ++q) {
        double u = rng.uniform_double();
        if (u < iid_.pi) continue;
        u -= iid_.pi;
        if (u < iid_.px) {
          p.x_exp[q] = 1;
        } else if (u < iid_.px + iid_.pz) {
          p.z_exp[q] = 1;
        } else {
          p.x_exp[q] = 1;
          p.z_exp[q] = 1;
        }
      }
      return p;
    }
    double u = rng.uniform_double();
    double acc = 0.0;
    for (const auto& [op, pr] : entries_) {
      acc += pr;
      if (u < acc) return op;
    }
    return entries_.back().first;
  }

  // Shannon entropy of the full error distribution, in bits.
  double entropy_bits() const {
    if (is_iid_) return static_cast<double>(n_) * iid_.entropy_bits();
    std::vector<double> p;
    p.reserve(entries_.size());
    for (const auto& e : entries_) p.push_back(e.second);
    return shannon_entropy(p);
  }

 private:
  PauliChannel() = default;

  int n_ = 0;
  bool is_iid_ = false;
  SingleQubitPauliProbs iid_;
  std::vector<std::pair<PauliOperator, double>> entries_;
  std::string name_;
};

enum class NamedChannelPreset {
  Noiseless,
  ZMeasureAll,
  PaperMix,
  DepolarizingComplete,
};

inline const char* preset_name(NamedChannelPreset p) {
  switch (p) {
    case NamedChannelPreset::Noiseless: return "noiseless";
    case NamedChannelPreset::ZMeasureAll: return "z-measure-all";
    case NamedChannelPreset::PaperMix: return "paper-mix";
    case NamedChannelPreset::DepolarizingComplete: return "depolarizing-complete";
  }
  return "?";
}

inline NamedChannelPreset preset_from_name(const std::string& s) {
  if (s == "noiseless") return NamedChannelPreset::Noiseless;
  if (s == "z-measure-all") return NamedChannelPreset::ZMeasureAll;
  if (s == "paper-mix") return NamedChannelPreset::PaperMix;
  if (s == "depolarizing-complete") return NamedChannelPreset::DepolarizingComplete;
  throw std::invalid_argument("unknown channel preset: " + s);
}

// Per-qubit distributions behind the presets.  z-measure-all models an
// eavesdropper measuring every qubit in the computational basis (effective
// Z with probability 1/2); paper-mix is the {1/2, 1/6, 1/6, 1/6} mixture;
// depolarizing-complete is uniform over {I, X, Z, XZ}.
inline SingleQubitPauliProbs preset_qubit_probs(NamedChannelPreset p) {
  switch (p) {
    case NamedChannelPreset::Noiseless: return {1.0, 0.0, 0.0, 0.0};
    case NamedChannelPreset::ZMeasureAll: return {0.5, 0.0, 0.5, 0.0};
    case NamedChannelPreset::PaperMix:
      return {0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    case NamedChannelPreset::DepolarizingComplete: return {0.25, 0.25, 0.25, 0.25};
  }
  throw std::invalid_argument("invalid preset");
}

inline PauliChannel preset_channel(NamedChannelPreset p, int n) {
  return PauliChannel::iid(n, preset_qubit_probs(p), preset_name(p));
}

inline double channel_entropy(const PauliChannel& ch) { return ch.entropy_bits(); }

template <typename State>
int embedded_size(const State& state) {
  if constexpr (requires { state.num_qudits(); })
    return state.num_qudits();
  else
    return state.num_qubits();
}

// Sample one Pauli, apply it to the cipher wires of `state`, and return the
// sampled operator.  The return value is ground truth for the test harness;
// protocol parties never see it.
template <typename State>
PauliOperator apply_pauli_channel(State& state, const PauliChannel& channel,
                                  std::span<const int> cipher_indices, RngStream& rng) {
  if (static_cast<int>(cipher_indices.size()) != channel.size())
    throw std::invalid_argument("apply_pauli_channel: index count mismatch");
  PauliOperator sampled = channel.sample(rng);
  if (!sampled.is_identity()) {
    PauliOperator embedded(embedded_size(state), 2);
    int xz = 0;
    for (int q = 0; q < channel.size(); ++q) {
      embedded.x_exp[cipher_indices[q]] = sampled.x_exp[q];
      embedded.z_exp[cipher_indices[q]] = sampled.z_exp[q];
      xz += sampled.x_exp[q] * sampled.z_exp[q];
    }
    // Hermitian canonical phase i^{xz}; a global phase on the applied error
    embedded.phase = xz % 4;
    state.apply_pauli(embedded);
  }
  return sampled;
}

// Joint unitary on the transmitted cipher-text plus Eve's pure |0...0>
// ancilla.  The ancilla stays in the joint state afterwards.
struct UnitaryAttack {
  int ancilla_qubits = 0;
  std::vector<cplx> matrix;  // row-major over cipher (+) ancilla, cipher least significant

  void validate(int cipher_qubits) const {
    std::size_t dim = std::size_t(1) << (cipher_qubits + ancilla_qubits);
    if (matrix.size() != dim * dim)
      throw std::invalid_argument("UnitaryAttack: matrix size mismatch");
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) {
        cplx acc(0, 0);
        for (std::size_t k = 0; k < dim; ++k)
          acc += std::conj(matrix[k * dim + r]) * matrix[k * dim + c];
        cplx want = (r == c) ? cplx(1, 0) : cplx(0, 0);
        if (std::abs(acc - want) > 1e-9)
          throw std::invalid_argument("UnitaryAttack: matrix is not unitary");
      }
  }
};

// Extends `state` by the ancilla qubits (appended as the highest indices) and
// applies the attack unitary to cipher wires + ancilla.
inline void apply_unitary_attack(DenseState& state, const UnitaryAttack& attack,
                                 std::span<const int> cipher_indices) {
  attack.validate(static_cast<int>(cipher_indices.size()));
  std::vector<int> targets(cipher_indices.begin(), cipher_indices.end());
  for (int a = 0; a < attack.ancilla_qubits; ++a) {
    state.append_qudit(0);
    targets.push_back(state.num_qudits() - 1);
  }
  state.apply_matrix(attack.matrix, targets);
}

enum class InterceptBasisPolicy { FixedZ, FixedX, RandomPerQubit };

struct InterceptResendAttack {
  std::vector<int> intercept;  // tapped cipher-text wire indices
  InterceptBasisPolicy policy = InterceptBasisPolicy::RandomPerQubit;
};

struct InterceptRecord {
  int qubit = 0;
  int basis = 0;  // 0 = Z, 1 = X
  int outcome = 0;
};

// Measures each tapped qubit in the chosen basis; the post-measurement state
// is the exact observed eigenstate, so the resend is implicit.
template <typename State>
std::vector<InterceptRecord> apply_intercept_resend(State& state,
                                                    const InterceptResendAttack& attack,
                                                    RngStream& rng) {
  std::vector<InterceptRecord> record;
  record.reserve(attack.intercept.size());
  const int n = embedded_size(state);
  for (int q : attack.intercept) {
    if (q < 0 || q >= n) throw std::out_of_range("apply_intercept_resend: index");
    int basis;
    switch (attack.policy) {
      case InterceptBasisPolicy::FixedZ: basis = 0; break;
      case InterceptBasisPolicy::FixedX: basis = 1; break;
      default: basis = rng.bit() ? 1 : 0; break;
    }
    PauliOperator obs =
        basis == 0 ? PauliOperator::z_on(n, q) : PauliOperator::x_on(n, q);
    int outcome = state.measure_pauli(obs, rng);
    record.push_back({q, basis, outcome});
  }
  return record;
}

}  // namespace qvc
