#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qvc/pauli.hpp"
#include "qvc/rng.hpp"
#include "qvc/stabilizer_state.hpp"

namespace qvc {

// Shared Bell-pair key for the entanglement-based cipher, plus an ancilla
// pool for parity tests.  Pairs are indexed 0..total-1: pairs [0, 2n) are the
// key (pair 2i is the CNOT-control role for message qubit i, pair 2i+1 the
// CZ-control role); pairs [2n, total) are the ancilla pool.
//
// Operations are restricted to what the protocol parties can actually do:
// bilateral XOR between pairs and local +/- measurements with announced
// outcomes.  ground_truth_label is harness-only.
class EbitKeyRegister {
 public:
  virtual ~EbitKeyRegister() = default;

  int num_message_qubits() const { return n_; }
  int num_key_pairs() const { return 2 * n_; }
  int total_pairs() const { return total_; }
  int ancillas_used() const { return ancilla_used_; }

  int allocate_ancilla() {
    int p = 2 * n_ + ancilla_used_;
    if (p >= total_) throw std::runtime_error("EbitKeyRegister: ancilla pool exhausted");
    ++ancilla_used_;
    return p;
  }

  bool consumed(int pair) const { return consumed_.at(pair); }

  int count_consumed() const {
    int c = 0;
    for (int p = 0; p < 2 * n_; ++p)
      if (consumed_[p]) ++c;
    return c;
  }

  // Bilateral XOR: both parties apply CNOT from their half of `control_pair`
  // to their half of `target_pair`.  Label algebra: control z-bit becomes the
  // XOR of both z-bits, target x-bit the XOR of both x-bits.
  virtual void bxor(int control_pair, int target_pair) = 0;

  // Both parties measure their halves of `pair` in the +/- basis and
  // announce.  Returns (alice bit, bob bit), 0 meaning |+>.  The XOR of the
  // announcements is the pair's z-bit.  Consumes the pair.
  virtual std::pair<int, int> measure_pm(int pair, RngStream& rng) = 0;

  // Harness-only ground truth; not part of the parties' view.
  virtual BellLabel ground_truth_label(int pair) const = 0;

 protected:
  EbitKeyRegister(int n, int ancilla_pool)
      : n_(n), total_(2 * n + ancilla_pool), consumed_(total_, false) {
    if (n <= 0 || ancilla_pool < 0) throw std::invalid_argument("EbitKeyRegister: bad sizes");
  }

  void check_pair(int pair) const {
    if (pair < 0 || pair >= total_) throw std::out_of_range("EbitKeyRegister: pair index");
    if (consumed_[pair]) throw std::logic_error("EbitKeyRegister: pair already consumed");
  }

  int n_;
  int total_;
  int ancilla_used_ = 0;
  std::vector<bool> consumed_;
};

// Classical backend: every pair is tracked by its Bell label.  Valid because
// the protocol only ever touches pairs through bilateral CNOTs and Bell-basis
// -compatible local measurements, under which labels evolve classically.
// Used for high-trial-count statistics; cross-validated against the tableau
// backend in tests.
class LabelKeyRegister : public EbitKeyRegister {
 public:
  LabelKeyRegister(int n, int ancilla_pool)
      : EbitKeyRegister(n, ancilla_pool), z_(total_, 0), x_(total_, 0) {}

  // Harness hook: record the transmission error (x_err/z_err per message
  // qubit).  A Z error flags pair 2i, an X error flags pair 2i+1.
  void imprint_error(const std::vector<std::uint8_t>& x_err,
                     const std::vector<std::uint8_t>& z_err) {
    if (static_cast<int>(x_err.size()) != n_ || static_cast<int>(z_err.size()) != n_)
      throw std::invalid_argument("imprint_error: size mismatch");
    for (int i = 0; i < n_; ++i) {
      z_[2 * i] = static_cast<std::uint8_t>(z_[2 * i] ^ z_err[i]);
      z_[2 * i + 1] = static_cast<std::uint8_t>(z_[2 * i + 1] ^ x_err[i]);
    }
  }

  void bxor(int control_pair, int target_pair) override {
    check_pair(control_pair);
    check_pair(target_pair);
    z_[control_pair] = static_cast<std::uint8_t>(z_[control_pair] ^ z_[target_pair]);
    x_[target_pair] = static_cast<std::uint8_t>(x_[target_pair] ^ x_[control_pair]);
  }

  std::pair<int, int> measure_pm(int pair, RngStream& rng) override {
    check_pair(pair);
    consumed_[pair] = true;
    int a = rng.bit() ? 1 : 0;
    int b = a ^ z_[pair];
    return {a, b};
  }

  BellLabel ground_truth_label(int pair) const override {
    return bell_label_from_bits(z_.at(pair) != 0, x_.at(pair) != 0);
  }

  // Alice applies Z to her half, flipping the pair back to Phi+.
  void phase_flip(int pair) { z_.at(pair) = static_cast<std::uint8_t>(z_.at(pair) ^ 1); }

 private:
  std::vector<std::uint8_t> z_;
  std::vector<std::uint8_t> x_;
};

// Tableau backend: pairs live as wires of a caller-owned stabilizer state
// (which typically also holds the message register).
class TableauKeyRegister : public EbitKeyRegister {
 public:
  // pair_wires[p] = (alice wire, bob wire) for pair p; pairs beyond 2n form
  // the ancilla pool.  The caller prepares each pair as Phi+.
  TableauKeyRegister(StabilizerState* state, int n,
                     std::vector<std::pair<int, int>> pair_wires)
      : EbitKeyRegister(n, static_cast<int>(pair_wires.size()) - 2 * n),
        st_(state),
        wires_(std::move(pair_wires)) {
    if (st_ == nullptr) throw std::invalid_argument("TableauKeyRegister: null state");
  }

  std::pair<int, int> wires(int pair) const { return wires_.at(pair); }

  void bxor(int control_pair, int target_pair) override {
    check_pair(control_pair);
    check_pair(target_pair);
    auto [ac, bc] = wires_[control_pair];
    auto [at, bt] = wires_[target_pair];
    st_->apply_gate(GateKind::CNOT, ac, at);
    st_->apply_gate(GateKind::CNOT, bc, bt);
  }

  std::pair<int, int> measure_pm(int pair, RngStream& rng) override {
    check_pair(pair);
    consumed_[pair] = true;
    auto [aw, bw] = wires_[pair];
    int n = st_->num_qubits();
    int a = st_->measure_pauli(PauliOperator::x_on(n, aw), rng);
    int b = st_->measure_pauli(PauliOperator::x_on(n, bw), rng);
    return {a, b};
  }

  BellLabel ground_truth_label(int pair) const override {
    auto [aw, bw] = wires_.at(pair);
    return st_->bell_identify(aw, bw);
  }

 private:
  StabilizerState* st_;
  std::vector<std::pair<int, int>> wires_;
};

}  // namespace qvc
