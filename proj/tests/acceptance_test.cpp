// Acceptance harness: one pass/fail line per claim, with wall-clock limits.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qvc/baselines.hpp"
#include "qvc/channels.hpp"
#include "qvc/dense_state.hpp"
#include "qvc/key_register.hpp"
#include "qvc/pqc.hpp"
#include "qvc/resources.hpp"
#include "qvc/rng.hpp"
#include "qvc/scenario.hpp"
#include "qvc/secret_sharing.hpp"
#include "qvc/stabilizer_state.hpp"
#include "qvc/stats.hpp"
#include "qvc/vernam.hpp"

using namespace qvc;

namespace {

double trace_distance(const std::vector<cplx>& a, const std::vector<cplx>& b, int dim) {
  Eigen::MatrixXcd d(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      d(i, j) = a[static_cast<std::size_t>(i) * dim + j] - b[static_cast<std::size_t>(i) * dim + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(d);
  double sum = 0.0;
  for (int i = 0; i < dim; ++i) sum += std::fabs(solver.eigenvalues()(i));
  return 0.5 * sum;
}

std::vector<cplx> key_average(const DenseState& probe) {
  const int n = probe.num_qudits();
  const int dim = 1 << n;
  std::vector<cplx> avg(static_cast<std::size_t>(dim) * dim, cplx(0, 0));
  const int keys = 1 << (2 * n);
  for (int k = 0; k < keys; ++k) {
    ClassicalPauliKey key;
    key.bits.resize(2 * n);
    for (int b = 0; b < 2 * n; ++b) key.bits[b] = (k >> b) & 1;
    DenseState st = probe;
    pqc_encrypt(st, key);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b)
        avg[static_cast<std::size_t>(a) * dim + b] +=
            st.amplitude(a) * std::conj(st.amplitude(b)) / static_cast<double>(keys);
  }
  return avg;
}

Circuit random_prep(int n, RngStream& rng) {
  Circuit c;
  for (int i = 0; i < 3 * n; ++i) {
    int pick = static_cast<int>(rng.uniform_int(4));
    int a = static_cast<int>(rng.uniform_int(n));
    if (pick == 3 && n > 1) {
      int b = static_cast<int>(rng.uniform_int(n - 1));
      if (b >= a) ++b;
      c.push(GateKind::CNOT, a, b);
    } else if (pick == 0) {
      c.push(GateKind::H, a);
    } else if (pick == 1) {
      c.push(GateKind::X, a);
    } else {
      c.push(GateKind::Z, a);
    }
  }
  return c;
}

bool fail(std::string& msg, const std::string& text) {
  if (msg.empty()) msg = text;
  return false;
}

// ---- criterion 1: key-average randomization -------------------------------

bool criterion_randomization(std::string& msg) {
  RngStream master(0xac01u);
  for (int n : {1, 2, 3}) {
    const int dim = 1 << n;
    std::vector<cplx> mixed(static_cast<std::size_t>(dim) * dim, cplx(0, 0));
    for (int a = 0; a < dim; ++a) mixed[static_cast<std::size_t>(a) * dim + a] = 1.0 / dim;
    for (int p = 0; p < 20; ++p) {
      RngStream rng = master.substream(100 * n + p);
      DenseState probe = DenseState::random(n, 2, rng);
      double dist = trace_distance(key_average(probe), mixed, dim);
      if (dist > 1e-9)
        return fail(msg, "trace distance " + std::to_string(dist) + " at n=" + std::to_string(n));
    }
  }
  return true;
}

// ---- criterion 2: entangled-key purification ------------------------------

bool criterion_purification(std::string& msg) {
  RngStream master(0xac02u);
  for (int n : {1, 2}) {
    QvcWireMap w = QvcWireMap::standard(n);
    const int dim = 1 << n;
    for (int p = 0; p < 5; ++p) {
      RngStream rng = master.substream(100 * n + p);
      DenseState probe = DenseState::random(n, 2, rng);
      std::vector<cplx> amps(std::size_t(1) << w.total_wires(), cplx(0, 0));
      for (std::size_t i = 0; i < probe.dim(); ++i) amps[i] = probe.amplitude(i);
      DenseState joint = DenseState::from_amplitudes(w.total_wires(), 2, std::move(amps),
                                                     std::size_t(1) << 16);
      prepare_pairs(joint, w);
      qvc_encode(joint, w);
      auto reduced = joint.density_matrix(w.message);
      double dist = trace_distance(reduced, key_average(probe), dim);
      if (dist > 1e-9)
        return fail(msg, "purification distance " + std::to_string(dist));
    }
  }
  return true;
}

// ---- criterion 3: syndrome table ------------------------------------------

bool criterion_syndrome_table(std::string& msg) {
  for (int n : {1, 2, 3}) {
    const int errors = 1 << (2 * n);
    for (int e = 0; e < errors; ++e) {
      QvcWireMap w = QvcWireMap::standard(n);
      StabilizerState st(w.total_wires());
      prepare_pairs(st, w);
      qvc_encode(st, w);
      for (int q = 0; q < n; ++q) {
        int kind = (e >> (2 * q)) & 3;  // bit0 = X, bit1 = Z
        if (kind & 1) st.apply_gate(GateKind::X, w.message[q]);
        if (kind & 2) st.apply_gate(GateKind::Z, w.message[q]);
      }
      qvc_decode(st, w);
      for (int p = 0; p < 2 * n; ++p) {
        int q = p / 2;
        int kind = (e >> (2 * q)) & 3;
        bool flagged = (p % 2 == 0 && (kind & 2)) || (p % 2 == 1 && (kind & 1));
        BellLabel lbl = st.bell_identify(w.pair[p].first, w.pair[p].second);
        if (lbl == BellLabel::PsiPlus || lbl == BellLabel::PsiMinus)
          return fail(msg, "psi state appeared");
        if (lbl != (flagged ? BellLabel::PhiMinus : BellLabel::PhiPlus))
          return fail(msg, "wrong pair label at n=" + std::to_string(n));
      }
    }
  }
  return true;
}

// ---- criterion 4: preliminary-test false-pass rate ------------------------

bool criterion_preliminary(std::string& msg) {
  RngStream master(0xac04u);
  const int n = 8, trials = 100000;
  for (int r = 1; r <= 8; ++r) {
    int passes = 0;
    for (int t = 0; t < trials; ++t) {
      RngStream rng = master.substream(1000000 * r + t);
      LabelKeyRegister reg(n, r);
      std::vector<std::uint8_t> xe(n, 0), ze(n, 0);
      bool nonzero = false;
      while (!nonzero) {
        for (int i = 0; i < n; ++i) {
          xe[i] = rng.bit() ? 1 : 0;
          ze[i] = rng.bit() ? 1 : 0;
          nonzero = nonzero || xe[i] || ze[i];
        }
      }
      reg.imprint_error(xe, ze);
      if (preliminary_test(reg, r, rng).pass) ++passes;
    }
    double p = std::pow(0.5, r);
    double sigma = std::sqrt(p * (1 - p) / trials);
    double freq = passes / static_cast<double>(trials);
    if (std::fabs(freq - p) > 3 * sigma)
      return fail(msg, "r=" + std::to_string(r) + " freq=" + std::to_string(freq));
  }
  return true;
}

// ---- criterion 5: recycle fidelity and false-pass bound -------------------

bool criterion_recycle(std::string& msg) {
  RngStream master(0xac05u);
  // full-engine trajectories across the presets
  const std::array<NamedChannelPreset, 4> presets = {
      NamedChannelPreset::Noiseless, NamedChannelPreset::ZMeasureAll,
      NamedChannelPreset::PaperMix, NamedChannelPreset::DepolarizingComplete};
  for (auto preset : presets) {
    for (int n : {6, 16}) {
      for (int t = 0; t < 4; ++t) {
        RngStream rng = master.substream(1000 * static_cast<int>(preset) + 10 * n + t);
        Circuit prep = random_prep(n, rng);
        auto ch = preset_channel(preset, n);
        auto out = recycle_round_tableau(n, prep, ch, {}, rng);
        // a false preliminary pass accepts the state as-is; that trajectory is
        // covered by the probability bound below, not the fidelity claim
        if (out.outcome.preliminary_pass && out.outcome.erroneous) continue;
        if (!out.fidelity_one) return fail(msg, "corrected fidelity below 1");
      }
    }
  }
  {
    RngStream rng = master.substream(999);
    Circuit prep = random_prep(64, rng);
    auto ch = preset_channel(NamedChannelPreset::PaperMix, 64);
    auto out = recycle_round_tableau(64, prep, ch, {}, rng);
    if (!(out.outcome.preliminary_pass && out.outcome.erroneous) && !out.fidelity_one)
      return fail(msg, "corrected fidelity below 1 at n=64");
  }
  // Prob(pass AND erroneous) <= 2^-r, label backend for statistics
  const int trials = 20000, n = 16, r = 4;
  auto ch = preset_channel(NamedChannelPreset::PaperMix, n);
  RecycleParams params;
  params.r = r;
  int pass_err = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream rng = master.substream(500000 + t);
    auto out = recycle_round_labels(n, ch, params, rng);
    if (out.preliminary_pass && out.erroneous) ++pass_err;
  }
  double p = std::pow(0.5, r);
  double sigma = std::sqrt(p * (1 - p) / trials);
  double freq = pass_err / static_cast<double>(trials);
  if (freq > p + 3 * sigma) return fail(msg, "pass-and-erroneous freq " + std::to_string(freq));
  return true;
}

// ---- criterion 6: hashing identification budget and yield -----------------

bool criterion_hashing(std::string& msg) {
  RngStream master(0xac06u);
  const double delta = 0.05;
  for (int n : {16, 128, 512}) {
    const int m = 2 * n;
    for (double alpha : {0.0, 0.1, 0.25}) {
      const int trials = 1000;
      int good = 0;
      double used_sum = 0.0;
      int budget = static_cast<int>(std::ceil(m * binary_entropy(alpha + delta))) + 40;
      for (int t = 0; t < trials; ++t) {
        RngStream rng = master.substream(1000000 * n + 10000 * static_cast<int>(alpha * 100) + t);
        LabelKeyRegister reg(n, m + 64);
        // plant exactly round(alpha m) flags at random positions
        std::vector<int> pos(m);
        std::iota(pos.begin(), pos.end(), 0);
        int k = static_cast<int>(std::lround(alpha * m));
        for (int i = 0; i < k; ++i) {
          int j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m - i)));
          std::swap(pos[i], pos[j]);
        }
        std::vector<std::uint8_t> xe(n, 0), ze(n, 0);
        for (int i = 0; i < k; ++i) {
          if (pos[i] % 2 == 0)
            ze[pos[i] / 2] = 1;
          else
            xe[pos[i] / 2] = 1;
        }
        reg.imprint_error(xe, ze);
        auto res = hash_identify(reg, alpha, delta, rng);
        if (res.ok && res.v == SyndromeVector::from_error(xe, ze) && res.subsets_used <= budget)
          ++good;
        used_sum += res.subsets_used;
      }
      if (good < 990)
        return fail(msg, "identification rate " + std::to_string(good) + "/1000 at n=" +
                             std::to_string(n) + " alpha=" + std::to_string(alpha));
      if (n == 512) {
        double recycled_fraction = 1.0 - used_sum / trials / m;
        double target = 1.0 - binary_entropy(alpha + delta);
        if (std::fabs(recycled_fraction - target) > 0.05)
          return fail(msg, "recycled fraction " + std::to_string(recycled_fraction) +
                               " target " + std::to_string(target));
      }
    }
  }
  return true;
}

// ---- criterion 7: sample-size bound for weight estimation -----------------

bool criterion_chebyshev(std::string& msg) {
  if (chebyshev_sample_size(0.1, 0.05) != 500) return fail(msg, "closed form != 500");
  RngStream master(0xac07u);
  const int n = 512, m = 2 * n, r2 = 500, trials = 10000;
  const double alpha = 0.3, delta = 0.1;
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream rng = master.substream(t);
    LabelKeyRegister reg(n, 0);
    std::vector<int> pos(m);
    std::iota(pos.begin(), pos.end(), 0);
    int k = static_cast<int>(std::lround(alpha * m));
    for (int i = 0; i < k; ++i) {
      int j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(m - i)));
      std::swap(pos[i], pos[j]);
    }
    std::vector<std::uint8_t> xe(n, 0), ze(n, 0);
    for (int i = 0; i < k; ++i) {
      if (pos[i] % 2 == 0)
        ze[pos[i] / 2] = 1;
      else
        xe[pos[i] / 2] = 1;
    }
    reg.imprint_error(xe, ze);
    auto est = estimate_weight(reg, r2, rng);
    if (std::fabs(est.alpha_hat - alpha) >= delta) ++failures;
  }
  double rate = failures / static_cast<double>(trials);
  if (rate > 0.05) return fail(msg, "estimate failure rate " + std::to_string(rate));
  return true;
}

// ---- criterion 8: test-qubit detection ------------------------------------

bool criterion_mpqc(std::string& msg) {
  RngStream master(0xac08u);
  const int n = 16;
  // per-error acceptance bound over random test-qubit layouts; an error
  // whose quick pass lands above the bound is retested on a fresh
  // substream at the full trial count, so seeding noise over hundreds of
  // exact-null tests does not trip the criterion
  for (int r = 1; r <= 8; ++r) {
    const int total = n + 2 * r;
    std::vector<std::array<int, 4>> errors;  // wire1, kind1, wire2 (-1), kind2
    for (int w = 0; w < total; ++w)
      for (int kind = 1; kind < 4; ++kind) errors.push_back({w, kind, -1, 0});
    // representative two-qubit errors
    RngStream pick = master.substream(777000 + r);
    for (int i = 0; i < 12; ++i) {
      int w1 = static_cast<int>(pick.uniform_int(total));
      int w2 = static_cast<int>(pick.uniform_int(total - 1));
      if (w2 >= w1) ++w2;
      errors.push_back({w1, 1 + static_cast<int>(pick.uniform_int(3)), w2,
                        1 + static_cast<int>(pick.uniform_int(3))});
    }
    const double p = std::pow(0.5, r);
    auto accept_freq = [&](const std::array<int, 4>& err, int trials, std::uint64_t salt) {
      int accepts = 0;
      for (int t = 0; t < trials; ++t) {
        RngStream rng = master.substream(salt + 1000000000ull * r +
                                         1000000ull * (err[0] * 40 + err[1] * 10 +
                                                       (err[2] + 1) * 400 + err[3]) +
                                         t);
        TestQubitLayout lay = TestQubitLayout::random(n, r, rng);
        std::vector<std::uint8_t> xe(total, 0), ze(total, 0);
        xe[err[0]] = (err[1] & 1) ? 1 : 0;
        ze[err[0]] = (err[1] & 2) ? 1 : 0;
        if (err[2] >= 0) {
          xe[err[2]] = (err[3] & 1) ? 1 : 0;
          ze[err[2]] = (err[3] & 2) ? 1 : 0;
        }
        if (mpqc_accept_classical(lay, xe, ze)) ++accepts;
      }
      return accepts / static_cast<double>(trials);
    };
    auto bound = [&](int trials) { return p + 3 * std::sqrt(p * (1 - p) / trials); };
    for (const auto& err : errors) {
      if (accept_freq(err, 12500, 0) <= bound(12500)) continue;
      if (accept_freq(err, 100000, 0x5a17ull << 40) <= bound(100000)) continue;
      return fail(msg, std::string(err[2] >= 0 ? "2q" : "1q") +
                           " error accepted too often at r=" + std::to_string(r));
    }
  }
  // noiseless rounds accept with fidelity 1 on the engine
  for (int t = 0; t < 5; ++t) {
    RngStream rng = master.substream(300000 + t);
    const int nn = 2, r = 3;
    TestQubitLayout lay = TestQubitLayout::random(nn, r, rng);
    ClassicalPauliKey key = ClassicalPauliKey::random(nn, rng);
    DenseState probe = DenseState::random(nn, 2, rng);
    std::vector<cplx> amps(std::size_t(1) << lay.total_wires(), cplx(0, 0));
    for (std::size_t i = 0; i < probe.dim(); ++i) amps[i] = probe.amplitude(i);
    DenseState st = DenseState::from_amplitudes(lay.total_wires(), 2, std::move(amps));
    mpqc_encode(st, key, lay);
    if (!mpqc_decode_accept(st, key, lay, rng)) return fail(msg, "noiseless round rejected");
    std::vector<int> data = {0, 1};
    auto rho = st.density_matrix(data);
    cplx f(0, 0);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        f += std::conj(probe.amplitude(a)) * rho[static_cast<std::size_t>(a) * 4 + b] *
             probe.amplitude(b);
    if (f.real() < 1.0 - 1e-9) return fail(msg, "noiseless fidelity below 1");
  }
  // X/Z independence, exhaustive single-sided patterns at n <= 4, r <= 3
  for (int nn : {2, 4}) {
    for (int r : {2, 3}) {
      RngStream rng = master.substream(400000 + 10 * nn + r);
      TestQubitLayout lay = TestQubitLayout::random(nn, r, rng);
      const int total = lay.total_wires();
      std::vector<std::uint8_t> accept_x(std::size_t(1) << total),
          accept_z(std::size_t(1) << total);
      std::vector<std::uint8_t> none(total, 0);
      for (std::size_t pat = 0; pat < (std::size_t(1) << total); ++pat) {
        std::vector<std::uint8_t> e(total, 0);
        for (int w = 0; w < total; ++w) e[w] = (pat >> w) & 1;
        accept_x[pat] = mpqc_accept_classical(lay, e, none) ? 1 : 0;
        accept_z[pat] = mpqc_accept_classical(lay, none, e) ? 1 : 0;
      }
      for (int t = 0; t < 2000; ++t) {
        std::size_t px = rng.uniform_int(std::uint64_t(1) << total);
        std::size_t pz = rng.uniform_int(std::uint64_t(1) << total);
        std::vector<std::uint8_t> xe(total, 0), ze(total, 0);
        for (int w = 0; w < total; ++w) {
          xe[w] = (px >> w) & 1;
          ze[w] = (pz >> w) & 1;
        }
        bool joint = mpqc_accept_classical(lay, xe, ze);
        if (joint != (accept_x[px] && accept_z[pz]))
          return fail(msg, "x/z acceptance not independent");
      }
    }
  }
  return true;
}

// ---- criterion 9: accepted-state analysis ---------------------------------

bool criterion_accepted_state(std::string& msg) {
  RngStream master(0xac09u);
  // n = 2: at n = 1 every nonempty x-test subset contains the lone data
  // qubit, so the X error is always caught and the bound is degenerate
  PauliOperator id(2, 2);
  PauliOperator x1 = PauliOperator::x_on(2, 0);
  auto ch = PauliChannel::explicit_list(2, {{id, 0.9}, {x1, 0.1}}, "mostly-clean");
  const double e00 = 0.9;
  double prev = 1e18;
  for (int r : {2, 4, 6, 8}) {
    RngStream rng = master.substream(r);
    const int trials = 20000;
    auto res = analyze_acceptance(ch, 2, r, trials, rng);
    double low = e00, high = e00 + std::pow(0.5, r) * (1.0 - e00);
    double sigma = std::sqrt(high * (1 - high) / trials + 1e-12);
    if (res.prob_accept < low - 3 * sigma || res.prob_accept > high + 3 * sigma)
      return fail(msg, "accept prob " + std::to_string(res.prob_accept) + " outside bound at r=" +
                           std::to_string(r));
    if (res.eve_entropy_bound_bits >= prev)
      return fail(msg, "entropy bound not decreasing at r=" + std::to_string(r));
    prev = res.eve_entropy_bound_bits;
  }
  return true;
}

// ---- criterion 10: five-qubit-style cipher --------------------------------

bool criterion_fivebit(std::string& msg) {
  RngStream master(0xac0au);
  const std::array<std::pair<BellLabel, BellLabel>, 4> expected = {{
      {BellLabel::PhiPlus, BellLabel::PhiPlus},
      {BellLabel::PsiPlus, BellLabel::PsiPlus},
      {BellLabel::PhiMinus, BellLabel::PhiMinus},
      {BellLabel::PsiMinus, BellLabel::PsiMinus},
  }};
  for (int t = 0; t < 25; ++t) {
    RngStream rng = master.substream(t);
    DenseState psi = DenseState::random(1, 2, rng);
    for (int err = 0; err < 4; ++err) {
      DenseState st = fivebit_prepare(psi);
      fivebit_encode(st);
      if (err & 1) st.apply_gate(GateKind::X, 0);
      if (err & 2) st.apply_gate(GateKind::Z, 0);
      fivebit_decode(st);
      if (dense_bell_label(st, 1, 3) != expected[err].first ||
          dense_bell_label(st, 2, 4) != expected[err].second)
        return fail(msg, "pattern mismatch for error " + std::to_string(err));
      int syn = fivebit_locc_syndrome(st, rng);
      if (syn != err) return fail(msg, "locc confusion");
      fivebit_correct(st, syn);
      std::vector<int> keep = {0};
      auto rho = st.density_matrix(keep);
      cplx f =
          std::conj(psi.amplitude(0)) * (rho[0] * psi.amplitude(0) + rho[1] * psi.amplitude(1)) +
          std::conj(psi.amplitude(1)) * (rho[2] * psi.amplitude(0) + rho[3] * psi.amplitude(1));
      if (f.real() < 1.0 - 1e-9) return fail(msg, "corrected fidelity below 1");
    }
  }
  // clifford conjugation: images of all generators are pauli operators
  for (const Circuit& c : {fivebit_encode_circuit(), fivebit_decode_circuit()}) {
    const int dim = 8;
    std::vector<std::vector<cplx>> u(dim, std::vector<cplx>(dim));
    for (int j = 0; j < dim; ++j) {
      DenseState st = DenseState::basis(3, 2, static_cast<std::size_t>(j));
      c.apply_to(st);
      for (int i = 0; i < dim; ++i) u[j][i] = st.amplitude(i);
    }
    for (int g = 0; g < 6; ++g) {
      int wire = g / 2;
      bool is_x = (g % 2) == 0;
      std::vector<std::vector<cplx>> img(dim, std::vector<cplx>(dim, cplx(0, 0)));
      for (int col = 0; col < dim; ++col) {
        std::vector<cplx> w(dim), pw(dim);
        for (int row = 0; row < dim; ++row) w[row] = std::conj(u[row][col]);
        for (int row = 0; row < dim; ++row) {
          if (is_x)
            pw[row ^ (1 << wire)] = w[row];
          else
            pw[row] = ((row >> wire) & 1) ? -w[row] : w[row];
        }
        for (int row = 0; row < dim; ++row) {
          cplx acc(0, 0);
          for (int k = 0; k < dim; ++k) acc += u[k][row] * pw[k];
          img[col][row] = acc;
        }
      }
      // pauli test: signed permutation j -> j ^ v with multiplicative signs
      int v = -1;
      for (int row = 0; row < dim; ++row)
        if (std::abs(img[0][row]) > 1e-9) v = row;
      std::vector<double> f(dim);
      for (int j = 0; j < dim; ++j) {
        for (int row = 0; row < dim; ++row) {
          double mag = std::abs(img[j][row]);
          bool on = row == (j ^ v);
          if (on && std::fabs(mag - 1.0) > 1e-9) return fail(msg, "not a pauli image");
          if (!on && mag > 1e-9) return fail(msg, "not a pauli image");
        }
        cplx ratio = img[j][j ^ v] / img[0][v];
        if (std::fabs(std::fabs(ratio.real()) - 1.0) > 1e-9 || std::fabs(ratio.imag()) > 1e-9)
          return fail(msg, "non-real pauli sign");
        f[j] = ratio.real();
      }
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          if (std::fabs(f[j ^ k] - f[j] * f[k]) > 1e-9) return fail(msg, "sign not multiplicative");
    }
  }
  return true;
}

// ---- criterion 11: qutrit cipher ------------------------------------------

bool criterion_qutrit(std::string& msg) {
  RngStream master(0xac0bu);
  auto table = qutrit_error_table();
  for (int e = 0; e < 9; ++e) {
    for (int f2 = e + 1; f2 < 9; ++f2) {
      cplx ov(0, 0);
      for (int k = 0; k < 9; ++k) ov += std::conj(table[e][k]) * table[f2][k];
      if (std::abs(ov) >= 1e-9) return fail(msg, "table states not orthogonal");
    }
    for (int side = 0; side < 2; ++side)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          cplx acc(0, 0);
          for (int k = 0; k < 3; ++k) {
            int a = side == 0 ? i + 3 * k : k + 3 * i;
            int b = side == 0 ? j + 3 * k : k + 3 * j;
            acc += table[e][a] * std::conj(table[e][b]);
          }
          cplx want = i == j ? cplx(1.0 / 3.0, 0) : cplx(0, 0);
          if (std::abs(acc - want) > 1e-9) return fail(msg, "table state not maximally entangled");
        }
  }
  for (int t = 0; t < 10; ++t) {
    RngStream rng = master.substream(t);
    DenseState psi = DenseState::random(1, 3, rng);
    DenseState st = qutrit_prepare(psi);
    qutrit_encode(st);
    qutrit_decode(st);
    std::vector<int> keep = {0};
    auto rho = st.density_matrix(keep);
    cplx f(0, 0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        f += std::conj(psi.amplitude(a)) * rho[static_cast<std::size_t>(a) * 3 + b] *
             psi.amplitude(b);
    if (f.real() < 1.0 - 1e-9) return fail(msg, "noiseless fidelity below 1");
    std::vector<int> pair = {1, 2};
    auto rho_p = st.density_matrix(pair);
    std::array<cplx, 9> v{};
    v[0] = v[1 + 3 * 2] = v[2 + 3 * 1] = 1.0 / std::sqrt(3.0);
    cplx overlap(0, 0);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j)
        overlap += std::conj(v[i]) * rho_p[static_cast<std::size_t>(i) * 9 + j] * v[j];
    if (overlap.real() < 1.0 - 1e-9) return fail(msg, "pair not regenerated");
  }
  RngStream rng = master.substream(999);
  auto feas = locc_feasibility_check(SharingScheme::Qutrit, rng);
  if (feas.global_success != 1.0) return fail(msg, "global measurement not perfect");
  if (!(feas.restricted_success < 1.0 - 1e-6))
    return fail(msg, "restricted protocol unexpectedly perfect");
  // global identification really achieves success 1 on the engine
  for (int e = 0; e < 9; ++e) {
    RngStream erng = master.substream(2000 + e);
    DenseState psi = DenseState::random(1, 3, erng);
    DenseState st = qutrit_prepare(psi);
    qutrit_encode(st);
    qutrit_apply_error(st, e / 3, e % 3);
    qutrit_decode(st);
    auto [s, tt] = qutrit_identify_global(st, erng);
    if (s != e / 3 || tt != e % 3) return fail(msg, "global identification missed");
  }
  return true;
}

// ---- criterion 12: ciphertext-loss recovery -------------------------------

bool criterion_recovery(std::string& msg) {
  RngStream master(0xac0cu);
  std::array<std::int64_t, 4> branch{};
  const int states = 20, per_state = 500;
  for (int s = 0; s < states; ++s) {
    RngStream srng = master.substream(s);
    DenseState psi = DenseState::random(1, 2, srng);
    for (int t = 0; t < per_state; ++t) {
      RngStream rng = srng.substream(t);
      auto out = recover_without_ciphertext(psi, rng);
      if (out.corrected_fidelity < 1.0 - 1e-9)
        return fail(msg, "corrected fidelity below 1");
      ++branch[2 * out.s1 + out.s2];
    }
  }
  const double total = states * per_state;
  for (auto c : branch)
    if (std::fabs(c / total - 0.25) > 0.02)
      return fail(msg, "branch frequency " + std::to_string(c / total));
  return true;
}

// ---- criterion 13: baseline protocols -------------------------------------

bool criterion_baselines(std::string& msg) {
  RngStream master(0xac0du);
  // teleportation
  std::array<std::int64_t, 4> branch{};
  const int ttrials = 10000;
  for (int t = 0; t < ttrials; ++t) {
    RngStream rng = master.substream(t);
    DenseState psi = DenseState::random(1, 2, rng);
    auto res = teleport(psi, rng);
    if (res.fidelity < 1.0 - 1e-9) return fail(msg, "teleport fidelity below 1");
    ++branch[2 * res.k1 + res.k2];
  }
  for (auto c : branch)
    if (std::fabs(c / static_cast<double>(ttrials) - 0.25) > 0.02)
      return fail(msg, "teleport branches not uniform");
  // superdense
  for (int c1 = 0; c1 < 2; ++c1)
    for (int c2 = 0; c2 < 2; ++c2)
      for (int rep = 0; rep < 5; ++rep) {
        RngStream rng = master.substream(100000 + 10 * (2 * c1 + c2) + rep);
        auto res = superdense(c1, c2, rng);
        bool mixed = std::abs(res.transmitted_reduced[0] - cplx(0.5, 0)) < 1e-9 &&
                     std::abs(res.transmitted_reduced[3] - cplx(0.5, 0)) < 1e-9 &&
                     std::abs(res.transmitted_reduced[1]) < 1e-9;
        if (res.c1 != c1 || res.c2 != c2 || !mixed) return fail(msg, "superdense decode failed");
      }
  // one-time-pad key reuse leak
  {
    RngStream rng = master.substream(200000);
    for (int t = 0; t < 100; ++t) {
      std::vector<std::uint8_t> m1(32), m2(32), k(32);
      for (int i = 0; i < 32; ++i) {
        m1[i] = rng.bit();
        m2[i] = rng.bit();
        k[i] = rng.bit();
      }
      auto c1 = classical_otp_encrypt(m1, k);
      auto c2 = classical_otp_encrypt(m2, k);
      for (int i = 0; i < 32; ++i)
        if ((c1[i] ^ c2[i]) != (m1[i] ^ m2[i])) return fail(msg, "otp leak identity broken");
    }
  }
  // eavesdrop-detecting channel: intercept-resend detection bound
  {
    const int n = 20, r = 8, trials = 8000;
    for (int l = 1; l <= 12; ++l) {
      int undetected = 0;
      for (int t = 0; t < trials; ++t) {
        RngStream rng = master.substream(300000 + 10000 * l + t);
        std::vector<std::uint8_t> m(n), k1(n + r), k2(n + r);
        for (auto& b : m) b = rng.bit();
        for (auto& b : k1) b = rng.bit();
        for (auto& b : k2) b = rng.bit();
        EdcAttack atk;
        atk.kind = EdcAttack::Kind::InterceptResend;
        atk.intercept_count = l;
        if (edc_send(m, r, k1, k2, atk, rng).accept) ++undetected;
      }
      double p = std::pow(0.75, l);
      double sigma = std::sqrt(p * (1 - p) / trials + 1e-12);
      if (undetected / static_cast<double>(trials) > p + 3 * sigma)
        return fail(msg, "edc undetected rate above bound at l=" + std::to_string(l));
    }
  }
  // bb84 full intercept-resend
  {
    RngStream rng = master.substream(400000);
    auto res = bb84_round(80000, 1.0, 0.5, rng);
    if (std::fabs(res.observed_error_rate - 0.25) > 0.01)
      return fail(msg, "bb84 error rate " + std::to_string(res.observed_error_rate));
  }
  return true;
}

// ---- criterion 14: resource comparison table ------------------------------

bool criterion_resources(std::string& msg) {
  const std::array<NamedChannelPreset, 4> presets = {
      NamedChannelPreset::Noiseless, NamedChannelPreset::ZMeasureAll,
      NamedChannelPreset::PaperMix, NamedChannelPreset::DepolarizingComplete};
  const std::array<double, 4> f_anchor = {1.0, 0.5, 0.1037, 0.0};
  const std::array<double, 4> d2_anchor = {1.0, 0.0, 0.0, 0.0};
  const std::array<ResourceVerdict, 4> verdicts = {
      ResourceVerdict::Equal, ResourceVerdict::Equal, ResourceVerdict::TeleportBetter,
      ResourceVerdict::TeleportBetter};
  for (int i = 0; i < 4; ++i) {
    auto cmp = compare_methods(presets[i], 10);
    double tol = i == 2 ? 1e-3 : 1e-9;
    if (std::fabs(cmp.f - f_anchor[i]) > tol) return fail(msg, "F anchor mismatch");
    if (std::fabs(cmp.d2 - d2_anchor[i]) > 1e-9) return fail(msg, "D2 anchor mismatch");
    if (cmp.verdict != verdicts[i]) return fail(msg, "verdict mismatch");
  }
  RngStream master(0xac0eu);
  for (int t = 0; t < 100; ++t) {
    RngStream rng = master.substream(t);
    double a = rng.uniform_double(), b = rng.uniform_double(), c = rng.uniform_double(),
           d = rng.uniform_double();
    double s = a + b + c + d;
    SingleQubitPauliProbs p = {a / s, b / s, c / s, d / s};
    int n = 1 + static_cast<int>(rng.uniform_int(64));
    auto cmp = compare_methods(p, n, "random");
    bool predicate = cmp.f <= (1.0 + cmp.d2) / 2.0 + 1e-12;
    bool direct = cmp.qvc_ebits >= cmp.teleport_ebits - 1e-9 * n;
    if (predicate != direct) return fail(msg, "predicate disagrees with ebit count");
  }
  return true;
}

// ---- criterion 15: engine cross-validation --------------------------------

bool criterion_engines(std::string& msg) {
  RngStream master(0xac0fu);
  for (int trial = 0; trial < 100; ++trial) {
    RngStream rng = master.substream(trial);
    int n = 2 + static_cast<int>(rng.uniform_int(9));  // up to 10 qubits
    int gates = 20 + static_cast<int>(rng.uniform_int(181));
    StabilizerState st(n);
    DenseState dn(n, 2);
    for (int g = 0; g < gates; ++g) {
      int pick = static_cast<int>(rng.uniform_int(5));
      int a = static_cast<int>(rng.uniform_int(n));
      int b = static_cast<int>(rng.uniform_int(n - 1));
      if (b >= a) ++b;
      GateOp op = pick == 0   ? GateOp(GateKind::H, a)
                  : pick == 1 ? GateOp(GateKind::X, a)
                  : pick == 2 ? GateOp(GateKind::Z, a)
                  : pick == 3 ? GateOp(GateKind::CNOT, a, b)
                              : GateOp(GateKind::CZ, a, b);
      st.apply_gate(op);
      dn.apply_gate(op);
    }
    DenseState from_tab = st.to_dense();
    dn.fix_global_phase();
    from_tab.fix_global_phase();
    if (fidelity(from_tab, dn) < 1.0 - 1e-9)
      return fail(msg, "engines disagree on trial " + std::to_string(trial));
  }
  return true;
}

// ---- criterion 16: deterministic output -----------------------------------

bool criterion_determinism(std::string& msg) {
  std::vector<ScenarioConfig> configs;
  auto base = [](const std::string& protocol) {
    ScenarioConfig c;
    c.protocol = protocol;
    c.seed = 20260824;
    c.seed_set = true;
    c.trials = 40;
    c.n = 4;
    c.r = 3;
    return c;
  };
  {
    auto c = base("qvc-recycle");
    c.n = 16;
    c.channel = "paper-mix";
    configs.push_back(c);
  }
  {
    auto c = base("pqc");
    c.n = 2;
    c.trials = 10;
    configs.push_back(c);
  }
  {
    auto c = base("mpqc");
    c.n = 2;
    c.channel = "i:0.9,x:0.1";
    c.trials = 2000;
    configs.push_back(c);
  }
  {
    auto c = base("authenticate");
    c.n = 1;
    c.trials = 20;
    configs.push_back(c);
  }
  {
    auto c = base("fivebit");
    c.channel = "i:0.25,x:0.25,z:0.25,xz:0.25";
    configs.push_back(c);
  }
  configs.push_back(base("qutrit"));
  configs.push_back(base("otp"));
  {
    auto c = base("edc");
    c.n = 16;
    c.intercept = 4;
    configs.push_back(c);
  }
  configs.push_back(base("teleport"));
  configs.push_back(base("superdense"));
  {
    auto c = base("bb84");
    c.n = 256;
    c.intercept_prob = 1.0;
    configs.push_back(c);
  }
  {
    auto c = base("ebit-kd");
    c.n = 64;
    configs.push_back(c);
  }
  configs.push_back(base("resource-compare"));
  for (auto& c : configs) {
    auto first = run_scenario(c).to_json();
    c.threads = 3;
    auto second = run_scenario(c).to_json();
    if (first != second) return fail(msg, "output differs for " + c.protocol);
  }
  return true;
}

struct Criterion {
  const char* name;
  double limit_seconds;
  std::function<bool(std::string&)> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"key-average randomization is exactly depolarizing", 5, criterion_randomization},
      {"entangled-key encoding purifies the classical-key cipher", 5, criterion_purification},
      {"error-to-pair-label table is exact for all errors", 10, criterion_syndrome_table},
      {"preliminary-test false-pass frequency is 2^-r", 60, criterion_preliminary},
      {"recycle rounds correct every trajectory; false passes bounded", 120, criterion_recycle},
      {"hashing identification stays within budget with matching yield", 300, criterion_hashing},
      {"weight-estimation sample size meets its failure tolerance", 60, criterion_chebyshev},
      {"test-qubit screening accepts planted errors at most 2^-r", 300, criterion_mpqc},
      {"accepted-state bound brackets and entropy shrinks with r", 120, criterion_accepted_state},
      {"five-qubit-style cipher: patterns, locc, clifford check", 30, criterion_fivebit},
      {"qutrit cipher: orthogonal table, global beats restricted locc", 60, criterion_qutrit},
      {"ciphertext-loss recovery: equal branches, exact correction", 60, criterion_recovery},
      {"baseline protocols match their closed-form behavior", 120, criterion_baselines},
      {"resource table anchors, verdicts and predicate agree", 5, criterion_resources},
      {"stabilizer and dense engines agree on random circuits", 60, criterion_engines},
      {"scenario reruns produce byte-identical output", 60, criterion_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    std::string msg;
    auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.fn(msg);
    } catch (const std::exception& e) {
      msg = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool in_time = secs < c.limit_seconds;
    bool pass = ok && in_time;
    if (!pass) ++failures;
    std::printf("criterion %2zu: %-62s %s (%.1fs)%s%s\n", i + 1, c.name,
                pass ? "PASS" : "FAIL", secs, msg.empty() ? "" : " -- ", msg.c_str());
  }
  return failures == 0 ? 0 : 1;
}
