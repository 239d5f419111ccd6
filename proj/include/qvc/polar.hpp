#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "qvc/rng.hpp"

namespace qvc {

// Identifies an unknown bit vector v (independent per-position priors) by
// querying subset parities, spending as few queries as possible.
//
// Queries are rows of the self-inverse transform G = (F^T)^{(x) m} over
// GF(2), F^T = [[1,1],[0,1]], i.e. G[i][j] = 1 iff j's bits cover i's bits.
// With w = G v, the conditionals H(w_i | w_<i) polarize, and an exact
// successive-cancellation sweep yields the posterior llr of each w_i given
// all earlier decisions.  Positions with weak llr are queried (budget
// permitting, with pacing against a genie-estimated demand profile); strong
// ones are inferred.  Random verification parities catch wrong inferences,
// and a refinement loop re-queries the weakest inferred positions until
// verification passes or the budget is exhausted.
class SubsetParityIdentifier {
 public:
  // mask has `len` entries; returns the parity of the hidden vector on the
  // masked positions.  Each distinct subset counts once against the budget.
  using Oracle = std::function<int(const std::vector<std::uint8_t>& mask)>;

  struct Result {
    std::vector<std::uint8_t> v;
    bool ok = false;       // verification parities all matched
    int subsets_used = 0;  // distinct oracle queries (incl. verification)
  };

  // prior_p[j] = Prob(v_j = 1); budget = max distinct subsets to query.
  static Result identify(const std::vector<double>& prior_p, int budget,
                         const Oracle& oracle, RngStream& rng) {
    SubsetParityIdentifier id(prior_p, budget, oracle, rng);
    return id.run();
  }

  // self-inverse polar transform over GF(2)
  static void transform(std::vector<std::uint8_t>& bits) {
    const std::size_t n = bits.size();
    for (std::size_t half = n / 2; half >= 1; half /= 2)
      for (std::size_t start = 0; start < n; start += 2 * half)
        for (std::size_t k = 0; k < half; ++k)
          bits[start + k] = static_cast<std::uint8_t>(bits[start + k] ^
                                                      bits[start + k + half]);
  }

 private:
  static constexpr double kThreshold = 8.0;
  static constexpr int kVerification = 20;
  static constexpr int kReserve = 12;
  static constexpr int kRefineChunk = 8;
  static constexpr int kGenieTrials = 50;
  static constexpr int kMaxRounds = 80;
  static constexpr double kStrongLlr = 60.0;

  SubsetParityIdentifier(const std::vector<double>& prior_p, int budget,
                         const Oracle& oracle, RngStream& rng)
      : len_(static_cast<int>(prior_p.size())), budget_(budget), oracle_(oracle), rng_(rng) {
    if (len_ <= 0) throw std::invalid_argument("identify: empty prior");
    nbig_ = 1;
    while (nbig_ < len_) nbig_ *= 2;
    leaf_.assign(nbig_, kStrongLlr);  // padding beyond len_ is known zero
    for (int j = 0; j < len_; ++j) {
      double p = std::clamp(prior_p[j], 0.0, 0.5);
      leaf_[j] = p <= 0.0 ? kStrongLlr : std::log((1.0 - p) / p);
    }
    cap_ = budget_ - kVerification;
    if (cap_ < 0) cap_ = 0;
  }

  Result run() {
    build_pacing_table();
    std::vector<std::pair<std::vector<std::uint8_t>, int>> checks = draw_verification();
    Result res;
    int rounds = 0;
    for (;;) {
      decode_pass();
      ++rounds;
      std::vector<std::uint8_t> vhat = what_;
      transform(vhat);
      vhat.resize(len_);
      bool verified = true;
      for (const auto& [mask, parity] : checks) {
        int pred = 0;
        for (int j = 0; j < len_; ++j) pred ^= (mask[j] & vhat[j]);
        if (pred != parity) {
          verified = false;
          break;
        }
      }
      if (verified) {
        res.v = std::move(vhat);
        res.ok = true;
        break;
      }
      if (queries_ >= cap_ || rounds > kMaxRounds) {
        res.v = std::move(vhat);
        res.ok = false;
        break;
      }
      // force-query the weakest inferred positions and redecode
      std::sort(weak_.begin(), weak_.end());
      int added = 0;
      for (const auto& [llr, i] : weak_) {
        if (!query(i)) break;
        if (++added >= kRefineChunk) break;
      }
      if (added == 0) {
        res.v = std::move(vhat);
        res.ok = false;
        break;
      }
    }
    res.subsets_used = queries_ + static_cast<int>(checks.size());
    return res;
  }

  // ---- polar SC machinery ------------------------------------------------

  static double f_comb(double a, double b) {
    double x = std::tanh(a / 2.0) * std::tanh(b / 2.0);
    x = std::clamp(x, -1.0 + 1e-15, 1.0 - 1e-15);
    return 2.0 * std::atanh(x);
  }

  // Genie pass: estimate, per position, how often |llr| falls under the
  // threshold, to pace the real pass's budget.  Runs on synthetic vectors
  // drawn from the prior with a dedicated substream.
  void build_pacing_table() {
    std::vector<double> qprob(nbig_, 0.0);
    RngStream genie = rng_.substream(0x9e171e);
    std::vector<std::uint8_t> v(nbig_), w(nbig_);
    for (int t = 0; t < kGenieTrials; ++t) {
      for (int j = 0; j < nbig_; ++j)
        v[j] = (j < len_ && genie.uniform_double() <
                                1.0 / (1.0 + std::exp(leaf_[j])))
                   ? 1
                   : 0;
      w = v;
      transform(w);
      genie_mode_ = true;
      genie_w_ = &w;
      what_.assign(nbig_, 0);
      weak_.clear();
      rec(leaf_, 0, [&](int i, double llr) {
        if (std::fabs(llr) < kThreshold) qprob[i] += 1.0 / kGenieTrials;
        what_[i] = (*genie_w_)[i];
      });
      genie_mode_ = false;
    }
    qexp_.assign(nbig_ + 1, 0.0);
    for (int i = nbig_ - 1; i >= 0; --i) qexp_[i] = qexp_[i + 1] + qprob[i];
  }

  void decode_pass() {
    what_.assign(nbig_, 0);
    weak_.clear();
    rec(leaf_, 0, [&](int i, double llr) {
      auto it = known_.find(i);
      if (it != known_.end()) {
        what_[i] = static_cast<std::uint8_t>(it->second);
        return;
      }
      double left = static_cast<double>(cap_ - kReserve - queries_);
      double exp_rem = qexp_[i];
      double scale = exp_rem <= 0.0 ? 1.0 : std::min(1.0, std::max(0.0, left) / exp_rem);
      if (std::fabs(llr) < kThreshold * scale && query(i)) {
        what_[i] = static_cast<std::uint8_t>(known_[i]);
        return;
      }
      what_[i] = llr > 0.0 ? 0 : 1;
      weak_.emplace_back(std::fabs(llr), i);
    });
  }

  template <typename Leaf>
  void rec(const std::vector<double>& llrs, int base, const Leaf& leaf_fn) {
    const int m = static_cast<int>(llrs.size());
    if (m == 1) {
      leaf_fn(base, llrs[0]);
      return;
    }
    const int half = m / 2;
    std::vector<double> sub(half);
    for (int k = 0; k < half; ++k) sub[k] = f_comb(llrs[k], llrs[k + half]);
    rec(sub, base, leaf_fn);
    std::vector<std::uint8_t> c(what_.begin() + base, what_.begin() + base + half);
    transform(c);
    for (int k = 0; k < half; ++k)
      sub[k] = llrs[k + half] + (c[k] ? -llrs[k] : llrs[k]);
    rec(sub, base + half, leaf_fn);
  }

  // ---- oracle access -----------------------------------------------------

  bool query(int i) {
    if (known_.count(i)) return true;
    if (queries_ >= cap_) return false;
    std::vector<std::uint8_t> mask(len_, 0);
    for (int j = 0; j < len_; ++j)
      if ((i & ~j) == 0) mask[j] = 1;
    known_[i] = oracle_(mask);
    ++queries_;
    return true;
  }

  std::vector<std::pair<std::vector<std::uint8_t>, int>> draw_verification() {
    std::vector<std::pair<std::vector<std::uint8_t>, int>> checks;
    int count = std::min(kVerification, budget_);
    for (int c = 0; c < count; ++c) {
      std::vector<std::uint8_t> mask(len_, 0);
      bool any = false;
      do {
        for (int j = 0; j < len_; ++j) {
          mask[j] = rng_.bit() ? 1 : 0;
          any = any || mask[j];
        }
      } while (!any);
      int parity = oracle_(mask);
      checks.emplace_back(std::move(mask), parity);
    }
    return checks;
  }

  int len_;
  int nbig_ = 1;
  int budget_;
  int cap_ = 0;
  const Oracle& oracle_;
  RngStream& rng_;

  std::vector<double> leaf_;
  std::vector<double> qexp_;
  std::vector<std::uint8_t> what_;
  std::vector<std::pair<double, int>> weak_;
  std::map<int, int> known_;
  int queries_ = 0;
  bool genie_mode_ = false;
  std::vector<std::uint8_t>* genie_w_ = nullptr;
};

}  // namespace qvc
