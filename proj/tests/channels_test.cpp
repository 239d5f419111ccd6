#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qvc/channels.hpp"
#include "qvc/polar.hpp"
#include "qvc/rng.hpp"
#include "qvc/stats.hpp"
#include "qvc/transcript.hpp"

using namespace qvc;

TEST_CASE("binary and shannon entropy anchors") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == Catch::Approx(1.0).epsilon(1e-12));
  const double mix[4] = {0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6};
  CHECK(shannon_entropy(std::span<const double>(mix, 4)) ==
        Catch::Approx(0.5 + 1.5 * std::log2(6.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("chi-square p-value sanity") {
  // p-value of stat 0 is 1; large stat is near 0
  CHECK(chi_square_pvalue(0.0, 3) == Catch::Approx(1.0).epsilon(1e-9));
  CHECK(chi_square_pvalue(100.0, 3) < 1e-12);
  // median of chi2 with 2 dof is 2 ln 2
  CHECK(chi_square_pvalue(2.0 * std::log(2.0), 2) == Catch::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("wilson interval covers the empirical rate") {
  WilsonInterval w = wilson_interval(30, 100, 3.0);
  CHECK(w.low < 0.3);
  CHECK(w.high > 0.3);
  CHECK(w.low >= 0.0);
  CHECK(w.high <= 1.0);
}

TEST_CASE("preset channels: names, probabilities, entropies") {
  for (auto preset : {NamedChannelPreset::Noiseless, NamedChannelPreset::ZMeasureAll,
                      NamedChannelPreset::PaperMix, NamedChannelPreset::DepolarizingComplete})
    CHECK(preset_from_name(preset_name(preset)) == preset);

  CHECK(preset_channel(NamedChannelPreset::Noiseless, 3).entropy_bits() == 0.0);
  CHECK(preset_channel(NamedChannelPreset::ZMeasureAll, 1).entropy_bits() ==
        Catch::Approx(1.0).epsilon(1e-12));
  CHECK(preset_channel(NamedChannelPreset::DepolarizingComplete, 5).entropy_bits() ==
        Catch::Approx(10.0).epsilon(1e-12));
  CHECK(preset_channel(NamedChannelPreset::PaperMix, 1).entropy_bits() ==
        Catch::Approx(1.7924812503605781).epsilon(1e-12));
  CHECK_THROWS_AS(preset_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("iid channel sampling matches its distribution") {
  RngStream rng(0x51a7u);
  auto ch = preset_channel(NamedChannelPreset::PaperMix, 1);
  std::vector<std::int64_t> counts(4, 0);
  const int trials = 60000;
  for (int t = 0; t < trials; ++t) {
    PauliOperator p = ch.sample(rng);
    int idx = (p.z_exp[0] ? 2 : 0) | (p.x_exp[0] ? 1 : 0);
    ++counts[idx];
  }
  std::vector<double> probs = {0.5, 1.0 / 6, 1.0 / 6, 1.0 / 6};
  CHECK(chi_square_test(counts, probs) > 1e-6);
}

TEST_CASE("explicit-list channel validates and samples") {
  PauliOperator id(1, 2);
  PauliOperator x1 = PauliOperator::x_on(1, 0);
  auto ch = PauliChannel::explicit_list(1, {{id, 0.9}, {x1, 0.1}}, "mostly-clean");
  CHECK(ch.name() == "mostly-clean");
  RngStream rng(7);
  int xs = 0;
  for (int t = 0; t < 20000; ++t)
    if (ch.sample(rng).x_exp[0]) ++xs;
  CHECK(std::fabs(xs / 20000.0 - 0.1) < 0.01);
  CHECK_THROWS_AS(PauliChannel::explicit_list(1, {{id, 0.5}, {x1, 0.4}}), std::invalid_argument);
}

TEST_CASE("transcript enforces receipt before ordered announcements") {
  Transcript t;
  t.announce("alice", "basis", {0, 1});
  CHECK_THROWS_AS(t.announce("alice", "syndrome", {1}, true), std::logic_error);
  t.acknowledge_receipt("bob");
  CHECK_NOTHROW(t.announce("alice", "syndrome", {1}, true));
  CHECK(t.entries().size() == 3);
  t.next_round();
  CHECK_FALSE(t.receipt_acknowledged());
}

namespace {

double identifier_success_rate(int len, double alpha, int trials, std::uint64_t seed) {
  int budget = static_cast<int>(std::ceil(len * binary_entropy(alpha + 0.05))) + 40;
  int ok = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(seed, static_cast<std::uint64_t>(t));
    std::vector<std::uint8_t> v(len);
    for (auto& b : v) b = rng.bernoulli(alpha) ? 1 : 0;
    SubsetParityIdentifier::Oracle oracle = [&](const std::vector<std::uint8_t>& mask) {
      int parity = 0;
      for (int j = 0; j < len; ++j) parity ^= (mask[j] & v[j]);
      return parity;
    };
    std::vector<double> prior(len, alpha);
    auto res = SubsetParityIdentifier::identify(prior, budget, oracle, rng);
    if (res.ok && res.v == v && res.subsets_used <= budget) ++ok;
  }
  return static_cast<double>(ok) / trials;
}

}  // namespace

TEST_CASE("subset-parity identifier stays within budget at moderate noise") {
  CHECK(identifier_success_rate(128, 0.10, 60, 0xabc1u) >= 0.95);
  CHECK(identifier_success_rate(128, 0.25, 60, 0xabc2u) >= 0.95);
  CHECK(identifier_success_rate(512, 0.25, 25, 0xabc3u) >= 0.95);
}

TEST_CASE("identifier transform is self-inverse") {
  RngStream rng(99);
  std::vector<std::uint8_t> v(64);
  for (auto& b : v) b = rng.bit() ? 1 : 0;
  auto w = v;
  SubsetParityIdentifier::transform(w);
  SubsetParityIdentifier::transform(w);
  CHECK(w == v);
}
