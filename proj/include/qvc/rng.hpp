#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace qvc {

// Seedable, splittable pseudo-random stream.  Every stochastic operation in
// the library takes one of these explicitly; substreams derived from the same
// (seed, stream) pair are bit-reproducible across runs and threads.
//
// The core generator is xoshiro-style splitmix64 chaining: cheap, statistically
// solid for Monte Carlo, and trivially splittable by mixing a child index into
// the root state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(mix(seed + kGolden) ^ mix(stream))) {
    // avoid the all-zero fixed point
    if (state_ == 0) state_ = kGolden;
  }

  // Independent child stream; deterministic in (this stream's origin, index).
  RngStream substream(std::uint64_t index) const {
    RngStream child(0);
    child.state_ = mix(origin_mark() ^ mix(index + kGolden));
    if (child.state_ == 0) child.state_ = kGolden;
    return child;
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += kGolden);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  bool bit() { return (next_u64() >> 63) != 0; }

  bool bernoulli(double p) { return uniform_double() < p; }

  // uniform in [0, 1)
  double uniform_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform in [0, bound)
  std::uint64_t uniform_int(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_int: bound must be positive");
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t v = next_u64();
      if (v >= threshold) return v % bound;
    }
  }

  // standard normal via Box-Muller (no cached spare, keeps state minimal)
  double gaussian() {
    double u1 = uniform_double();
    double u2 = uniform_double();
    while (u1 <= 0.0) u1 = uniform_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    return z ^ (z >> 33);
  }

  // substreams key off the current state so nested splits stay independent
  std::uint64_t origin_mark() const { return mix(state_ + kGolden); }

  std::uint64_t state_;
};

}  // namespace qvc
