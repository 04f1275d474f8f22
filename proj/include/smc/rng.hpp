#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace smc {

/// Seedable 64-bit Mersenne Twister with platform-stable derived draws. The
/// standard distributions are implementation-defined, so uniform variates
/// are built from the raw engine output directly.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (seed, indices...), e.g. (master, j, b).
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> indices) {
    std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    for (auto i : indices) {
      words.push_back(static_cast<std::uint32_t>(i));
      words.push_back(static_cast<std::uint32_t>(i >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    Rng r(0);
    r.engine_.seed(seq);
    return r;
  }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do v = next();
    while (v >= limit);
    return v % bound;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace smc
