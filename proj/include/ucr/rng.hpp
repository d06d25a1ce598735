#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace ucr {

/// xoshiro256** seeded through splitmix64. Satisfies
/// UniformRandomBitGenerator so it also works with <random> adaptors, but the
/// helpers below are used on hot paths so results are identical across
/// standard libraries.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  /// Independent stream for one Monte-Carlo trial. The stream depends only on
  /// (seed, trial), never on which worker runs the trial.
  static RandomStream for_trial(std::uint64_t seed, std::uint64_t trial) noexcept {
    std::uint64_t sm = seed;
    const std::uint64_t a = splitmix64(sm);
    std::uint64_t tm = trial ^ 0xD1B54A32D192ED03ULL;
    const std::uint64_t b = splitmix64(tm);
    return RandomStream(a ^ (b * 0x9E3779B97F4A7C15ULL) ^ (b >> 29));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform_open0() noexcept { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

  /// Exponential with unit mean.
  double exponential() noexcept { return -std::log(uniform_open0()); }

  /// Uniform integer in [0, n), n >= 1, unbiased (Lemire).
  std::uint64_t below(std::uint64_t n) noexcept {
    unsigned __int128 prod = static_cast<unsigned __int128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(prod);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        prod = static_cast<unsigned __int128>((*this)()) * n;
        low = static_cast<std::uint64_t>(prod);
      }
    }
    return static_cast<std::uint64_t>(prod >> 64);
  }

  static std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

}  // namespace ucr
