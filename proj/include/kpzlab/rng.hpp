#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace kpz {

/// Identifier written into run provenance. Bump the suffix whenever the
/// stream derivation or any variate transform below changes.
inline constexpr const char* kRngAlgorithm = "mt19937_64+splitmix64-substream/v1";

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` of master seed `seed`.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Random source for one trajectory. The engine is std::mt19937_64, whose
/// output sequence is fixed by the standard; the variate transforms are
/// implemented here rather than via <random> distributions so that draws are
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(substream_seed(seed, stream)) {}

  /// Uniform on (0, 1), 53 random bits.
  double uniform() noexcept {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  /// Exponential with the given rate (> 0).
  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

  /// Standard normal (Marsaglia polar method, second variate cached).
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kpz
