#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace cmcnn {

/// splitmix64 finalizer; good avalanche, cheap, and fully portable.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for a named child stream. Streams are identified by (master, label)
/// plus up to two indices, so concurrent consumers can never perturb each
/// other's draws.
inline std::uint64_t deriveSeed(std::uint64_t master, std::string_view label) {
  std::uint64_t h = mix64(master ^ 0x5bf03635aca0c4e5ULL);
  for (const char c : label) {
    h = mix64(h ^ static_cast<std::uint8_t>(c));
  }
  return h;
}

inline std::uint64_t deriveSeed(std::uint64_t master, std::string_view label,
                                std::uint64_t i) {
  return mix64(deriveSeed(master, label) ^ mix64(i));
}

inline std::uint64_t deriveSeed(std::uint64_t master, std::string_view label,
                                std::uint64_t i, std::uint64_t j) {
  return mix64(deriveSeed(master, label, i) ^ mix64(~j));
}

/// Deterministic counter-based generator (splitmix64). Unlike the standard
/// <random> distributions, every draw here is bit-reproducible across
/// platforms and compilers, which the seeded-determinism contract needs.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t nextU64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double nextReal() { return static_cast<double>(nextU64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n); unbiased via rejection.
  std::uint64_t nextBelow(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = nextU64();
      if (r >= threshold) {
        return r % n;
      }
    }
  }

  /// Standard normal via Box-Muller (one value per call; stateless).
  double nextNormal() {
    const double u1 = 1.0 - nextReal();  // (0, 1]
    const double u2 = nextReal();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  /// Fisher-Yates permutation of {0, ..., n-1}.
  template <class Container>
  void shuffle(Container& c) {
    for (std::size_t i = c.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(nextBelow(i));
      std::swap(c[i - 1], c[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace cmcnn
