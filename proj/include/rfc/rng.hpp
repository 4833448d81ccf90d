#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace rfc {

// Counter-based random numbers. Every draw is addressed by (key, counter), so
// sampling is order-independent and reproducible across thread counts.
//
// Stream derivation: a worker stream is keyed by derive_key(master, index);
// experiment sample seeds are derive_key(master, fnv1a(name) ^ sample_index).

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_key(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(~stream));
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

// i-th 64-bit word of the stream identified by `key`.
inline std::uint64_t rng_word(std::uint64_t key, std::uint64_t i) {
  return splitmix64(key + i * 0x9E3779B97F4A7C15ull);
}

// Uniform in (0,1]; never returns 0 so it is safe under log().
inline double rng_uniform(std::uint64_t key, std::uint64_t i) {
  return static_cast<double>((rng_word(key, i) >> 11) + 1) * 0x1p-53;
}

// Standard normal via Box-Muller; draw i consumes uniforms 2i and 2i+1.
inline double rng_normal(std::uint64_t key, std::uint64_t i) {
  const double u1 = rng_uniform(key, 2 * i);
  const double u2 = rng_uniform(key, 2 * i + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Both Box-Muller branches; used where draws are consumed in pairs.
inline void rng_normal2(std::uint64_t key, std::uint64_t i, double& z0,
                        double& z1) {
  const double u1 = rng_uniform(key, 2 * i);
  const double u2 = rng_uniform(key, 2 * i + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  z0 = r * std::cos(2.0 * std::numbers::pi * u2);
  z1 = r * std::sin(2.0 * std::numbers::pi * u2);
}

}  // namespace rfc
