#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace scout {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

template <typename... Rest>
std::uint64_t hash_values(std::uint64_t first, Rest... rest) {
  std::uint64_t h = mix64(first);
  ((h = hash_combine(h, static_cast<std::uint64_t>(rest))), ...);
  return h;
}

// FNV-1a; stable across platforms and runs, unlike std::hash.
std::uint64_t hash_string(std::string_view s);

// Seeded generator whose derived draws do not depend on the standard
// library's (implementation-defined) distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n). n must be > 0.
  std::size_t index(std::size_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace scout
