#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace contextdb {

/// 64-bit FNV-1a. Stable across platforms and releases; persisted formats
/// and cache keys depend on it.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seeded generator with platform-independent derived distributions.
/// std::mt19937_64's output sequence is fixed by the standard; the
/// std::*_distribution adaptors are not, so they are avoided here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in [-1, 1).
  double uniform_symmetric() { return uniform01() * 2.0 - 1.0; }
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  std::string state() const;
  void restore(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

}  // namespace contextdb
