#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "contextdb/core/vector.hpp"

namespace contextdb {

class Rng;

/// Maps text to a Vector of fixed dimension. Implementations must be
/// deterministic across calls and process restarts.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual Vector embed(std::string_view text) const = 0;
  virtual std::string name() const = 0;
};

/// Unit-norm pseudo-random vector derived from (text, seed).
/// Construction (version 1, pinned): FNV-1a of the text, mixed with the
/// splitmix64 of the seed, seeds an mt19937_64; dim draws uniform on
/// [-1, 1) are then L2-normalized.
Vector hash_embed(std::string_view text, std::size_t dim, std::uint64_t seed);

/// dim uniform draws on [-1, 1), L2-normalized. Consumes exactly dim values.
Vector random_unit_vector(Rng& rng, std::size_t dim);

class HashEmbedder final : public EmbeddingProvider {
 public:
  HashEmbedder(std::size_t dim, std::uint64_t seed);

  std::size_t dim() const override { return dim_; }
  Vector embed(std::string_view text) const override { return hash_embed(text, dim_, seed_); }
  std::string name() const override { return "hash"; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// 2-D lookup for the running-shoe example: four product names plus the
/// demo query. Unknown text throws EmbeddingError listing the keys.
Vector fixture_embed(std::string_view text);

class FixtureEmbedder final : public EmbeddingProvider {
 public:
  std::size_t dim() const override { return 2; }
  Vector embed(std::string_view text) const override { return fixture_embed(text); }
  std::string name() const override { return "fixture"; }
};

}  // namespace contextdb
