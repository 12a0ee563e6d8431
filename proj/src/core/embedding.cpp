#include "contextdb/core/embedding.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "contextdb/core/error.hpp"
#include "contextdb/core/random.hpp"
#include "contextdb/core/shoe_fixture.hpp"

namespace contextdb {

Vector random_unit_vector(Rng& rng, std::size_t dim) {
  if (dim == 0) throw EmbeddingError("embedding dimension must be at least 1");
  std::vector<double> draws(dim);
  double norm_sq = 0.0;
  for (auto& d : draws) {
    d = rng.uniform_symmetric();
    norm_sq += d * d;
  }
  std::vector<float> values(dim, 0.0F);
  if (norm_sq == 0.0) {
    values[0] = 1.0F;
    return Vector(std::move(values));
  }
  const double norm = std::sqrt(norm_sq);
  for (std::size_t i = 0; i < dim; ++i) values[i] = static_cast<float>(draws[i] / norm);
  return Vector(std::move(values));
}

Vector hash_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw EmbeddingError("embedding dimension must be at least 1");
  Rng rng(fnv1a64(text) ^ splitmix64(seed));
  return random_unit_vector(rng, dim);
}

HashEmbedder::HashEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim == 0) throw EmbeddingError("embedding dimension must be at least 1");
}

Vector fixture_embed(std::string_view text) {
  if (text == fixture::kDemoQuery) return Vector{fixture::kDemoQueryX, fixture::kDemoQueryY};
  for (const auto& p : fixture::shoe_products()) {
    if (text == p.name) return Vector{p.x, p.y};
  }
  std::string known;
  for (const auto& p : fixture::shoe_products()) {
    known += "\"" + std::string(p.name) + "\", ";
  }
  known += "\"" + std::string(fixture::kDemoQuery) + "\"";
  throw EmbeddingError("no fixture embedding for \"" + std::string(text) + "\"; known keys: " +
                       known);
}

}  // namespace contextdb
