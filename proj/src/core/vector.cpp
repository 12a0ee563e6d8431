#include "contextdb/core/vector.hpp"

#include <cmath>
#include <string>

#include "contextdb/core/error.hpp"

namespace contextdb {

namespace {

void check_values(const std::vector<float>& values) {
  if (values.empty()) throw InvalidArgumentError("vector must have at least one coordinate");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InvalidArgumentError("vector coordinate " + std::to_string(i) + " is not finite");
    }
  }
}

}  // namespace

Vector::Vector(std::vector<float> values) : values_(std::move(values)) { check_values(values_); }

Vector::Vector(std::initializer_list<float> values) : values_(values) { check_values(values_); }

double squared_euclidean(std::span<const float> a, std::span<const float> b) noexcept {
  // Four independent accumulators; the summation order is fixed, so every
  // index kind reports bit-identical distances for the same pair.
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double d = static_cast<double>(a[i + j]) - static_cast<double>(b[i + j]);
      acc[j] += d * d;
    }
  }
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc[0] += d * d;
  }
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double euclidean_distance(const Vector& a, const Vector& b) {
  if (a.dim() != b.dim()) throw DimensionMismatchError(a.dim(), b.dim());
  return std::sqrt(squared_euclidean(a.values(), b.values()));
}

}  // namespace contextdb
