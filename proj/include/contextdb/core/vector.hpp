#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace contextdb {

/// Fixed-dimension embedding. Always nonempty with finite coordinates.
class Vector {
 public:
  explicit Vector(std::vector<float> values);
  Vector(std::initializer_list<float> values);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  float operator[](std::size_t i) const noexcept { return values_[i]; }

  bool operator==(const Vector&) const = default;

 private:
  std::vector<float> values_;
};

/// Unchecked squared L2 distance; callers guarantee equal lengths.
/// Accumulates in double so that rankings are stable across index kinds.
double squared_euclidean(std::span<const float> a, std::span<const float> b) noexcept;

/// Straight-line distance. Throws DimensionMismatchError on unequal dims.
double euclidean_distance(const Vector& a, const Vector& b);

}  // namespace contextdb
