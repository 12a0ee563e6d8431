#pragma once

#include "contextdb/index/vector_index.hpp"

namespace contextdb {

/// Exhaustive scan. Exact k-nearest results; the reference for recall.
class FlatIndex final : public VectorIndex {
 public:
  /// dim 0 lets the first insert fix the dimension.
  explicit FlatIndex(std::size_t dim = 0) : VectorIndex(IndexKind::flat, dim) {}

 private:
  void on_insert(std::uint32_t) override {}
  std::vector<Candidate> nearest(std::span<const float> query, std::size_t n) const override;
  bool exact() const noexcept override { return true; }
  void write_payload(SnapshotWriter&) const override {}
  void read_payload(SnapshotReader&) override {}
};

}  // namespace contextdb
