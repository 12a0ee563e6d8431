#pragma once

#include <cstdint>
#include <vector>

#include "contextdb/index/vector_index.hpp"

namespace contextdb {

struct IvfParams {
  /// Number of coarse centroids. kAutoNlist picks ceil(sqrt(N)) at training.
  std::size_t nlist = kAutoNlist;
  std::size_t nprobe = 8;  // clamped to nlist when nlist is chosen automatically
  std::size_t kmeans_iters = 20;
  std::uint64_t seed = 42;

  static constexpr std::size_t kAutoNlist = 0;

  friend bool operator==(const IvfParams&, const IvfParams&) = default;
};

/// Inverted-file index: a seeded k-means coarse quantizer partitions the
/// space into nlist cells; queries scan the nprobe cells whose centroids
/// are nearest. With nprobe == nlist the search is exhaustive and exact.
class IvfIndex final : public VectorIndex {
 public:
  explicit IvfIndex(IvfParams params = {});

  /// Fits centroids and reroutes any documents already stored. Requires at
  /// least nlist vectors of one dimension.
  void train(std::span<const Vector> vectors);
  void train(std::span<const Vector> vectors, const IvfParams& params);

  bool trained() const;
  IvfParams params() const;
  void set_nprobe(std::size_t nprobe);
  std::vector<Vector> centroids() const;
  /// Document count per inverted list, live entries only.
  std::vector<std::size_t> list_sizes() const;

 private:
  void check_insertable() const override;
  void check_searchable() const override;
  void on_insert(std::uint32_t slot) override;
  void on_remove(std::uint32_t slot) override;
  std::vector<Candidate> nearest(std::span<const float> query, std::size_t n) const override;
  void write_payload(SnapshotWriter& out) const override;
  void read_payload(SnapshotReader& in) override;

  std::uint32_t nearest_centroid(std::span<const float> v) const noexcept;
  std::span<const float> centroid(std::size_t c) const noexcept {
    return {centroids_.data() + c * dim_unlocked(), dim_unlocked()};
  }

  IvfParams params_;
  bool trained_ = false;
  std::vector<float> centroids_;  // nlist x dim
  std::vector<std::vector<std::uint32_t>> lists_;
  std::vector<std::uint32_t> slot_list_;  // slot -> list, kNoList for dead slots
  static constexpr std::uint32_t kNoList = 0xFFFFFFFFU;
};

/// k-means with deterministic seeding: initial centroids are a seeded
/// sample without replacement; an empty cluster is reseeded to the point
/// farthest from its assigned centroid. Stops after `max_iters` rounds or
/// when no centroid moves by 1e-6 or more. Returns nlist x dim floats.
std::vector<float> kmeans(std::span<const Vector> vectors, std::size_t nlist,
                          std::size_t max_iters, std::uint64_t seed);

}  // namespace contextdb
