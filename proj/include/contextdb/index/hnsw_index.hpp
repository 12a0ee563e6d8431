#pragma once

#include <cstdint>
#include <vector>

#include "contextdb/core/random.hpp"
#include "contextdb/index/vector_index.hpp"

namespace contextdb {

struct HnswParams {
  std::size_t m = 16;                 // max neighbors per node on upper layers; 2*m on layer 0
  std::size_t ef_construction = 200;  // beam width while linking a new node
  std::size_t ef_search = 64;         // beam width at query time, raised to k when smaller
  std::uint64_t seed = 42;            // level assignment

  friend bool operator==(const HnswParams&, const HnswParams&) = default;
};

/// Hierarchical navigable small-world graph.
///
/// Nodes get a level drawn from a geometric distribution with multiplier
/// 1/ln(m). Insertion descends greedily through the layers above the new
/// node's level, then links it on each lower layer to neighbors chosen by
/// the diversity heuristic from an ef_construction-wide beam. Queries
/// descend greedily to layer 0 and run an ef_search-wide beam there.
///
/// Removal tombstones a node: it keeps routing traffic but never appears in
/// results. Replacing a document adds a fresh node and tombstones the old.
class HnswIndex final : public VectorIndex {
 public:
  explicit HnswIndex(HnswParams params = {}, std::size_t dim = 0);

  HnswParams params() const;
  void set_ef_search(std::size_t ef_search);
  /// Highest layer currently in use; -1 when the graph is empty.
  int max_level() const;
  /// Layer-0 adjacency of every node in slot order. Exposed for
  /// determinism checks.
  std::vector<std::vector<std::uint32_t>> base_layer() const;

 private:
  static constexpr std::uint32_t kNoNode = 0xFFFFFFFFU;

  struct Node {
    int level = 0;
    std::vector<std::vector<std::uint32_t>> links;  // links[layer]
  };
  struct Scored {
    double distance;  // squared
    std::uint32_t node;
    bool operator<(const Scored& o) const noexcept {
      return distance < o.distance || (distance == o.distance && node < o.node);
    }
    bool operator>(const Scored& o) const noexcept { return o < *this; }
  };

  void on_insert(std::uint32_t slot) override;
  std::vector<Candidate> nearest(std::span<const float> query, std::size_t n) const override;
  void write_payload(SnapshotWriter& out) const override;
  void read_payload(SnapshotReader& in) override;

  int draw_level();
  double dist(std::span<const float> q, std::uint32_t node) const noexcept;
  std::uint32_t greedy_descend(std::span<const float> q, std::uint32_t entry, int from_level,
                               int to_level) const;
  std::vector<Scored> search_layer(std::span<const float> q, std::uint32_t entry, std::size_t ef,
                                   int level) const;
  std::vector<std::uint32_t> select_neighbors(std::vector<Scored> candidates,
                                              std::size_t max_count) const;
  void shrink_links(std::uint32_t node, int level, std::size_t max_count);
  std::size_t max_links(int level) const noexcept { return level == 0 ? 2 * params_.m : params_.m; }

  HnswParams params_;
  double level_mult_;
  Rng rng_;
  std::vector<Node> nodes_;
  std::uint32_t entry_ = kNoNode;
  int max_level_ = -1;
};

}  // namespace contextdb
