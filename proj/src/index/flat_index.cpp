#include "contextdb/index/flat_index.hpp"

#include <cmath>

namespace contextdb {

std::vector<VectorIndex::Candidate> FlatIndex::nearest(std::span<const float> query,
                                                       std::size_t n) const {
  std::vector<Candidate> cands;
  cands.reserve(live_count());
  for (std::uint32_t slot = 0; slot < slot_count(); ++slot) {
    if (!alive(slot)) continue;
    cands.push_back({std::sqrt(squared_euclidean(query, slot_vector(slot))), slot});
  }
  rank_candidates(cands, n);
  return cands;
}

}  // namespace contextdb
