#include "contextdb/index/hnsw_index.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <queue>

#include "contextdb/core/error.hpp"
#include "contextdb/index/snapshot_io.hpp"

namespace contextdb {

namespace {

constexpr int kLevelCap = 32;

void validate(const HnswParams& p) {
  if (p.m < 2) throw InvalidArgumentError("HNSW m must be at least 2");
  if (p.ef_construction == 0) throw InvalidArgumentError("HNSW ef_construction must be positive");
  if (p.ef_search == 0) throw InvalidArgumentError("HNSW ef_search must be positive");
}

}  // namespace

HnswIndex::HnswIndex(HnswParams params, std::size_t dim)
    : VectorIndex(IndexKind::hnsw, dim),
      params_(params),
      level_mult_(0.0),
      rng_(params.seed) {
  validate(params_);
  level_mult_ = 1.0 / std::log(static_cast<double>(params_.m));
}

HnswParams HnswIndex::params() const {
  std::shared_lock lock(mutex_);
  return params_;
}

void HnswIndex::set_ef_search(std::size_t ef_search) {
  if (ef_search == 0) throw InvalidArgumentError("HNSW ef_search must be positive");
  std::unique_lock lock(mutex_);
  params_.ef_search = ef_search;
}

int HnswIndex::max_level() const {
  std::shared_lock lock(mutex_);
  return max_level_;
}

std::vector<std::vector<std::uint32_t>> HnswIndex::base_layer() const {
  std::shared_lock lock(mutex_);
  std::vector<std::vector<std::uint32_t>> out;
  out.reserve(nodes_.size());
  for (const auto& node : nodes_) out.push_back(node.links[0]);
  return out;
}

int HnswIndex::draw_level() {
  const double u = 1.0 - rng_.uniform01();  // (0, 1]
  const double level = std::floor(-std::log(u) * level_mult_);
  return static_cast<int>(std::min(level, static_cast<double>(kLevelCap)));
}

double HnswIndex::dist(std::span<const float> q, std::uint32_t node) const noexcept {
  return squared_euclidean(q, slot_vector(node));
}

std::uint32_t HnswIndex::greedy_descend(std::span<const float> q, std::uint32_t entry,
                                        int from_level, int to_level) const {
  Scored best{dist(q, entry), entry};
  for (int level = from_level; level >= to_level; --level) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (const std::uint32_t nb : nodes_[best.node].links[level]) {
        const Scored cand{dist(q, nb), nb};
        if (cand < best) {
          best = cand;
          improved = true;
        }
      }
    }
  }
  return best.node;
}

std::vector<HnswIndex::Scored> HnswIndex::search_layer(std::span<const float> q,
                                                       std::uint32_t entry, std::size_t ef,
                                                       int level) const {
  std::vector<char> visited(nodes_.size(), 0);
  std::priority_queue<Scored, std::vector<Scored>, std::greater<>> frontier;
  std::priority_queue<Scored> best;

  const Scored start{dist(q, entry), entry};
  frontier.push(start);
  best.push(start);
  visited[entry] = 1;

  while (!frontier.empty()) {
    const Scored current = frontier.top();
    if (best.size() >= ef && best.top() < current) break;
    frontier.pop();
    for (const std::uint32_t nb : nodes_[current.node].links[level]) {
      if (visited[nb]) continue;
      visited[nb] = 1;
      const Scored cand{dist(q, nb), nb};
      if (best.size() < ef || cand < best.top()) {
        frontier.push(cand);
        best.push(cand);
        if (best.size() > ef) best.pop();
      }
    }
  }

  std::vector<Scored> out(best.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = best.top();
    best.pop();
  }
  return out;
}

std::vector<std::uint32_t> HnswIndex::select_neighbors(std::vector<Scored> candidates,
                                                       std::size_t max_count) const {
  std::sort(candidates.begin(), candidates.end());
  std::vector<std::uint32_t> chosen;
  if (candidates.size() <= max_count) {
    for (const auto& c : candidates) chosen.push_back(c.node);
    return chosen;
  }
  // Keep a candidate only if it is closer to the base point than to every
  // neighbor already kept; this spreads links across directions.
  for (const auto& c : candidates) {
    if (chosen.size() >= max_count) break;
    const auto vc = slot_vector(c.node);
    const bool diverse = std::none_of(chosen.begin(), chosen.end(), [&](std::uint32_t kept) {
      return squared_euclidean(vc, slot_vector(kept)) < c.distance;
    });
    if (diverse) chosen.push_back(c.node);
  }
  return chosen;
}

void HnswIndex::shrink_links(std::uint32_t node, int level, std::size_t max_count) {
  auto& links = nodes_[node].links[level];
  const auto base = slot_vector(node);
  std::vector<Scored> cands;
  cands.reserve(links.size());
  for (const std::uint32_t nb : links) cands.push_back({squared_euclidean(base, slot_vector(nb)), nb});
  links = select_neighbors(std::move(cands), max_count);
}

void HnswIndex::on_insert(std::uint32_t slot) {
  const int level = draw_level();
  nodes_.resize(static_cast<std::size_t>(slot) + 1);
  nodes_[slot].level = level;
  nodes_[slot].links.resize(static_cast<std::size_t>(level) + 1);

  if (entry_ == kNoNode) {
    entry_ = slot;
    max_level_ = level;
    return;
  }

  const auto q = slot_vector(slot);
  std::uint32_t current = entry_;
  if (max_level_ > level) current = greedy_descend(q, entry_, max_level_, level + 1);

  for (int l = std::min(level, max_level_); l >= 0; --l) {
    auto beam = search_layer(q, current, params_.ef_construction, l);
    current = beam.front().node;
    auto neighbors = select_neighbors(std::move(beam), max_links(l));
    nodes_[slot].links[l] = neighbors;
    for (const std::uint32_t nb : neighbors) {
      auto& back = nodes_[nb].links[l];
      back.push_back(slot);
      if (back.size() > max_links(l)) shrink_links(nb, l, max_links(l));
    }
  }

  if (level > max_level_) {
    entry_ = slot;
    max_level_ = level;
  }
}

std::vector<VectorIndex::Candidate> HnswIndex::nearest(std::span<const float> query,
                                                       std::size_t n) const {
  if (entry_ == kNoNode) return {};
  const std::uint32_t start = max_level_ > 0 ? greedy_descend(query, entry_, max_level_, 1) : entry_;
  const std::size_t wanted = std::min(n, live_count());

  std::size_t ef = std::max(params_.ef_search, n);
  std::vector<Candidate> out;
  while (true) {
    const auto beam = search_layer(query, start, ef, 0);
    out.clear();
    for (const auto& s : beam) {
      if (alive(s.node)) out.push_back({std::sqrt(s.distance), s.node});
    }
    // Tombstones occupy beam slots; widen until enough live nodes surface.
    if (out.size() >= wanted || ef >= nodes_.size()) break;
    ef *= 2;
  }
  if (out.size() < wanted) {
    // Heavy deletion can leave live nodes reachable only through pruned
    // links; fall back to a scan so every live node stays findable.
    std::vector<char> seen(nodes_.size(), 0);
    for (const auto& c : out) seen[c.slot] = 1;
    for (std::uint32_t s = 0; s < slot_count(); ++s) {
      if (alive(s) && seen[s] == 0) out.push_back({std::sqrt(dist(query, s)), s});
    }
  }
  rank_candidates(out, n);
  return out;
}

void HnswIndex::write_payload(SnapshotWriter& out) const {
  out.u64(params_.m);
  out.u64(params_.ef_construction);
  out.u64(params_.ef_search);
  out.u64(params_.seed);
  out.str(rng_.state());
  out.u32(entry_);
  out.i32(max_level_);
  out.u64(nodes_.size());
  for (const auto& node : nodes_) {
    out.i32(node.level);
    for (const auto& links : node.links) {
      out.u32(static_cast<std::uint32_t>(links.size()));
      for (const std::uint32_t nb : links) out.u32(nb);
    }
  }
}

void HnswIndex::read_payload(SnapshotReader& in) {
  HnswParams p;
  p.m = in.u64();
  p.ef_construction = in.u64();
  p.ef_search = in.u64();
  p.seed = in.u64();
  try {
    validate(p);
    params_ = p;
    level_mult_ = 1.0 / std::log(static_cast<double>(p.m));
    rng_.restore(in.str());
  } catch (const InvalidArgumentError& e) {
    throw SnapshotCorruptError(std::string("bad HNSW header: ") + e.what());
  }
  entry_ = in.u32();
  max_level_ = in.i32();

  const std::size_t count = in.count(8);
  if (count != slot_count()) throw SnapshotCorruptError("HNSW node count does not match documents");
  nodes_.assign(count, Node{});
  for (auto& node : nodes_) {
    node.level = in.i32();
    if (node.level < 0 || node.level > kLevelCap) throw SnapshotCorruptError("bad HNSW node level");
    node.links.resize(static_cast<std::size_t>(node.level) + 1);
    for (auto& links : node.links) {
      const std::uint32_t n = in.u32();
      if (n > in.remaining() / 4) throw SnapshotCorruptError("HNSW link list is truncated");
      links.resize(n);
      for (auto& nb : links) {
        nb = in.u32();
        if (nb >= count) throw SnapshotCorruptError("HNSW link points past the node table");
      }
    }
  }
  const bool empty = count == 0;
  if (empty != (entry_ == kNoNode) || (!empty && (entry_ >= count || max_level_ != nodes_[entry_].level))) {
    throw SnapshotCorruptError("HNSW entry point is inconsistent");
  }
}

}  // namespace contextdb
