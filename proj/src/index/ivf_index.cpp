#include "contextdb/index/ivf_index.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <limits>
#include <numeric>

#include "contextdb/core/error.hpp"
#include "contextdb/core/random.hpp"
#include "contextdb/index/snapshot_io.hpp"

namespace contextdb {

namespace {

constexpr double kConvergence = 1e-6;

std::uint32_t argmin_centroid(std::span<const float> v, const std::vector<float>& centroids,
                              std::size_t dim, double* best_dist = nullptr) {
  const std::size_t nlist = centroids.size() / dim;
  std::uint32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < nlist; ++c) {
    const double d = squared_euclidean(v, {centroids.data() + c * dim, dim});
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::uint32_t>(c);
    }
  }
  if (best_dist != nullptr) *best_dist = best_d;
  return best;
}

void validate(const IvfParams& p, std::size_t nlist) {
  if (p.nprobe == 0) throw InvalidArgumentError("IVF nprobe must be at least 1");
  if (p.kmeans_iters == 0) throw InvalidArgumentError("IVF kmeans_iters must be at least 1");
  if (nlist != IvfParams::kAutoNlist && p.nprobe > nlist) {
    throw InvalidArgumentError("IVF nprobe (" + std::to_string(p.nprobe) +
                               ") must not exceed nlist (" + std::to_string(nlist) + ")");
  }
}

}  // namespace

std::vector<float> kmeans(std::span<const Vector> vectors, std::size_t nlist,
                          std::size_t max_iters, std::uint64_t seed) {
  if (nlist == 0) throw InvalidArgumentError("k-means needs at least one centroid");
  if (vectors.size() < nlist) throw TrainingError(nlist, vectors.size());
  const std::size_t n = vectors.size();
  const std::size_t dim = vectors.front().dim();

  // k-means++ seeding: each next centroid is drawn with probability
  // proportional to its squared distance from the nearest chosen one.
  Rng rng(seed);
  std::vector<float> centroids;
  centroids.reserve(nlist * dim);
  const auto add_centroid = [&](std::size_t i) {
    const auto v = vectors[i].values();
    centroids.insert(centroids.end(), v.begin(), v.end());
  };
  add_centroid(static_cast<std::size_t>(rng.uniform_index(n)));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < nlist; ++c) {
    const std::span<const float> last{centroids.data() + (c - 1) * dim, dim};
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_euclidean(vectors[i].values(), last));
      total += nearest[i];
    }
    std::size_t pick = static_cast<std::size_t>(rng.uniform_index(n));
    if (total > 0.0) {
      double target = rng.uniform01() * total;
      for (std::size_t i = 0; i < n; ++i) {
        if (nearest[i] <= 0.0) continue;
        pick = i;  // rounding can leave target just above zero at the end
        target -= nearest[i];
        if (target < 0.0) break;
      }
    }
    add_centroid(pick);
  }

  std::vector<std::uint32_t> assign(n);
  std::vector<double> assign_dist(n);
  std::vector<double> sums(nlist * dim);
  std::vector<std::size_t> counts(nlist);

  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = vectors[i].values();
      assign[i] = argmin_centroid(v, centroids, dim, &assign_dist[i]);
      ++counts[assign[i]];
      double* sum = sums.data() + assign[i] * dim;
      for (std::size_t d = 0; d < dim; ++d) sum[d] += v[d];
    }

    std::vector<float> next(nlist * dim);
    for (std::size_t c = 0; c < nlist; ++c) {
      if (counts[c] == 0) {
        // Reseed to the point worst served by its current centroid.
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i) {
          if (assign_dist[i] > assign_dist[far]) far = i;
        }
        const auto v = vectors[far].values();
        std::copy(v.begin(), v.end(), next.begin() + static_cast<std::ptrdiff_t>(c * dim));
        assign_dist[far] = -1.0;
        continue;
      }
      for (std::size_t d = 0; d < dim; ++d) {
        next[c * dim + d] = static_cast<float>(sums[c * dim + d] / static_cast<double>(counts[c]));
      }
    }

    double movement = 0.0;
    for (std::size_t c = 0; c < nlist; ++c) {
      const std::span<const float> before{centroids.data() + c * dim, dim};
      const std::span<const float> after{next.data() + c * dim, dim};
      movement = std::max(movement, std::sqrt(squared_euclidean(before, after)));
    }
    centroids = std::move(next);
    if (movement < kConvergence) break;
  }
  return centroids;
}

IvfIndex::IvfIndex(IvfParams params) : VectorIndex(IndexKind::ivf, 0), params_(params) {
  validate(params_, params_.nlist);
}

void IvfIndex::train(std::span<const Vector> vectors) { train(vectors, params()); }

void IvfIndex::train(std::span<const Vector> vectors, const IvfParams& params) {
  std::size_t nlist = params.nlist;
  IvfParams effective = params;
  if (nlist == IvfParams::kAutoNlist) {
    nlist = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(vectors.size())))));
    effective.nprobe = std::min(effective.nprobe, nlist);
  }
  validate(effective, nlist);
  if (vectors.size() < nlist || vectors.empty()) throw TrainingError(nlist, vectors.size());
  const std::size_t dim = vectors.front().dim();
  for (const auto& v : vectors) {
    if (v.dim() != dim) throw DimensionMismatchError(dim, v.dim());
  }

  auto centroids = kmeans(vectors, nlist, effective.kmeans_iters, effective.seed);

  std::unique_lock lock(mutex_);
  if (dim_unlocked() != 0 && dim_unlocked() != dim && slot_count() > 0) {
    throw DimensionMismatchError(dim_unlocked(), dim);
  }
  set_dim(dim);
  params_ = effective;
  params_.nlist = nlist;
  centroids_ = std::move(centroids);
  trained_ = true;
  lists_.assign(nlist, {});
  slot_list_.assign(slot_count(), kNoList);
  for (std::uint32_t slot = 0; slot < slot_count(); ++slot) {
    if (alive(slot)) on_insert(slot);
  }
}

bool IvfIndex::trained() const {
  std::shared_lock lock(mutex_);
  return trained_;
}

IvfParams IvfIndex::params() const {
  std::shared_lock lock(mutex_);
  return params_;
}

void IvfIndex::set_nprobe(std::size_t nprobe) {
  std::unique_lock lock(mutex_);
  IvfParams p = params_;
  p.nprobe = nprobe;
  validate(p, p.nlist);
  params_ = p;
}

std::vector<Vector> IvfIndex::centroids() const {
  std::shared_lock lock(mutex_);
  std::vector<Vector> out;
  for (std::size_t c = 0; c < lists_.size(); ++c) {
    const auto v = centroid(c);
    out.emplace_back(std::vector<float>(v.begin(), v.end()));
  }
  return out;
}

std::vector<std::size_t> IvfIndex::list_sizes() const {
  std::shared_lock lock(mutex_);
  std::vector<std::size_t> out;
  out.reserve(lists_.size());
  for (const auto& l : lists_) out.push_back(l.size());
  return out;
}

void IvfIndex::check_insertable() const {
  if (!trained_) throw IndexStateError("IVF index must be trained before inserting documents");
}

void IvfIndex::check_searchable() const {
  if (!trained_) throw IndexStateError("IVF index must be trained before searching");
}

std::uint32_t IvfIndex::nearest_centroid(std::span<const float> v) const noexcept {
  return argmin_centroid(v, centroids_, dim_unlocked());
}

void IvfIndex::on_insert(std::uint32_t slot) {
  const std::uint32_t list = nearest_centroid(slot_vector(slot));
  lists_[list].push_back(slot);
  if (slot_list_.size() <= slot) slot_list_.resize(static_cast<std::size_t>(slot) + 1, kNoList);
  slot_list_[slot] = list;
}

void IvfIndex::on_remove(std::uint32_t slot) {
  if (slot >= slot_list_.size() || slot_list_[slot] == kNoList) return;
  auto& list = lists_[slot_list_[slot]];
  list.erase(std::find(list.begin(), list.end(), slot));
  slot_list_[slot] = kNoList;
}

std::vector<VectorIndex::Candidate> IvfIndex::nearest(std::span<const float> query,
                                                      std::size_t n) const {
  const std::size_t nlist = lists_.size();
  std::vector<std::pair<double, std::uint32_t>> order(nlist);
  for (std::size_t c = 0; c < nlist; ++c) {
    order[c] = {squared_euclidean(query, centroid(c)), static_cast<std::uint32_t>(c)};
  }
  const std::size_t probes = std::min(params_.nprobe, nlist);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(probes), order.end());

  std::vector<Candidate> cands;
  for (std::size_t p = 0; p < probes; ++p) {
    for (const std::uint32_t slot : lists_[order[p].second]) {
      cands.push_back({std::sqrt(squared_euclidean(query, slot_vector(slot))), slot});
    }
  }
  rank_candidates(cands, n);
  return cands;
}

void IvfIndex::write_payload(SnapshotWriter& out) const {
  out.u64(params_.nlist);
  out.u64(params_.nprobe);
  out.u64(params_.kmeans_iters);
  out.u64(params_.seed);
  out.u8(trained_ ? 1 : 0);
  out.u64(centroids_.size());
  for (const float v : centroids_) out.f32(v);
  out.u64(lists_.size());
  for (const auto& list : lists_) {
    out.u64(list.size());
    for (const std::uint32_t slot : list) out.u32(slot);
  }
}

void IvfIndex::read_payload(SnapshotReader& in) {
  IvfParams p;
  p.nlist = in.u64();
  p.nprobe = in.u64();
  p.kmeans_iters = in.u64();
  p.seed = in.u64();
  try {
    validate(p, p.nlist);
  } catch (const InvalidArgumentError& e) {
    throw SnapshotCorruptError(std::string("bad IVF header: ") + e.what());
  }
  params_ = p;
  trained_ = in.u8() != 0;

  const std::size_t values = in.count(4);
  centroids_.resize(values);
  for (auto& v : centroids_) v = in.f32();

  const std::size_t nlist = in.count(8);
  const std::size_t dim = dim_unlocked();
  const bool shape_ok = trained_ ? (nlist == p.nlist && dim > 0 && values == nlist * dim)
                                 : (nlist == 0 && values == 0);
  if (!shape_ok) throw SnapshotCorruptError("IVF centroid table has the wrong shape");

  lists_.assign(nlist, {});
  slot_list_.assign(slot_count(), kNoList);
  std::size_t placed = 0;
  for (std::size_t c = 0; c < nlist; ++c) {
    const std::size_t len = in.count(4);
    lists_[c].resize(len);
    for (auto& slot : lists_[c]) {
      slot = in.u32();
      if (slot >= slot_count() || !alive(slot) || slot_list_[slot] != kNoList) {
        throw SnapshotCorruptError("IVF inverted list references an invalid document");
      }
      slot_list_[slot] = static_cast<std::uint32_t>(c);
    }
    placed += len;
  }
  if (placed != live_count()) throw SnapshotCorruptError("IVF lists do not cover every document");
}

}  // namespace contextdb
