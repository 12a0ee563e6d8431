#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "contextdb/core/document.hpp"
#include "contextdb/core/filter.hpp"
#include "contextdb/core/vector.hpp"

namespace contextdb {

class SnapshotWriter;
class SnapshotReader;

struct SearchHit {
  std::string doc_id;
  double distance = 0.0;
  std::size_t rank = 0;  // 1-based

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

enum class IndexKind : std::uint8_t { flat = 0, hnsw = 1, ivf = 2 };

std::string_view index_kind_name(IndexKind kind) noexcept;
/// Throws InvalidArgumentError for anything but "flat", "hnsw", "ivf".
IndexKind parse_index_kind(std::string_view name);

/// Semantic-tier index over Documents, searched by Euclidean distance.
///
/// Results are ordered by ascending distance with ties broken by ascending
/// doc_id. Any number of searches may run concurrently; insert, remove and
/// training take an exclusive lock, so a search observes the index either
/// entirely before or entirely after a mutation.
class VectorIndex {
 public:
  virtual ~VectorIndex() = default;
  VectorIndex(const VectorIndex&) = delete;
  VectorIndex& operator=(const VectorIndex&) = delete;

  IndexKind kind() const noexcept { return kind_; }
  /// Zero until fixed by the first insert (flat, HNSW) or by training (IVF).
  std::size_t dim() const;
  /// Number of live documents.
  std::size_t size() const;

  /// Inserting an existing id replaces the prior document atomically.
  void insert(Document doc);
  /// Returns whether the id was present.
  bool remove(std::string_view doc_id);
  std::optional<Document> get(std::string_view doc_id) const;

  std::vector<SearchHit> search(const Vector& query, std::size_t k) const;
  /// Every returned document satisfies `filter`. Exact indexes filter first;
  /// approximate ones oversample max(4k, k+32) candidates, post-filter, and
  /// double the oversampling up to three times while fewer than k survive.
  std::vector<SearchHit> search_filtered(const Vector& query, std::size_t k,
                                         const FilterExpr& filter) const;

  /// Writes a versioned binary snapshot, replacing `path` atomically.
  void save(const std::filesystem::path& path) const;

 protected:
  struct Candidate {
    double distance;
    std::uint32_t slot;
  };

  VectorIndex(IndexKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

  // Hooks run with mutex_ held (exclusive for mutations, shared for reads).
  virtual void check_insertable() const {}
  virtual void on_insert(std::uint32_t slot) = 0;
  virtual void on_remove(std::uint32_t /*slot*/) {}
  /// Up to `n` live candidates sorted by (distance, doc_id).
  virtual std::vector<Candidate> nearest(std::span<const float> query, std::size_t n) const = 0;
  /// Throws IndexStateError when the index cannot serve queries.
  virtual void check_searchable() const;
  virtual bool exact() const noexcept { return false; }
  virtual void write_payload(SnapshotWriter& out) const = 0;
  virtual void read_payload(SnapshotReader& in) = 0;

  std::span<const float> slot_vector(std::uint32_t slot) const noexcept {
    return {data_.data() + static_cast<std::size_t>(slot) * dim_, dim_};
  }
  bool alive(std::uint32_t slot) const noexcept { return alive_[slot] != 0; }
  const std::string& slot_id(std::uint32_t slot) const noexcept { return docs_[slot].id; }
  std::uint32_t slot_count() const noexcept { return static_cast<std::uint32_t>(docs_.size()); }
  std::size_t live_count() const noexcept { return ids_.size(); }
  void set_dim(std::size_t dim) noexcept { dim_ = dim; }
  std::size_t dim_unlocked() const noexcept { return dim_; }

  /// Sorts by (distance, doc_id) and truncates to n.
  void rank_candidates(std::vector<Candidate>& cands, std::size_t n) const;
  bool candidate_less(const Candidate& a, const Candidate& b) const noexcept;

  mutable std::shared_mutex mutex_;

 private:
  friend std::unique_ptr<VectorIndex> load_index(const std::filesystem::path& path);

  void check_query(const Vector& query, std::size_t k) const;
  std::vector<SearchHit> to_hits(const std::vector<Candidate>& cands) const;

  IndexKind kind_;
  std::size_t dim_;
  std::vector<Document> docs_;
  std::vector<std::uint8_t> alive_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::uint32_t> ids_;  // live id -> slot
};

/// Reads a snapshot written by VectorIndex::save. Throws SnapshotVersionError
/// for a foreign format version and SnapshotCorruptError for anything
/// truncated, mangled or not a snapshot at all.
std::unique_ptr<VectorIndex> load_index(const std::filesystem::path& path);

}  // namespace contextdb
