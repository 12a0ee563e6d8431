#include "contextdb/index/vector_index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <mutex>
#include <system_error>

#include "contextdb/core/error.hpp"
#include "contextdb/core/random.hpp"
#include "contextdb/index/flat_index.hpp"
#include "contextdb/index/hnsw_index.hpp"
#include "contextdb/index/ivf_index.hpp"
#include "contextdb/index/snapshot_io.hpp"

namespace contextdb {

std::string_view index_kind_name(IndexKind kind) noexcept {
  switch (kind) {
    case IndexKind::flat: return "flat";
    case IndexKind::hnsw: return "hnsw";
    case IndexKind::ivf: return "ivf";
  }
  return "unknown";
}

IndexKind parse_index_kind(std::string_view name) {
  if (name == "flat") return IndexKind::flat;
  if (name == "hnsw") return IndexKind::hnsw;
  if (name == "ivf") return IndexKind::ivf;
  throw InvalidArgumentError("unknown index kind '" + std::string(name) +
                             "' (expected flat, hnsw or ivf)");
}

std::size_t VectorIndex::dim() const {
  std::shared_lock lock(mutex_);
  return dim_;
}

std::size_t VectorIndex::size() const {
  std::shared_lock lock(mutex_);
  return ids_.size();
}

void VectorIndex::insert(Document doc) {
  validate_document(doc);
  std::unique_lock lock(mutex_);
  check_insertable();
  if (dim_ == 0) {
    dim_ = doc.embedding.dim();
  } else if (doc.embedding.dim() != dim_) {
    throw DimensionMismatchError(dim_, doc.embedding.dim());
  }

  const auto slot = static_cast<std::uint32_t>(docs_.size());
  const auto values = doc.embedding.values();
  data_.insert(data_.end(), values.begin(), values.end());
  alive_.push_back(1);
  const auto previous = ids_.find(doc.id);
  const std::optional<std::uint32_t> replaced =
      previous == ids_.end() ? std::nullopt : std::optional(previous->second);
  ids_[doc.id] = slot;
  docs_.push_back(std::move(doc));

  if (replaced) {
    alive_[*replaced] = 0;
    on_remove(*replaced);
    docs_[*replaced].text.clear();
    docs_[*replaced].metadata.clear();
  }
  on_insert(slot);
}

bool VectorIndex::remove(std::string_view doc_id) {
  std::unique_lock lock(mutex_);
  const auto it = ids_.find(std::string(doc_id));
  if (it == ids_.end()) return false;
  const std::uint32_t slot = it->second;
  ids_.erase(it);
  alive_[slot] = 0;
  on_remove(slot);
  docs_[slot].text.clear();
  docs_[slot].metadata.clear();
  return true;
}

std::optional<Document> VectorIndex::get(std::string_view doc_id) const {
  std::shared_lock lock(mutex_);
  const auto it = ids_.find(std::string(doc_id));
  if (it == ids_.end()) return std::nullopt;
  return docs_[it->second];
}

void VectorIndex::check_searchable() const {
  if (ids_.empty()) throw IndexStateError("cannot search an empty index");
}

void VectorIndex::check_query(const Vector& query, std::size_t k) const {
  if (k == 0) throw InvalidArgumentError("k must be at least 1");
  if (query.dim() != dim_) throw DimensionMismatchError(dim_, query.dim());
}

bool VectorIndex::candidate_less(const Candidate& a, const Candidate& b) const noexcept {
  if (a.distance != b.distance) return a.distance < b.distance;
  return docs_[a.slot].id < docs_[b.slot].id;
}

void VectorIndex::rank_candidates(std::vector<Candidate>& cands, std::size_t n) const {
  const auto less = [this](const Candidate& a, const Candidate& b) { return candidate_less(a, b); };
  if (cands.size() > n) {
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(n), cands.end(),
                      less);
    cands.resize(n);
  } else {
    std::sort(cands.begin(), cands.end(), less);
  }
}

std::vector<SearchHit> VectorIndex::to_hits(const std::vector<Candidate>& cands) const {
  std::vector<SearchHit> hits;
  hits.reserve(cands.size());
  for (const auto& c : cands) {
    hits.push_back(SearchHit{docs_[c.slot].id, c.distance, hits.size() + 1});
  }
  return hits;
}

std::vector<SearchHit> VectorIndex::search(const Vector& query, std::size_t k) const {
  std::shared_lock lock(mutex_);
  check_searchable();
  check_query(query, k);
  return to_hits(nearest(query.values(), k));
}

std::vector<SearchHit> VectorIndex::search_filtered(const Vector& query, std::size_t k,
                                                    const FilterExpr& filter) const {
  std::shared_lock lock(mutex_);
  check_searchable();
  check_query(query, k);

  std::vector<Candidate> kept;
  if (exact()) {
    for (std::uint32_t slot = 0; slot < docs_.size(); ++slot) {
      if (!alive_[slot] || !evaluate_filter(filter, docs_[slot].metadata)) continue;
      kept.push_back({std::sqrt(squared_euclidean(query.values(), slot_vector(slot))), slot});
    }
    rank_candidates(kept, k);
    return to_hits(kept);
  }

  std::size_t fetch = std::max(4 * k, k + 32);
  constexpr int kMaxRetries = 3;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    const auto cands = nearest(query.values(), fetch);
    kept.clear();
    for (const auto& c : cands) {
      if (evaluate_filter(filter, docs_[c.slot].metadata)) kept.push_back(c);
    }
    // A short candidate list means the whole index was already covered.
    if (kept.size() >= k || cands.size() < fetch) break;
    fetch *= 2;
  }
  if (kept.size() > k) kept.resize(k);
  return to_hits(kept);
}

namespace {

void write_metadata(SnapshotWriter& out, const Metadata& meta) {
  out.u32(static_cast<std::uint32_t>(meta.size()));
  for (const auto& [key, value] : meta) {
    out.str(key);
    out.u8(static_cast<std::uint8_t>(value.type()));
    switch (value.type()) {
      case MetaValue::Type::number: out.f64(value.as_number()); break;
      case MetaValue::Type::string: out.str(value.as_string()); break;
      case MetaValue::Type::boolean: out.u8(value.as_bool() ? 1 : 0); break;
    }
  }
}

Metadata read_metadata(SnapshotReader& in) {
  Metadata meta;
  const std::uint32_t n = in.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string key = in.str();
    switch (in.u8()) {
      case 0: meta.emplace(std::move(key), MetaValue(in.f64())); break;
      case 1: meta.emplace(std::move(key), MetaValue(in.str())); break;
      case 2: meta.emplace(std::move(key), MetaValue(in.u8() != 0)); break;
      default: throw SnapshotCorruptError("unknown metadata type tag");
    }
  }
  return meta;
}

}  // namespace

void VectorIndex::save(const std::filesystem::path& path) const {
  SnapshotWriter out;
  {
    std::shared_lock lock(mutex_);
    out.raw(kSnapshotMagic);
    out.u32(kSnapshotFormatVersion);
    out.u32(static_cast<std::uint32_t>(dim_));
    out.u8(static_cast<std::uint8_t>(kind_));
    out.u64(docs_.size());
    for (std::uint32_t slot = 0; slot < docs_.size(); ++slot) {
      const Document& doc = docs_[slot];
      out.u8(alive_[slot]);
      out.str(doc.id);
      out.str(doc.text);
      write_metadata(out, doc.metadata);
      for (const float v : slot_vector(slot)) out.f32(v);
    }
    write_payload(out);
  }
  const std::uint64_t checksum = fnv1a64(out.bytes());
  out.u64(checksum);

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw StorageError("cannot open '" + tmp.string() + "' for writing");
    file.write(out.bytes().data(), static_cast<std::streamsize>(out.bytes().size()));
    file.flush();
    if (!file) throw StorageError("failed writing snapshot '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw StorageError("cannot move snapshot into place: " + ec.message());
}

std::unique_ptr<VectorIndex> load_index(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw StorageError("cannot open snapshot '" + path.string() + "'");
  const std::string bytes{std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};

  constexpr std::size_t kHeader = 8 + 4;
  if (bytes.size() < kHeader + 8) throw SnapshotCorruptError("snapshot is empty or truncated");
  SnapshotReader header(bytes);
  if (header.raw(kSnapshotMagic.size()) != kSnapshotMagic) {
    throw SnapshotCorruptError("not an index snapshot (bad magic bytes)");
  }
  const std::uint32_t version = header.u32();
  if (version != kSnapshotFormatVersion) throw SnapshotVersionError(version, kSnapshotFormatVersion);

  const std::string_view body(bytes.data(), bytes.size() - 8);
  SnapshotReader trailer(std::string_view(bytes).substr(bytes.size() - 8));
  if (trailer.u64() != fnv1a64(body)) throw SnapshotCorruptError("snapshot checksum mismatch");

  SnapshotReader in(body.substr(kHeader));
  const std::uint32_t dim = in.u32();
  std::unique_ptr<VectorIndex> index;
  switch (in.u8()) {
    case 0: index = std::make_unique<FlatIndex>(dim); break;
    case 1: index = std::make_unique<HnswIndex>(HnswParams{}, dim); break;
    case 2: index = std::make_unique<IvfIndex>(); break;
    default: throw SnapshotCorruptError("unknown index kind in snapshot");
  }
  index->dim_ = dim;

  const std::size_t slots = in.count(1 + 4 + 4 + 4 + 4 * std::size_t{dim});
  index->docs_.reserve(slots);
  for (std::size_t slot = 0; slot < slots; ++slot) {
    const std::uint8_t alive = in.u8();
    std::string id = in.str();
    std::string text = in.str();
    Metadata meta = read_metadata(in);
    std::vector<float> values(dim);
    for (auto& v : values) v = in.f32();
    if (alive > 1) throw SnapshotCorruptError("bad liveness flag");
    if (alive && !index->ids_.emplace(id, static_cast<std::uint32_t>(slot)).second) {
      throw SnapshotCorruptError("duplicate live document id '" + id + "'");
    }
    index->alive_.push_back(alive);
    index->data_.insert(index->data_.end(), values.begin(), values.end());
    try {
      index->docs_.push_back(Document{std::move(id), std::move(text), std::move(meta),
                                      Vector(std::move(values))});
    } catch (const InvalidArgumentError& e) {
      throw SnapshotCorruptError(std::string("invalid stored vector: ") + e.what());
    }
  }
  index->read_payload(in);
  if (in.remaining() != 0) throw SnapshotCorruptError("trailing bytes after snapshot payload");
  return index;
}

}  // namespace contextdb
