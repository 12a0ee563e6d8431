#pragma once

// Shared helpers for unit and acceptance tests. Oracles here are written
// independently of the library: their own RNG, their own distance loop,
// their own cache bookkeeping.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contextdb/core/document.hpp"
#include "contextdb/core/error.hpp"
#include "contextdb/store/jsonl_log.hpp"

namespace contextdb::testkit {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "contextdb-test-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// splitmix64 stream; deliberately unrelated to the library's Rng.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  bool coin() { return (next() & 1U) != 0; }

  std::vector<float> vec(std::size_t dim, double lo = -1.0, double hi = 1.0) {
    std::vector<float> v(dim);
    for (auto& x : v) x = static_cast<float>(uniform(lo, hi));
    return v;
  }
  std::vector<float> unit_vec(std::size_t dim) {
    for (;;) {
      auto v = vec(dim);
      double n = 0.0;
      for (const float x : v) n += static_cast<double>(x) * x;
      if (n < 1e-12) continue;
      n = std::sqrt(n);
      for (auto& x : v) x = static_cast<float>(x / n);
      return v;
    }
  }
  std::string word(std::size_t min_len, std::size_t max_len,
                   std::string_view alphabet = "abcdefghijklmnopqrstuvwxyz") {
    const std::size_t len = min_len + index(max_len - min_len + 1);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[index(alphabet.size())];
    return s;
  }

 private:
  std::uint64_t state_;
};

struct OracleHit {
  std::string id;
  double distance;
};

/// Straightforward O(N log N) exact k-NN: long double accumulation, full
/// sort by (distance, id).
inline std::vector<OracleHit> brute_force_knn(
    const std::vector<Document>& docs, const std::vector<float>& query, std::size_t k,
    const std::function<bool(const Document&)>& keep = nullptr) {
  std::vector<OracleHit> all;
  for (const auto& d : docs) {
    if (keep && !keep(d)) continue;
    long double sum = 0.0L;
    const auto v = d.embedding.values();
    for (std::size_t i = 0; i < query.size(); ++i) {
      const long double diff = static_cast<long double>(v[i]) - query[i];
      sum += diff * diff;
    }
    all.push_back({d.id, static_cast<double>(std::sqrt(sum))});
  }
  std::sort(all.begin(), all.end(), [](const OracleHit& a, const OracleHit& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

/// In-memory LogSink that can be told to fail. Shares its lines with the
/// test so "reopen" can be simulated by building a new sink over them.
class MemorySink final : public LogSink {
 public:
  explicit MemorySink(std::vector<std::string>* lines) : lines_(lines) {}

  std::vector<std::string> recover(const std::function<bool(std::string_view)>& valid) override {
    std::vector<std::string> out;
    for (const auto& l : *lines_) {
      if (!valid(l)) throw StorageError("invalid record in memory sink");
      out.push_back(l);
    }
    return out;
  }

  void append(std::string_view lines) override {
    if (fail_) throw StorageError("injected write failure");
    std::size_t start = 0;
    while (start < lines.size()) {
      const auto nl = lines.find('\n', start);
      lines_->emplace_back(lines.substr(start, nl - start));
      start = nl + 1;
    }
  }

  void set_failing(bool fail) noexcept { fail_ = fail; }

 private:
  std::vector<std::string>* lines_;
  bool fail_ = false;
};

/// Plain-map model of the response cache contract. Recency is a logical
/// operation counter so equal timestamps still order deterministically.
class CacheSimulator {
 public:
  explicit CacheSimulator(std::size_t capacity) : capacity_(capacity) {}

  std::optional<std::string> get(const std::string& key, std::int64_t now) {
    ++tick_;
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    if (now >= it->second.inserted_at + it->second.ttl) {
      entries_.erase(it);
      return std::nullopt;
    }
    it->second.recency = tick_;
    return it->second.value;
  }

  void put(const std::string& key, const std::string& value, std::int64_t ttl, std::int64_t now) {
    ++tick_;
    if (entries_.count(key) == 0 && entries_.size() >= capacity_) {
      for (auto it = entries_.begin(); it != entries_.end();) {
        it = now >= it->second.inserted_at + it->second.ttl ? entries_.erase(it) : std::next(it);
      }
      if (entries_.size() >= capacity_) {
        auto victim = entries_.begin();
        for (auto it = entries_.begin(); it != entries_.end(); ++it) {
          if (it->second.recency < victim->second.recency) victim = it;
        }
        entries_.erase(victim);
      }
    }
    entries_[key] = Entry{value, now, ttl, tick_};
  }

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  struct Entry {
    std::string value;
    std::int64_t inserted_at;
    std::int64_t ttl;
    std::uint64_t recency;
  };
  std::size_t capacity_;
  std::uint64_t tick_ = 0;
  std::map<std::string, Entry> entries_;
};

inline Document make_doc(std::string id, std::vector<float> values, Metadata meta = {},
                         std::string text = {}) {
  return Document{std::move(id), std::move(text), std::move(meta), Vector(std::move(values))};
}

}  // namespace contextdb::testkit
