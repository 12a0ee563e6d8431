#pragma once

#include <cstddef>
#include <cstdint>
#include <list>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

namespace contextdb {

inline constexpr std::size_t kDefaultCacheCapacity = 1024;
inline constexpr std::int64_t kDefaultCacheTtlMs = 5 * 60 * 1000;

/// Trimmed, lowercased, internal whitespace runs collapsed to one space.
std::string canonicalize_question(std::string_view question);

/// Stable fingerprint of (user_id, canonical question), as 16 hex digits.
std::string make_cache_key(std::string_view user_id, std::string_view question);

/// In-memory TTL + LRU cache for final responses.
///
/// Time is always passed in by the caller. An entry is served only while
/// now < inserted_at + ttl. When a new key arrives at capacity, expired
/// entries are purged first; if none expired, the least recently accessed
/// entry is evicted. Thread-safe.
class ResponseCache {
 public:
  explicit ResponseCache(std::size_t capacity = kDefaultCacheCapacity,
                         std::int64_t default_ttl_ms = kDefaultCacheTtlMs);

  std::optional<std::string> get(const std::string& key, std::int64_t now);
  void put(const std::string& key, std::string value, std::int64_t ttl_ms, std::int64_t now);
  void put(const std::string& key, std::string value, std::int64_t now) {
    put(key, std::move(value), default_ttl_ms_, now);
  }

  std::size_t size() const;
  std::size_t capacity() const noexcept { return capacity_; }
  std::int64_t default_ttl_ms() const noexcept { return default_ttl_ms_; }

 private:
  struct Entry {
    std::string key;
    std::string value;
    std::int64_t inserted_at;
    std::int64_t ttl;
    std::int64_t last_access;
    bool expired(std::int64_t now) const noexcept { return now >= inserted_at + ttl; }
  };
  using Lru = std::list<Entry>;  // front = most recently accessed

  std::size_t capacity_;
  std::int64_t default_ttl_ms_;
  mutable std::mutex mutex_;
  Lru lru_;
  std::unordered_map<std::string, Lru::iterator> map_;
};

}  // namespace contextdb
