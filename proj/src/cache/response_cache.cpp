#include "contextdb/cache/response_cache.hpp"

#include <cctype>
#include <cstdio>

#include "contextdb/core/error.hpp"
#include "contextdb/core/random.hpp"

namespace contextdb {

std::string canonicalize_question(std::string_view question) {
  std::string out;
  out.reserve(question.size());
  bool pending_space = false;
  for (const char raw : question) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

std::string make_cache_key(std::string_view user_id, std::string_view question) {
  std::string material(user_id);
  material += '\0';
  material += canonicalize_question(question);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(material)));
  return buf;
}

ResponseCache::ResponseCache(std::size_t capacity, std::int64_t default_ttl_ms)
    : capacity_(capacity), default_ttl_ms_(default_ttl_ms) {
  if (capacity_ == 0) throw InvalidArgumentError("cache capacity must be positive");
  if (default_ttl_ms_ <= 0) throw InvalidArgumentError("cache TTL must be positive");
}

std::optional<std::string> ResponseCache::get(const std::string& key, std::int64_t now) {
  std::lock_guard lock(mutex_);
  const auto it = map_.find(key);
  if (it == map_.end()) return std::nullopt;
  if (it->second->expired(now)) {
    lru_.erase(it->second);
    map_.erase(it);
    return std::nullopt;
  }
  it->second->last_access = now;
  lru_.splice(lru_.begin(), lru_, it->second);
  return it->second->value;
}

void ResponseCache::put(const std::string& key, std::string value, std::int64_t ttl_ms,
                        std::int64_t now) {
  if (ttl_ms <= 0) throw InvalidArgumentError("cache TTL must be positive");
  std::lock_guard lock(mutex_);
  if (const auto it = map_.find(key); it != map_.end()) {
    Entry& e = *it->second;
    e.value = std::move(value);
    e.inserted_at = now;
    e.ttl = ttl_ms;
    e.last_access = now;
    lru_.splice(lru_.begin(), lru_, it->second);
    return;
  }

  if (map_.size() >= capacity_) {
    for (auto it = lru_.begin(); it != lru_.end();) {
      if (it->expired(now)) {
        map_.erase(it->key);
        it = lru_.erase(it);
      } else {
        ++it;
      }
    }
    if (map_.size() >= capacity_) {
      map_.erase(lru_.back().key);
      lru_.pop_back();
    }
  }
  lru_.push_front(Entry{key, std::move(value), now, ttl_ms, now});
  map_.emplace(key, lru_.begin());
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return map_.size();
}

}  // namespace contextdb
