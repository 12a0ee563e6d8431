#include <gtest/gtest.h>

#include <set>
#include <thread>

#include "contextdb/cache/response_cache.hpp"
#include "contextdb/core/error.hpp"
#include "test_support.hpp"

using namespace contextdb;
using testkit::CacheSimulator;
using testkit::TestRng;

TEST(ResponseCacheTest, TtlBoundary) {
  ResponseCache cache(8, 1000);
  cache.put("k", "v", 0);
  EXPECT_EQ(cache.get("k", 500), "v");
  EXPECT_EQ(cache.get("k", 999), "v");
  EXPECT_FALSE(cache.get("k", 1000).has_value());
  EXPECT_EQ(cache.size(), 0U);

  cache.put("k", "v", 0);
  EXPECT_FALSE(cache.get("k", 1001).has_value());
}

TEST(ResponseCacheTest, LruEvictsLeastRecentlyAccessed) {
  ResponseCache cache(2, 100000);
  cache.put("a", "A", 1);
  cache.put("b", "B", 2);
  EXPECT_EQ(cache.get("a", 3), "A");
  cache.put("c", "C", 4);
  EXPECT_FALSE(cache.get("b", 5).has_value());
  EXPECT_EQ(cache.get("a", 5), "A");
  EXPECT_EQ(cache.get("c", 5), "C");
}

TEST(ResponseCacheTest, ExpiredEntriesGoBeforeLiveOnes) {
  ResponseCache cache(2, 100000);
  cache.put("old", "O", 10, 0);       // expires at 10
  cache.put("fresh", "F", 100000, 1);
  EXPECT_EQ(cache.get("old", 5), "O");  // old is now most recent
  cache.put("new", "N", 20);
  EXPECT_EQ(cache.get("fresh", 21), "F");
  EXPECT_EQ(cache.get("new", 21), "N");
  EXPECT_EQ(cache.size(), 2U);
}

TEST(ResponseCacheTest, OverwriteResetsTtl) {
  ResponseCache cache(4, 1000);
  cache.put("k", "v1", 0);
  cache.put("k", "v2", 900);
  EXPECT_EQ(cache.get("k", 1500), "v2");
  EXPECT_FALSE(cache.get("k", 1900).has_value());
  EXPECT_EQ(cache.size(), 0U);
}

TEST(ResponseCacheTest, PerEntryTtl) {
  ResponseCache cache(4, 1000);
  cache.put("short", "s", 10, 0);
  cache.put("long", "l", 5000, 0);
  EXPECT_FALSE(cache.get("short", 10).has_value());
  EXPECT_EQ(cache.get("long", 4999), "l");
}

TEST(ResponseCacheTest, InvalidArguments) {
  EXPECT_THROW(ResponseCache(0, 10), InvalidArgumentError);
  EXPECT_THROW(ResponseCache(1, 0), InvalidArgumentError);
  ResponseCache cache(1, 10);
  EXPECT_THROW(cache.put("k", "v", 0, 0), InvalidArgumentError);
  EXPECT_THROW(cache.put("k", "v", -5, 0), InvalidArgumentError);
}

TEST(ResponseCacheTest, DefaultsAndCapacityOne) {
  ResponseCache defaults;
  EXPECT_EQ(defaults.capacity(), 1024U);
  EXPECT_EQ(defaults.default_ttl_ms(), 300000);
  ResponseCache one(1, 100);
  one.put("a", "A", 0);
  one.put("b", "B", 1);
  EXPECT_FALSE(one.get("a", 2).has_value());
  EXPECT_EQ(one.get("b", 2), "B");
}

TEST(CacheKeyTest, Canonicalization) {
  EXPECT_EQ(canonicalize_question("  Shoes   UNDER\t$100 \n"), "shoes under $100");
  EXPECT_EQ(canonicalize_question(""), "");
  EXPECT_EQ(canonicalize_question(" \t\n"), "");
  EXPECT_EQ(make_cache_key("u", "Best  Shoes"), make_cache_key("u", " best shoes "));
  EXPECT_NE(make_cache_key("u", "best shoes"), make_cache_key("v", "best shoes"));
  EXPECT_NE(make_cache_key("u", "best shoes"), make_cache_key("u", "best shoe"));
  // The separator keeps user/question boundaries unambiguous.
  EXPECT_NE(make_cache_key("ab", "c"), make_cache_key("a", "bc"));
  const auto key = make_cache_key("u", "q");
  EXPECT_EQ(key.size(), 16U);
  EXPECT_EQ(key.find_first_not_of("0123456789abcdef"), std::string::npos);
}

TEST(CacheKeyProperty, CanonicalFormIsIdempotentAndSpaceFree) {
  TestRng rng(81);
  for (int i = 0; i < 1000; ++i) {
    const auto raw = rng.word(0, 30, "aBc \t\nXyZ!?");
    const auto c = canonicalize_question(raw);
    EXPECT_EQ(canonicalize_question(c), c);
    EXPECT_EQ(c.find("  "), std::string::npos);
    EXPECT_EQ(c.find_first_of("\t\nABCXYZ"), std::string::npos);
    if (!c.empty()) {
      EXPECT_NE(c.front(), ' ');
      EXPECT_NE(c.back(), ' ');
    }
  }
}

TEST(ResponseCacheProperty, MatchesSimulatorOverRandomTrace) {
  for (const std::uint64_t seed : {91ULL, 92ULL, 93ULL}) {
    TestRng rng(seed);
    const std::size_t capacity = 1 + rng.index(16);
    ResponseCache cache(capacity, 50);
    CacheSimulator sim(capacity);
    std::int64_t now = 0;
    for (int op = 0; op < 10000; ++op) {
      now += static_cast<std::int64_t>(rng.index(4));
      const std::string key = "k" + std::to_string(rng.index(24));
      if (rng.index(3) == 0) {
        const std::int64_t ttl = 1 + static_cast<std::int64_t>(rng.index(60));
        const std::string value = "v" + std::to_string(op);
        cache.put(key, value, ttl, now);
        sim.put(key, value, ttl, now);
      } else {
        ASSERT_EQ(cache.get(key, now), sim.get(key, now)) << "seed " << seed << " op " << op;
      }
      ASSERT_LE(cache.size(), capacity);
      ASSERT_EQ(cache.size(), sim.size()) << "seed " << seed << " op " << op;
    }
  }
}

TEST(ResponseCacheProperty, NeverServesExpiredData) {
  TestRng rng(94);
  ResponseCache cache(32, 100);
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> written;  // key -> (at, ttl)
  std::int64_t now = 0;
  for (int op = 0; op < 5000; ++op) {
    now += static_cast<std::int64_t>(rng.index(10));
    const std::string key = "k" + std::to_string(rng.index(64));
    if (rng.coin()) {
      const std::int64_t ttl = 1 + static_cast<std::int64_t>(rng.index(200));
      cache.put(key, "v", ttl, now);
      written[key] = {now, ttl};
    } else if (cache.get(key, now)) {
      const auto [at, ttl] = written.at(key);
      ASSERT_LT(now, at + ttl);
    }
  }
}

TEST(ResponseCacheConcurrency, ParallelAccessKeepsBound) {
  ResponseCache cache(64, 1000000);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&cache, t] {
      TestRng rng(static_cast<std::uint64_t>(100 + t));
      for (int i = 0; i < 5000; ++i) {
        const std::string key = "k" + std::to_string(rng.index(200));
        if (rng.coin()) {
          cache.put(key, key, i);
        } else if (const auto v = cache.get(key, i)) {
          ASSERT_EQ(*v, key);
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_LE(cache.size(), 64U);
}
