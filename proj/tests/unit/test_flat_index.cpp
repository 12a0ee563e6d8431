#include <gtest/gtest.h>

#include <set>
#include <thread>

#include "contextdb/core/embedding.hpp"
#include "contextdb/core/error.hpp"
#include "contextdb/core/shoe_fixture.hpp"
#include "contextdb/index/flat_index.hpp"
#include "test_support.hpp"

using namespace contextdb;
using testkit::brute_force_knn;
using testkit::make_doc;
using testkit::TestRng;

namespace {

std::unique_ptr<FlatIndex> shoe_index() {
  auto index = std::make_unique<FlatIndex>();
  for (auto& d : fixture::shoe_documents()) index->insert(std::move(d));
  return index;
}

void expect_well_formed(const std::vector<SearchHit>& hits) {
  for (std::size_t i = 0; i < hits.size(); ++i) {
    EXPECT_EQ(hits[i].rank, i + 1);
    EXPECT_GE(hits[i].distance, 0.0);
    if (i > 0) {
      EXPECT_LE(hits[i - 1].distance, hits[i].distance);
      if (hits[i - 1].distance == hits[i].distance) {
        EXPECT_LT(hits[i - 1].doc_id, hits[i].doc_id);
      }
    }
  }
}

}  // namespace

TEST(FlatIndexTest, ShoeRanking) {
  const auto index = shoe_index();
  const auto hits = index->search(Vector{3.0F, 2.7F}, 4);
  ASSERT_EQ(hits.size(), 4U);
  const std::vector<std::pair<std::string, double>> expected{
      {"reebok-floatride", 0.22}, {"asics-gel-kayano", 0.58},
      {"adidas-ultraboost", 1.12}, {"nike-zoomx", 1.97}};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(hits[i].doc_id, expected[i].first);
    EXPECT_NEAR(hits[i].distance, expected[i].second, 0.005);
  }
  expect_well_formed(hits);
}

TEST(FlatIndexTest, FilteredShoeSearch) {
  const auto index = shoe_index();
  const auto hits = index->search_filtered(Vector{3.0F, 2.7F}, 1, FilterExpr::parse("price<100"));
  ASSERT_EQ(hits.size(), 1U);
  EXPECT_EQ(hits[0].doc_id, "reebok-floatride");
  EXPECT_NEAR(hits[0].distance, 0.22, 0.005);
  EXPECT_TRUE(
      index->search_filtered(Vector{3.0F, 2.7F}, 4, FilterExpr::parse("price<0")).empty());
}

TEST(FlatIndexTest, KClampsToDocumentCount) {
  EXPECT_EQ(shoe_index()->search(Vector{3.0F, 2.7F}, 10).size(), 4U);
}

TEST(FlatIndexTest, ExactMatchAtDistanceZero) {
  const auto hits = shoe_index()->search(Vector{2.5F, 3.0F}, 1);
  EXPECT_EQ(hits[0].doc_id, "asics-gel-kayano");
  EXPECT_EQ(hits[0].distance, 0.0);
}

TEST(FlatIndexTest, Errors) {
  FlatIndex index;
  EXPECT_THROW(index.search(Vector{1.0F, 2.0F}, 1), IndexStateError);
  index.insert(make_doc("a", {1.0F, 2.0F}));
  EXPECT_THROW(index.insert(make_doc("b", {1.0F, 2.0F, 3.0F})), DimensionMismatchError);
  EXPECT_THROW(index.search(Vector{1.0F}, 1), DimensionMismatchError);
  EXPECT_THROW(index.search(Vector{1.0F, 2.0F}, 0), InvalidArgumentError);
  index.insert(make_doc("c", {1.0F, 2.0F}, {{"x", 1}}));
  EXPECT_THROW(index.search_filtered(Vector{1.0F, 2.0F}, 1, FilterExpr::parse("x=\"s\"")),
               FilterTypeError);
}

TEST(FlatIndexTest, ReplaceKeepsOneCopyAtNewDistance) {
  FlatIndex index;
  index.insert(make_doc("x", {0.0F, 0.0F}, {{"v", 1}}));
  index.insert(make_doc("y", {5.0F, 5.0F}));
  index.insert(make_doc("x", {3.0F, 4.0F}, {{"v", 2}}));
  EXPECT_EQ(index.size(), 2U);
  const auto hits = index.search(Vector{0.0F, 0.0F}, 10);
  ASSERT_EQ(hits.size(), 2U);
  EXPECT_EQ(hits[0].doc_id, "x");
  EXPECT_DOUBLE_EQ(hits[0].distance, 5.0);
  EXPECT_EQ(index.get("x")->metadata.at("v"), MetaValue(2));
}

TEST(FlatIndexTest, RemoveHidesDocument) {
  auto index = shoe_index();
  EXPECT_TRUE(index->remove("reebok-floatride"));
  EXPECT_FALSE(index->remove("reebok-floatride"));
  EXPECT_FALSE(index->remove("never-there"));
  EXPECT_EQ(index->size(), 3U);
  for (const auto& h : index->search(Vector{3.0F, 2.7F}, 10)) {
    EXPECT_NE(h.doc_id, "reebok-floatride");
  }
  EXPECT_FALSE(index->get("reebok-floatride").has_value());
}

TEST(FlatIndexTest, InsertHundredRemoveFiftyLeavesSurvivors) {
  TestRng rng(21);
  FlatIndex index;
  std::set<std::string> survivors;
  for (int i = 0; i < 100; ++i) {
    const std::string id = "d" + std::to_string(i);
    index.insert(make_doc(id, rng.vec(8)));
    survivors.insert(id);
  }
  for (int i = 0; i < 100; i += 2) {
    const std::string id = "d" + std::to_string(i);
    ASSERT_TRUE(index.remove(id));
    survivors.erase(id);
  }
  std::set<std::string> got;
  for (const auto& h : index.search(Vector(rng.vec(8)), 100)) got.insert(h.doc_id);
  EXPECT_EQ(got, survivors);
}

TEST(FlatIndexProperty, MatchesBruteForceOracle) {
  TestRng rng(22);
  std::vector<Document> docs;
  FlatIndex index;
  for (int i = 0; i < 1000; ++i) {
    docs.push_back(make_doc("doc-" + std::to_string(i), rng.vec(16)));
    index.insert(docs.back());
  }
  for (int q = 0; q < 100; ++q) {
    const auto query = rng.vec(16);
    const std::size_t k = 1 + rng.index(20);
    const auto hits = index.search(Vector(query), k);
    const auto oracle = brute_force_knn(docs, query, k);
    ASSERT_EQ(hits.size(), oracle.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
      ASSERT_EQ(hits[i].doc_id, oracle[i].id);
      ASSERT_NEAR(hits[i].distance, oracle[i].distance, 1e-6);
    }
    expect_well_formed(hits);
  }
}

TEST(FlatIndexProperty, TiesBreakByDocId) {
  FlatIndex index;
  for (const char* id : {"m", "c", "x", "a"}) index.insert(make_doc(id, {1.0F, 0.0F}));
  const auto hits = index.search(Vector{0.0F, 0.0F}, 4);
  ASSERT_EQ(hits.size(), 4U);
  EXPECT_EQ(hits[0].doc_id, "a");
  EXPECT_EQ(hits[1].doc_id, "c");
  EXPECT_EQ(hits[2].doc_id, "m");
  EXPECT_EQ(hits[3].doc_id, "x");
}

TEST(FlatIndexProperty, FilteredMatchesFilterThenKnn) {
  TestRng rng(23);
  std::vector<Document> docs;
  FlatIndex index;
  const std::vector<std::string> brands{"Nike", "Adidas", "Reebok", "ASICS"};
  for (int i = 0; i < 500; ++i) {
    Metadata meta{{"price", static_cast<double>(static_cast<int>(rng.uniform(20, 200)))},
                  {"brand", brands[rng.index(brands.size())]},
                  {"in_stock", rng.coin()}};
    if (rng.index(10) == 0) meta.erase("price");
    docs.push_back(make_doc("p" + std::to_string(i), rng.vec(8), meta));
    index.insert(docs.back());
  }
  for (int trial = 0; trial < 200; ++trial) {
    const double bound = static_cast<int>(rng.uniform(20, 200));
    const std::string brand = brands[rng.index(brands.size())];
    const bool stock = rng.coin();
    FilterExpr filter;
    std::function<bool(const Document&)> keep;
    switch (trial % 3) {
      case 0:
        filter = FilterExpr::parse("price<" + std::to_string(static_cast<int>(bound)));
        keep = [&](const Document& d) {
          const auto it = d.metadata.find("price");
          return it != d.metadata.end() && it->second.as_number() < bound;
        };
        break;
      case 1:
        filter = FilterExpr::parse("brand=\"" + brand + "\" && price>=" +
                                   std::to_string(static_cast<int>(bound)));
        keep = [&](const Document& d) {
          const auto p = d.metadata.find("price");
          return d.metadata.at("brand").as_string() == brand && p != d.metadata.end() &&
                 p->second.as_number() >= bound;
        };
        break;
      default:
        filter = FilterExpr::parse(std::string("in_stock=") + (stock ? "true" : "false"));
        keep = [&](const Document& d) { return d.metadata.at("in_stock").as_bool() == stock; };
    }
    const auto query = rng.vec(8);
    const std::size_t k = 1 + rng.index(15);
    const auto hits = index.search_filtered(Vector(query), k, filter);
    const auto oracle = brute_force_knn(docs, query, k, keep);
    ASSERT_EQ(hits.size(), oracle.size()) << filter.to_string();
    for (std::size_t i = 0; i < hits.size(); ++i) {
      ASSERT_EQ(hits[i].doc_id, oracle[i].id);
      ASSERT_NEAR(hits[i].distance, oracle[i].distance, 1e-6);
    }
  }
}

TEST(FlatIndexConcurrency, ReadersSeeWholeMutations) {
  FlatIndex index;
  for (int i = 0; i < 50; ++i) index.insert(make_doc("base" + std::to_string(i), {float(i), 0.0F}));
  std::atomic<bool> stop{false};
  std::atomic<int> bad{0};
  std::thread writer([&] {
    for (int i = 0; i < 500; ++i) {
      index.insert(make_doc("w", {float(i % 7), 1.0F}));
      if (i % 3 == 0) index.remove("w");
    }
    stop = true;
  });
  std::vector<std::thread> readers;
  for (int r = 0; r < 3; ++r) {
    readers.emplace_back([&] {
      while (!stop) {
        const auto hits = index.search(Vector{3.0F, 0.5F}, 60);
        std::set<std::string> ids;
        for (const auto& h : hits) ids.insert(h.doc_id);
        if (ids.size() != hits.size() || hits.size() < 50) ++bad;
      }
    });
  }
  writer.join();
  for (auto& t : readers) t.join();
  EXPECT_EQ(bad.load(), 0);
}
