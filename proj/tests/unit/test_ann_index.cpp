#include <gtest/gtest.h>

#include <set>
#include <unordered_set>

#include "contextdb/core/embedding.hpp"
#include "contextdb/core/error.hpp"
#include "contextdb/core/random.hpp"
#include "contextdb/index/flat_index.hpp"
#include "contextdb/index/hnsw_index.hpp"
#include "contextdb/index/ivf_index.hpp"
#include "test_support.hpp"

using namespace contextdb;
using testkit::brute_force_knn;
using testkit::make_doc;
using testkit::TestRng;

namespace {

struct Dataset {
  std::vector<Document> docs;
  std::vector<Vector> vectors;
  std::vector<std::vector<float>> queries;
};

Dataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t dim, std::size_t queries,
                       bool unit = false) {
  TestRng rng(seed);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = unit ? rng.unit_vec(dim) : rng.vec(dim);
    d.vectors.emplace_back(v);
    d.docs.push_back(make_doc("v" + std::to_string(i), std::move(v),
                              {{"bucket", static_cast<double>(i % 10)}, {"even", i % 2 == 0}}));
  }
  for (std::size_t q = 0; q < queries; ++q) d.queries.push_back(unit ? rng.unit_vec(dim) : rng.vec(dim));
  return d;
}

double recall_at(const VectorIndex& index, const Dataset& d, std::size_t k) {
  double total = 0.0;
  for (const auto& q : d.queries) {
    std::unordered_set<std::string> truth;
    for (const auto& h : brute_force_knn(d.docs, q, k)) truth.insert(h.id);
    std::size_t found = 0;
    for (const auto& h : index.search(Vector(q), k)) found += truth.count(h.doc_id);
    total += static_cast<double>(found) / static_cast<double>(k);
  }
  return total / static_cast<double>(d.queries.size());
}

}  // namespace

// --- HNSW ------------------------------------------------------------------

TEST(HnswTest, RejectsBadParams) {
  EXPECT_THROW(HnswIndex(HnswParams{1, 200, 64, 42}), InvalidArgumentError);
  EXPECT_THROW(HnswIndex(HnswParams{16, 0, 64, 42}), InvalidArgumentError);
  EXPECT_THROW(HnswIndex(HnswParams{16, 200, 0, 42}), InvalidArgumentError);
  HnswIndex index;
  EXPECT_THROW(index.set_ef_search(0), InvalidArgumentError);
  EXPECT_THROW(index.search(Vector{1.0F}, 1), IndexStateError);
}

TEST(HnswTest, SmallSetIsExact) {
  const auto d = random_dataset(31, 60, 4, 20);
  HnswIndex index;
  for (const auto& doc : d.docs) index.insert(doc);
  for (const auto& q : d.queries) {
    const auto hits = index.search(Vector(q), 5);
    const auto oracle = brute_force_knn(d.docs, q, 5);
    ASSERT_EQ(hits.size(), 5U);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(hits[i].doc_id, oracle[i].id);
  }
}

TEST(HnswTest, KAboveEfSearchStillReturnsK) {
  const auto d = random_dataset(32, 300, 8, 5);
  HnswIndex index(HnswParams{8, 40, 4, 1});
  for (const auto& doc : d.docs) index.insert(doc);
  for (const auto& q : d.queries) EXPECT_EQ(index.search(Vector(q), 50).size(), 50U);
}

TEST(HnswTest, LinkCountsBounded) {
  const auto d = random_dataset(33, 800, 8, 0);
  HnswParams p;
  p.m = 6;
  HnswIndex index(p);
  for (const auto& doc : d.docs) index.insert(doc);
  for (const auto& links : index.base_layer()) {
    EXPECT_LE(links.size(), 2 * p.m);
    EXPECT_FALSE(links.empty());
  }
  EXPECT_GT(index.max_level(), 0);
}

TEST(HnswTest, DeterministicForFixedSeed) {
  const auto d = random_dataset(34, 1000, 16, 30);
  HnswParams p;
  p.seed = 7;
  HnswIndex a(p), b(p);
  for (const auto& doc : d.docs) {
    a.insert(doc);
    b.insert(doc);
  }
  EXPECT_EQ(a.base_layer(), b.base_layer());
  EXPECT_EQ(a.max_level(), b.max_level());
  for (const auto& q : d.queries) EXPECT_EQ(a.search(Vector(q), 10), b.search(Vector(q), 10));
}

TEST(HnswTest, RemovedNeverReturnedAndCountsHold) {
  const auto d = random_dataset(35, 500, 8, 20);
  HnswIndex index;
  for (const auto& doc : d.docs) index.insert(doc);
  std::set<std::string> removed;
  for (std::size_t i = 0; i < 500; i += 3) {
    index.remove(d.docs[i].id);
    removed.insert(d.docs[i].id);
  }
  for (const auto& q : d.queries) {
    const auto hits = index.search(Vector(q), 20);
    EXPECT_EQ(hits.size(), 20U);
    for (const auto& h : hits) EXPECT_EQ(removed.count(h.doc_id), 0U);
  }
  // Leave only d497 and d499 (d498 went in the first pass).
  for (std::size_t i = 0; i < 497; ++i) index.remove(d.docs[i].id);
  EXPECT_EQ(index.size(), 2U);
  for (const auto& q : d.queries) {
    const auto hits = index.search(Vector(q), 10);
    ASSERT_EQ(hits.size(), 2U);
    EXPECT_EQ(std::set<std::string>({hits[0].doc_id, hits[1].doc_id}),
              std::set<std::string>({d.docs[497].id, d.docs[499].id}));
  }
}

TEST(HnswTest, FilteredSearchOnlyReturnsMatches) {
  const auto d = random_dataset(36, 2000, 16, 30);
  HnswIndex index;
  for (const auto& doc : d.docs) index.insert(doc);
  const auto filter = FilterExpr::parse("bucket=3");
  std::size_t total_overlap = 0;
  for (const auto& q : d.queries) {
    const auto hits = index.search_filtered(Vector(q), 10, filter);
    EXPECT_EQ(hits.size(), 10U);
    for (const auto& h : hits) EXPECT_EQ(index.get(h.doc_id)->metadata.at("bucket"), MetaValue(3));
    const auto oracle = brute_force_knn(d.docs, q, 10, [](const Document& doc) {
      return doc.metadata.at("bucket") == MetaValue(3);
    });
    std::unordered_set<std::string> truth;
    for (const auto& o : oracle) truth.insert(o.id);
    for (const auto& h : hits) total_overlap += truth.count(h.doc_id);
  }
  // Filtered recall against the filter-then-exact oracle.
  EXPECT_GE(static_cast<double>(total_overlap) / (10.0 * 30), 0.9);
}

TEST(HnswTest, RareFilterRetriesWiden) {
  const auto d = random_dataset(37, 1000, 8, 5);
  HnswIndex index;
  for (const auto& doc : d.docs) index.insert(doc);
  index.insert(make_doc("needle", TestRng(99).vec(8), {{"rare", true}}));
  for (const auto& q : d.queries) {
    const auto hits = index.search_filtered(Vector(q), 1, FilterExpr::parse("rare=true"));
    // The oversampling budget is bounded; a short list is allowed but never a wrong one.
    for (const auto& h : hits) EXPECT_EQ(h.doc_id, "needle");
  }
}

TEST(HnswProperty, RecallRisesWithEfSearch) {
  // Same shape as the 10k benchmark: 10,000 unit vectors, dim 64, default params.
  const auto d = random_dataset(38, 10000, 64, 100, true);
  HnswIndex index;
  for (const auto& doc : d.docs) index.insert(doc);
  double previous = 0.0;
  for (const std::size_t ef : {16, 64, 256}) {
    index.set_ef_search(ef);
    const double r = recall_at(index, d, 10);
    EXPECT_GE(r, previous) << "ef_search=" << ef;
    previous = r;
  }
  EXPECT_GT(previous, 0.95);
}

TEST(HnswProperty, LevelsAreGeometric) {
  const auto d = random_dataset(39, 4000, 2, 0);
  HnswParams p;
  p.m = 4;
  HnswIndex index(p);
  for (const auto& doc : d.docs) index.insert(doc);
  // With multiplier 1/ln(4) the expected top level for 4000 nodes is ~log4(4000) ≈ 6.
  EXPECT_GE(index.max_level(), 3);
  EXPECT_LE(index.max_level(), 12);
}

// --- IVF -------------------------------------------------------------------

TEST(IvfTest, StateErrors) {
  IvfIndex index;
  EXPECT_FALSE(index.trained());
  EXPECT_THROW(index.insert(make_doc("a", {1.0F, 2.0F})), IndexStateError);
  EXPECT_THROW(index.search(Vector{1.0F, 2.0F}, 1), IndexStateError);
}

TEST(IvfTest, TooFewTrainingVectors) {
  const auto d = random_dataset(41, 5, 4, 0);
  IvfParams p;
  p.nlist = 16;
  p.nprobe = 4;
  IvfIndex index(p);
  try {
    index.train(d.vectors);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_EQ(e.required(), 16U);
    EXPECT_EQ(e.provided(), 5U);
  }
}

TEST(IvfTest, ParamValidation) {
  EXPECT_THROW(IvfIndex(IvfParams{4, 5, 20, 1}), InvalidArgumentError);
  EXPECT_THROW(IvfIndex(IvfParams{4, 0, 20, 1}), InvalidArgumentError);
  EXPECT_THROW(IvfIndex(IvfParams{4, 2, 0, 1}), InvalidArgumentError);
  IvfIndex index(IvfParams{4, 2, 20, 1});
  EXPECT_THROW(index.set_nprobe(5), InvalidArgumentError);
}

TEST(IvfTest, AutoNlistIsCeilSqrt) {
  const auto d = random_dataset(42, 1000, 8, 0);
  IvfIndex index;
  index.train(d.vectors);
  EXPECT_EQ(index.params().nlist, 32U);
  EXPECT_EQ(index.centroids().size(), 32U);
  EXPECT_EQ(index.params().nprobe, 8U);
}

TEST(IvfTest, SingleListEqualsFlat) {
  const auto d = random_dataset(43, 300, 8, 30);
  IvfIndex ivf(IvfParams{1, 1, 20, 1});
  ivf.train(d.vectors);
  FlatIndex flat;
  for (const auto& doc : d.docs) {
    ivf.insert(doc);
    flat.insert(doc);
  }
  EXPECT_EQ(ivf.list_sizes(), std::vector<std::size_t>{300});
  for (const auto& q : d.queries) EXPECT_EQ(ivf.search(Vector(q), 7), flat.search(Vector(q), 7));
}

TEST(IvfProperty, FullProbeEqualsFlat) {
  const auto d = random_dataset(44, 1000, 16, 100);
  IvfIndex ivf(IvfParams{16, 16, 20, 3});
  ivf.train(d.vectors);
  FlatIndex flat;
  for (const auto& doc : d.docs) {
    ivf.insert(doc);
    flat.insert(doc);
  }
  for (const auto& q : d.queries) {
    ASSERT_EQ(ivf.search(Vector(q), 10), flat.search(Vector(q), 10));
    const auto filter = FilterExpr::parse("even=true");
    ASSERT_EQ(ivf.search_filtered(Vector(q), 10, filter), flat.search_filtered(Vector(q), 10, filter));
  }
}

TEST(IvfProperty, RecallMonotoneInNprobe) {
  const auto d = random_dataset(45, 2000, 16, 100);
  IvfIndex ivf(IvfParams{20, 1, 20, 5});
  ivf.train(d.vectors);
  for (const auto& doc : d.docs) ivf.insert(doc);
  double previous = 0.0;
  for (std::size_t nprobe = 1; nprobe <= 20; ++nprobe) {
    ivf.set_nprobe(nprobe);
    const double r = recall_at(ivf, d, 10);
    EXPECT_GE(r, previous) << "nprobe=" << nprobe;
    previous = r;
  }
  EXPECT_DOUBLE_EQ(previous, 1.0);
}

TEST(IvfProperty, ListsPartitionLiveDocuments) {
  const auto d = random_dataset(46, 500, 8, 0);
  IvfIndex ivf(IvfParams{10, 2, 20, 9});
  ivf.train(d.vectors);
  for (const auto& doc : d.docs) ivf.insert(doc);
  for (std::size_t i = 0; i < 100; ++i) ivf.remove(d.docs[i].id);
  ivf.insert(make_doc(d.docs[200].id, std::vector<float>(8, 0.25F)));  // replace
  std::size_t total = 0;
  for (const auto s : ivf.list_sizes()) total += s;
  EXPECT_EQ(total, ivf.size());
  EXPECT_EQ(total, 400U);
}

TEST(IvfProperty, DeterministicCentroids) {
  const auto d = random_dataset(47, 800, 8, 0);
  IvfIndex a(IvfParams{12, 3, 20, 11}), b(IvfParams{12, 3, 20, 11});
  a.train(d.vectors);
  b.train(d.vectors);
  EXPECT_EQ(a.centroids(), b.centroids());
}

TEST(IvfProperty, RetrainReroutesExistingDocuments) {
  const auto d = random_dataset(48, 400, 8, 20);
  IvfIndex ivf(IvfParams{4, 4, 20, 1});
  ivf.train(d.vectors);
  for (const auto& doc : d.docs) ivf.insert(doc);
  ivf.train(d.vectors, IvfParams{8, 8, 20, 2});
  EXPECT_EQ(ivf.centroids().size(), 8U);
  FlatIndex flat;
  for (const auto& doc : d.docs) flat.insert(doc);
  for (const auto& q : d.queries) EXPECT_EQ(ivf.search(Vector(q), 5), flat.search(Vector(q), 5));
}

TEST(KmeansTest, SeparatedClustersRecovered) {
  TestRng rng(49);
  std::vector<Vector> pts;
  const std::vector<std::pair<float, float>> centers{{0, 0}, {10, 10}, {-10, 10}};
  for (const auto& [cx, cy] : centers) {
    for (int i = 0; i < 50; ++i) {
      pts.push_back(Vector{cx + static_cast<float>(rng.uniform(-0.5, 0.5)),
                           cy + static_cast<float>(rng.uniform(-0.5, 0.5))});
    }
  }
  const auto flat = kmeans(pts, 3, 50, 4);
  ASSERT_EQ(flat.size(), 6U);
  for (const auto& [cx, cy] : centers) {
    bool near = false;
    for (std::size_t c = 0; c < 3; ++c) {
      near = near || (std::abs(flat[2 * c] - cx) < 0.5F && std::abs(flat[2 * c + 1] - cy) < 0.5F);
    }
    EXPECT_TRUE(near) << cx << "," << cy;
  }
}

TEST(KmeansTest, DuplicatePointsDoNotLeaveEmptyCentroidsNaN) {
  std::vector<Vector> pts(20, Vector{1.0F, 1.0F});
  pts.push_back(Vector{5.0F, 5.0F});
  const auto c = kmeans(pts, 4, 10, 1);
  for (const float v : c) EXPECT_TRUE(std::isfinite(v));
}
