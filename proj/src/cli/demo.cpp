#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "contextdb/core/embedding.hpp"
#include "contextdb/core/shoe_fixture.hpp"
#include "contextdb/index/flat_index.hpp"

namespace contextdb::cli {

namespace {

struct Expected {
  std::string_view id;
  double distance;
};

// Published walkthrough values, in catalog order.
constexpr Expected kExpectedDistances[] = {
    {"nike-zoomx", 1.97},
    {"adidas-ultraboost", 1.12},
    {"reebok-floatride", 0.22},
    {"asics-gel-kayano", 0.58},
};
constexpr std::string_view kExpectedRanking[] = {"reebok-floatride", "asics-gel-kayano",
                                                 "adidas-ultraboost", "nike-zoomx"};
constexpr std::string_view kExpectedTopPick = "reebok-floatride";
constexpr double kExpectedTopPrice = 90.0;
constexpr double kTolerance = 0.005;

}  // namespace

int cmd_demo_shoes(Io& io) {
  FlatIndex index;
  for (auto& doc : fixture::shoe_documents()) index.insert(std::move(doc));
  const Vector query = fixture_embed(fixture::kDemoQuery);
  const auto products = fixture::shoe_products();

  io.out << fmt::format("query: \"{}\" -> ({:.1f}, {:.1f})\n\n", fixture::kDemoQuery, query[0],
                        query[1]);
  io.out << "distances\n";
  std::vector<std::string> diffs;
  nlohmann::ordered_json result;
  for (const auto& p : products) {
    const double d = euclidean_distance(query, Vector{p.x, p.y});
    io.out << fmt::format("  {:<18} {:<24} ({:.1f}, {:.1f})  distance={:.2f}\n", p.id, p.name, p.x,
                          p.y, d);
    result["distances"][std::string(p.id)] = std::round(d * 1000.0) / 1000.0;
    for (const auto& e : kExpectedDistances) {
      if (e.id == p.id && std::abs(d - e.distance) > kTolerance) {
        diffs.push_back(fmt::format("distance {}: expected {:.2f}, got {:.4f}", p.id, e.distance, d));
      }
    }
  }

  io.out << "\nranking (all products)\n";
  const auto ranked = index.search(query, products.size());
  for (const auto& hit : ranked) {
    const auto doc = index.get(hit.doc_id);
    io.out << fmt::format("  {}. {:<18} distance={:.2f}  price={}\n", hit.rank, hit.doc_id,
                          hit.distance, doc->metadata.at("price").to_display());
    result["ranking"].push_back(hit.doc_id);
  }
  for (std::size_t i = 0; i < std::size(kExpectedRanking); ++i) {
    if (i >= ranked.size() || ranked[i].doc_id != kExpectedRanking[i]) {
      diffs.push_back(fmt::format("rank {}: expected {}, got {}", i + 1, kExpectedRanking[i],
                                  i < ranked.size() ? ranked[i].doc_id : "nothing"));
    }
  }

  io.out << "\nranking (" << fixture::kDemoFilter << ")\n";
  const auto filtered =
      index.search_filtered(query, products.size(), FilterExpr::parse(fixture::kDemoFilter));
  for (const auto& hit : filtered) {
    const auto doc = index.get(hit.doc_id);
    io.out << fmt::format("  {}. {:<18} distance={:.2f}  price={}\n", hit.rank, hit.doc_id,
                          hit.distance, doc->metadata.at("price").to_display());
  }

  if (filtered.empty()) {
    diffs.push_back("filtered search returned nothing");
    result["top_pick"] = nullptr;
  } else {
    const auto top = index.get(filtered.front().doc_id);
    const double price = top->metadata.at("price").as_number();
    io.out << fmt::format("\ntop recommendation: {} ({}), price ${}, distance={:.2f}\n", top->id,
                          top->metadata.at("name").as_string(),
                          top->metadata.at("price").to_display(), filtered.front().distance);
    result["top_pick"] = top->id;
    result["top_pick_price"] = price;
    if (top->id != kExpectedTopPick || price != kExpectedTopPrice) {
      diffs.push_back(fmt::format("top pick: expected {} at {}, got {} at {}", kExpectedTopPick,
                                  kExpectedTopPrice, top->id, price));
    }
  }

  result["ok"] = diffs.empty();
  io.out << "\nRESULT " << result.dump() << '\n';
  if (!diffs.empty()) {
    for (const auto& d : diffs) io.out << "  mismatch: " << d << '\n';
    io.out << "DEMO_FAIL\n";
    return kExitData;
  }
  io.out << "DEMO_OK\n";
  return kExitOk;
}

}  // namespace contextdb::cli
