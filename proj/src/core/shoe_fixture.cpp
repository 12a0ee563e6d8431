#include "contextdb/core/shoe_fixture.hpp"

#include <array>
#include <string>

namespace contextdb::fixture {

namespace {

constexpr std::array<ShoeProduct, 4> kProducts{{
    {"nike-zoomx", "Nike ZoomX Infinity Run",
     "Max-cushion daily trainer built for injury-conscious runners.", 1.2F, 3.5F, 150.0},
    {"adidas-ultraboost", "Adidas UltraBoost",
     "Responsive boost foam with a sock-like knit upper.", 2.0F, 3.2F, 120.0},
    {"reebok-floatride", "Reebok Floatride",
     "Lightweight, comfortable everyday running shoe.", 3.1F, 2.9F, 90.0},
    {"asics-gel-kayano", "ASICS Gel-Kayano",
     "Stability running shoe with gel cushioning for long runs.", 2.5F, 3.0F, 110.0},
}};

std::string brand_of(std::string_view name) {
  return std::string(name.substr(0, name.find(' ')));
}

}  // namespace

std::span<const ShoeProduct> shoe_products() noexcept { return kProducts; }

std::vector<Document> shoe_documents() {
  std::vector<Document> docs;
  docs.reserve(kProducts.size());
  for (const auto& p : kProducts) {
    Metadata meta{{"name", std::string(p.name)}, {"brand", brand_of(p.name)}, {"price", p.price}};
    docs.push_back(Document{std::string(p.id), std::string(p.description), std::move(meta),
                            Vector{p.x, p.y}});
  }
  return docs;
}

}  // namespace contextdb::fixture
