#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "contextdb/core/document.hpp"

namespace contextdb::fixture {

struct ShoeProduct {
  std::string_view id;
  std::string_view name;
  std::string_view description;
  float x;
  float y;
  double price;
};

/// The four-product running-shoe inventory with its 2-D embeddings.
/// Prices for reebok-floatride and asics-gel-kayano are the published ones;
/// nike-zoomx and adidas-ultraboost carry chosen values above 100.
std::span<const ShoeProduct> shoe_products() noexcept;

inline constexpr std::string_view kDemoQuery = "I need comfortable running shoes under $100";
inline constexpr float kDemoQueryX = 3.0F;
inline constexpr float kDemoQueryY = 2.7F;
inline constexpr std::string_view kDemoFilter = "price<100";

/// Documents carry metadata {name, brand, price}; text is the description.
std::vector<Document> shoe_documents();

}  // namespace contextdb::fixture
