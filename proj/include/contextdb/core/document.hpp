#pragma once

#include <string>

#include "contextdb/core/meta_value.hpp"
#include "contextdb/core/vector.hpp"

namespace contextdb {

/// An item in the semantic tier: product, knowledge snippet, stored question.
struct Document {
  std::string id;
  std::string text;
  Metadata metadata;
  Vector embedding;
};

/// Throws InvalidArgumentError on an empty id or a metadata key that is
/// empty or contains whitespace.
void validate_document(const Document& doc);

}  // namespace contextdb
