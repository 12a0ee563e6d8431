#include "contextdb/core/document.hpp"

#include <algorithm>
#include <cctype>

#include "contextdb/core/error.hpp"

namespace contextdb {

void validate_document(const Document& doc) {
  if (doc.id.empty()) throw InvalidArgumentError("document id must be nonempty");
  for (const auto& [key, value] : doc.metadata) {
    const bool has_space = std::any_of(key.begin(), key.end(), [](unsigned char c) {
      return std::isspace(c) != 0;
    });
    if (key.empty() || has_space) {
      throw InvalidArgumentError("document '" + doc.id + "': invalid metadata key '" + key + "'");
    }
  }
}

}  // namespace contextdb
