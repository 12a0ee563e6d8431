#pragma once

#include <nlohmann/json.hpp>

#include "contextdb/core/meta_value.hpp"

namespace contextdb {

nlohmann::json meta_to_json(const MetaValue& value);
/// Throws InvalidArgumentError for JSON other than number, string or bool.
MetaValue meta_from_json(const nlohmann::json& j);

nlohmann::json metadata_to_json(const Metadata& metadata);
/// Expects a JSON object; keys must be nonempty.
Metadata metadata_from_json(const nlohmann::json& j);

}  // namespace contextdb
