#include "contextdb/store/meta_json.hpp"

#include "contextdb/core/error.hpp"

namespace contextdb {

nlohmann::json meta_to_json(const MetaValue& value) {
  switch (value.type()) {
    case MetaValue::Type::number: return value.as_number();
    case MetaValue::Type::string: return value.as_string();
    case MetaValue::Type::boolean: return value.as_bool();
  }
  return nullptr;
}

MetaValue meta_from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return MetaValue(j.get<bool>());
  if (j.is_number()) return MetaValue(j.get<double>());
  if (j.is_string()) return MetaValue(j.get<std::string>());
  throw InvalidArgumentError("metadata values must be numbers, strings or booleans, got " +
                             std::string(j.type_name()));
}

nlohmann::json metadata_to_json(const Metadata& metadata) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [key, value] : metadata) out[key] = meta_to_json(value);
  return out;
}

Metadata metadata_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgumentError("metadata must be a JSON object");
  Metadata out;
  for (const auto& [key, value] : j.items()) {
    if (key.empty()) throw InvalidArgumentError("metadata keys must be nonempty");
    out.emplace(key, meta_from_json(value));
  }
  return out;
}

}  // namespace contextdb
