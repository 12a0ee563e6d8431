#include "contextdb/core/meta_value.hpp"

#include <charconv>
#include <cmath>

namespace contextdb {

std::string_view type_name(MetaValue::Type type) noexcept {
  switch (type) {
    case MetaValue::Type::number: return "number";
    case MetaValue::Type::string: return "string";
    case MetaValue::Type::boolean: return "boolean";
  }
  return "unknown";
}

std::string MetaValue::to_display() const {
  switch (type()) {
    case Type::string: return as_string();
    case Type::boolean: return as_bool() ? "true" : "false";
    case Type::number: break;
  }
  const double v = as_number();
  char buf[64];
  std::to_chars_result res;
  if (std::trunc(v) == v && std::fabs(v) < 1e15) {
    res = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(v));
  } else {
    res = std::to_chars(buf, buf + sizeof buf, v);
  }
  return {buf, res.ptr};
}

}  // namespace contextdb
