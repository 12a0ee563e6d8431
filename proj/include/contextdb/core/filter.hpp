#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "contextdb/core/document.hpp"
#include "contextdb/core/meta_value.hpp"

namespace contextdb {

enum class CompareOp { eq, ne, lt, le, gt, ge, in };

std::string_view op_symbol(CompareOp op) noexcept;

/// `field OP literal`. `literals` holds exactly one value except for `in`,
/// which holds a nonempty list of one type.
struct FilterClause {
  std::string field;
  CompareOp op = CompareOp::eq;
  std::vector<MetaValue> literals;

  friend bool operator==(const FilterClause&, const FilterClause&) = default;
};

/// Conjunction of clauses. An empty expression matches everything.
class FilterExpr {
 public:
  FilterExpr() = default;
  /// Throws InvalidArgumentError if a clause is malformed.
  explicit FilterExpr(std::vector<FilterClause> clauses);

  /// Parses `price<100 && brand="Reebok" && size in (9, 10)`.
  /// Throws FilterParseError carrying a 1-based column.
  static FilterExpr parse(std::string_view text);

  const std::vector<FilterClause>& clauses() const noexcept { return clauses_; }
  bool empty() const noexcept { return clauses_.empty(); }

  /// Canonical text form; parse(to_string()) yields an equal expression.
  std::string to_string() const;

  friend bool operator==(const FilterExpr&, const FilterExpr&) = default;

 private:
  std::vector<FilterClause> clauses_;
};

/// A clause on a field absent from `metadata` is false. Type mismatches
/// throw FilterTypeError.
bool evaluate_clause(const FilterClause& clause, const Metadata& metadata);

/// Every clause is evaluated (no short-circuit), so a type mismatch is
/// reported regardless of clause order.
bool evaluate_filter(const FilterExpr& expr, const Metadata& metadata);
bool evaluate_filter(const FilterExpr& expr, const Document& doc);

}  // namespace contextdb
