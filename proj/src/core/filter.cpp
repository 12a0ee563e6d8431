#include "contextdb/core/filter.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>

#include "contextdb/core/error.hpp"

namespace contextdb {

std::string_view op_symbol(CompareOp op) noexcept {
  switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
    case CompareOp::in: return "in";
  }
  return "?";
}

namespace {

bool is_ordering(CompareOp op) {
  return op == CompareOp::lt || op == CompareOp::le || op == CompareOp::gt || op == CompareOp::ge;
}

void validate_clause(const FilterClause& c) {
  if (c.field.empty()) throw InvalidArgumentError("filter clause has an empty field name");
  if (c.op == CompareOp::in) {
    if (c.literals.empty()) {
      throw InvalidArgumentError("'in' clause on '" + c.field + "' needs at least one literal");
    }
    for (const auto& lit : c.literals) {
      if (lit.type() != c.literals.front().type()) {
        throw InvalidArgumentError("'in' list on '" + c.field + "' mixes literal types");
      }
    }
    return;
  }
  if (c.literals.size() != 1) {
    throw InvalidArgumentError("clause on '" + c.field + "' needs exactly one literal");
  }
  if (is_ordering(c.op) && !c.literals.front().is_number()) {
    throw InvalidArgumentError("operator " + std::string(op_symbol(c.op)) + " on '" + c.field +
                               "' requires a number literal");
  }
}

std::string literal_text(const MetaValue& v) {
  if (!v.is_string()) return v.to_display();
  std::string out = "\"";
  for (const char c : v.as_string()) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

// Recursive-descent parser over the raw text; positions are 0-based
// internally and reported 1-based.
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  FilterExpr parse() {
    std::vector<FilterClause> clauses;
    skip_ws();
    if (at_end()) return FilterExpr{};
    while (true) {
      clauses.push_back(clause());
      skip_ws();
      if (at_end()) break;
      if (!consume("&&")) fail("expected '&&' or end of filter");
    }
    return FilterExpr(std::move(clauses));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw FilterParseError(pos_ + 1, what); }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  static bool is_field_char(char c) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
    switch (c) {
      case '=': case '!': case '<': case '>': case '(': case ')':
      case '&': case ',': case '"': case '\0':
        return false;
      default:
        return true;
    }
  }

  FilterClause clause() {
    skip_ws();
    const std::size_t start = pos_;
    while (!at_end() && is_field_char(text_[pos_])) ++pos_;
    if (pos_ == start) fail("expected field name");
    FilterClause c;
    c.field = std::string(text_.substr(start, pos_ - start));

    skip_ws();
    const std::size_t op_pos = pos_;
    if (consume("!=")) c.op = CompareOp::ne;
    else if (consume("<=")) c.op = CompareOp::le;
    else if (consume(">=")) c.op = CompareOp::ge;
    else if (consume("<")) c.op = CompareOp::lt;
    else if (consume(">")) c.op = CompareOp::gt;
    else if (consume("=")) c.op = CompareOp::eq;
    else if (keyword_in()) c.op = CompareOp::in;
    else fail("expected operator (=, !=, <, <=, >, >=, in)");

    if (c.op == CompareOp::in) {
      skip_ws();
      if (!consume("(")) fail("expected '(' after 'in'");
      while (true) {
        c.literals.push_back(literal());
        skip_ws();
        if (consume(")")) break;
        if (!consume(",")) fail("expected ',' or ')' in 'in' list");
      }
    } else {
      c.literals.push_back(literal());
    }

    try {
      validate_clause(c);
    } catch (const InvalidArgumentError& e) {
      throw FilterParseError(op_pos + 1, e.what());
    }
    return c;
  }

  bool keyword_in() {
    const auto word = text_.substr(pos_, 2);
    if (word != "in" && word != "IN") return false;
    const char next = pos_ + 2 < text_.size() ? text_[pos_ + 2] : '\0';
    if (next != '(' && !std::isspace(static_cast<unsigned char>(next))) return false;
    pos_ += 2;
    return true;
  }

  MetaValue literal() {
    skip_ws();
    if (at_end()) fail("expected literal");
    const char c = peek();
    if (c == '"') return string_literal();
    if (consume("true")) return MetaValue(true);
    if (consume("false")) return MetaValue(false);
    if (c == '-' || c == '+' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      return number_literal();
    }
    fail("expected literal (number, \"string\", true or false)");
  }

  MetaValue string_literal() {
    const std::size_t open = pos_;
    ++pos_;
    std::string out;
    while (!at_end()) {
      const char c = text_[pos_++];
      if (c == '"') return MetaValue(std::move(out));
      if (c == '\\') {
        if (at_end()) break;
        out += text_[pos_++];
      } else {
        out += c;
      }
    }
    pos_ = open;
    fail("unterminated string literal");
  }

  MetaValue number_literal() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < text_.size()) {
      const char c = text_[end];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' ||
          c == '-' || c == '+') {
        ++end;
      } else {
        break;
      }
    }
    std::string token(text_.substr(start, end - start));
    if (!token.empty() && token.front() == '+') token.erase(0, 1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) fail("malformed number");
    pos_ = end;
    try {
      return MetaValue(value);
    } catch (const InvalidArgumentError&) {
      pos_ = start;
      fail("number out of range");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

FilterExpr::FilterExpr(std::vector<FilterClause> clauses) : clauses_(std::move(clauses)) {
  for (const auto& c : clauses_) validate_clause(c);
}

FilterExpr FilterExpr::parse(std::string_view text) { return Parser(text).parse(); }

std::string FilterExpr::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    const auto& c = clauses_[i];
    if (i > 0) out += " && ";
    out += c.field;
    if (c.op == CompareOp::in) {
      out += " in (";
      for (std::size_t j = 0; j < c.literals.size(); ++j) {
        if (j > 0) out += ", ";
        out += literal_text(c.literals[j]);
      }
      out += ')';
    } else {
      out += op_symbol(c.op);
      out += literal_text(c.literals.front());
    }
  }
  return out;
}

namespace {

void require_same_type(const std::string& field, const MetaValue& stored, const MetaValue& lit) {
  if (stored.type() != lit.type()) {
    throw FilterTypeError(field, std::string(type_name(stored.type())),
                          std::string(type_name(lit.type())));
  }
}

}  // namespace

bool evaluate_clause(const FilterClause& clause, const Metadata& metadata) {
  const auto it = metadata.find(clause.field);
  if (it == metadata.end()) return false;
  const MetaValue& stored = it->second;

  if (clause.op == CompareOp::in) {
    bool hit = false;
    for (const auto& lit : clause.literals) {
      require_same_type(clause.field, stored, lit);
      hit = hit || stored == lit;
    }
    return hit;
  }

  const MetaValue& lit = clause.literals.front();
  require_same_type(clause.field, stored, lit);
  switch (clause.op) {
    case CompareOp::eq: return stored == lit;
    case CompareOp::ne: return !(stored == lit);
    case CompareOp::lt: return stored.as_number() < lit.as_number();
    case CompareOp::le: return stored.as_number() <= lit.as_number();
    case CompareOp::gt: return stored.as_number() > lit.as_number();
    case CompareOp::ge: return stored.as_number() >= lit.as_number();
    case CompareOp::in: break;
  }
  return false;
}

bool evaluate_filter(const FilterExpr& expr, const Metadata& metadata) {
  bool result = true;
  for (const auto& clause : expr.clauses()) {
    result = evaluate_clause(clause, metadata) && result;
  }
  return result;
}

bool evaluate_filter(const FilterExpr& expr, const Document& doc) {
  return evaluate_filter(expr, doc.metadata);
}

}  // namespace contextdb
