#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "contextdb/core/document.hpp"
#include "contextdb/index/vector_index.hpp"
#include "contextdb/store/conversation_store.hpp"
#include "contextdb/store/situational_store.hpp"

namespace contextdb {

/// Body text with {question}, {history}, {situation} and {retrieved}, each
/// exactly once. Validated on construction.
class PromptTemplate {
 public:
  static constexpr std::array<std::string_view, 4> kPlaceholders{
      "{question}", "{history}", "{situation}", "{retrieved}"};

  /// Throws TemplateError naming the placeholder that is missing or repeated.
  PromptTemplate(std::string name, std::string body);

  /// Reads `<dir>/<name>.txt`.
  static PromptTemplate load(const std::filesystem::path& dir, const std::string& name);
  static PromptTemplate builtin();

  const std::string& name() const noexcept { return name_; }
  const std::string& body() const noexcept { return body_; }

  /// Single left-to-right pass: bound values are never re-scanned for
  /// placeholders.
  std::string render(std::string_view question, std::string_view history,
                     std::string_view situation, std::string_view retrieved) const;

 private:
  struct Slot {
    std::size_t pos;
    std::size_t which;  // index into kPlaceholders
  };

  std::string name_;
  std::string body_;
  std::vector<Slot> slots_;  // sorted by pos
};

struct RetrievedRef {
  std::string doc_id;
  double distance = 0.0;

  friend bool operator==(const RetrievedRef&, const RetrievedRef&) = default;
};

/// What went into a rendered prompt.
struct PromptSources {
  std::string question;
  std::size_t history_count = 0;
  std::vector<std::string> situation_fields;
  std::vector<RetrievedRef> retrieved;
};

struct EngineeredPrompt {
  std::string rendered;
  PromptSources sources;
};

struct RetrievedDoc {
  SearchHit hit;
  Document doc;
};

/// Fills a template:
///   {question}  verbatim
///   {history}   "role: text" per message in seq order
///   {situation} "field=value" per field sorted by name, or "none"
///   {retrieved} "doc_id (distance=D.DD): text" per hit in rank order
EngineeredPrompt assemble_prompt(const PromptTemplate& tmpl, std::string_view question,
                                 std::span<const Message> history,
                                 const std::optional<Profile>& profile,
                                 std::span<const RetrievedDoc> hits);

}  // namespace contextdb
