#include "contextdb/pipeline/prompt_template.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "contextdb/core/error.hpp"

namespace contextdb {

namespace {

constexpr std::string_view kBuiltinBody =
    "You are a helpful shopping assistant. Answer using only the context below.\n"
    "\n"
    "Question:\n"
    "{question}\n"
    "\n"
    "Conversation so far:\n"
    "{history}\n"
    "\n"
    "About the user:\n"
    "{situation}\n"
    "\n"
    "Relevant items:\n"
    "{retrieved}\n";

}  // namespace

PromptTemplate::PromptTemplate(std::string name, std::string body)
    : name_(std::move(name)), body_(std::move(body)) {
  for (std::size_t which = 0; which < kPlaceholders.size(); ++which) {
    const auto marker = kPlaceholders[which];
    std::size_t count = 0;
    for (auto pos = body_.find(marker); pos != std::string::npos;
         pos = body_.find(marker, pos + marker.size())) {
      slots_.push_back({pos, which});
      ++count;
    }
    if (count != 1) {
      throw TemplateError(fmt::format("template '{}' must contain {} exactly once (found {})",
                                      name_, marker, count));
    }
  }
  std::sort(slots_.begin(), slots_.end(), [](const Slot& a, const Slot& b) { return a.pos < b.pos; });
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& dir, const std::string& name) {
  const auto path = dir / (name + ".txt");
  std::ifstream in(path);
  if (!in) throw TemplateError("cannot read template '" + path.string() + "'");
  std::ostringstream body;
  body << in.rdbuf();
  return PromptTemplate(name, body.str());
}

PromptTemplate PromptTemplate::builtin() { return PromptTemplate("default", std::string(kBuiltinBody)); }

std::string PromptTemplate::render(std::string_view question, std::string_view history,
                                   std::string_view situation, std::string_view retrieved) const {
  const std::array<std::string_view, 4> values{question, history, situation, retrieved};
  std::string out;
  out.reserve(body_.size() + question.size() + history.size() + situation.size() +
              retrieved.size());
  std::size_t cursor = 0;
  for (const auto& slot : slots_) {
    out.append(body_, cursor, slot.pos - cursor);
    out.append(values[slot.which]);
    cursor = slot.pos + kPlaceholders[slot.which].size();
  }
  out.append(body_, cursor, std::string::npos);
  return out;
}

EngineeredPrompt assemble_prompt(const PromptTemplate& tmpl, std::string_view question,
                                 std::span<const Message> history,
                                 const std::optional<Profile>& profile,
                                 std::span<const RetrievedDoc> hits) {
  EngineeredPrompt prompt;
  prompt.sources.question = std::string(question);

  std::string history_block;
  for (const auto& m : history) {
    if (!history_block.empty()) history_block += '\n';
    history_block += fmt::format("{}: {}", role_name(m.role), m.text);
  }
  prompt.sources.history_count = history.size();

  std::string situation_block;
  if (!profile) {
    situation_block = "none";
  } else {
    for (const auto& [field, value] : profile->fields) {  // Metadata is key-ordered
      if (!situation_block.empty()) situation_block += '\n';
      situation_block += fmt::format("{}={}", field, value.to_display());
      prompt.sources.situation_fields.push_back(field);
    }
    if (situation_block.empty()) situation_block = "none";
  }

  std::string retrieved_block;
  for (const auto& h : hits) {
    if (!retrieved_block.empty()) retrieved_block += '\n';
    retrieved_block += fmt::format("{} (distance={:.2f}): {}", h.hit.doc_id, h.hit.distance, h.doc.text);
    prompt.sources.retrieved.push_back({h.hit.doc_id, h.hit.distance});
  }

  prompt.rendered = tmpl.render(question, history_block, situation_block, retrieved_block);
  return prompt;
}

}  // namespace contextdb
