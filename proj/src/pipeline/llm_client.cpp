#include "contextdb/pipeline/llm_client.hpp"

#include "contextdb/core/error.hpp"

namespace contextdb {

std::string MockLlm::complete(const EngineeredPrompt& prompt) {
  ++calls_;
  {
    std::lock_guard lock(mutex_);
    last_prompt_ = prompt.rendered;
  }
  if (failing_) throw LlmError("mock model configured to fail");

  std::string refs;
  for (const auto& r : prompt.sources.retrieved) {
    if (!refs.empty()) refs += ", ";
    refs += r.doc_id;
  }
  if (refs.empty()) refs = "(no matches)";
  return "Answer to \"" + prompt.sources.question + "\" using: " + refs;
}

std::string MockLlm::last_prompt() const {
  std::lock_guard lock(mutex_);
  return last_prompt_;
}

}  // namespace contextdb
