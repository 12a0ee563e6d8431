#pragma once

#include <atomic>
#include <cstddef>
#include <mutex>
#include <string>

#include "contextdb/pipeline/prompt_template.hpp"

namespace contextdb {

/// Generates a response from a fully engineered prompt. Models are treated
/// as stateless: everything they may use is inside the prompt.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  /// Throws LlmError on failure.
  virtual std::string complete(const EngineeredPrompt& prompt) = 0;
};

/// Deterministic stand-in. Replies with a digest of the question and the
/// retrieved doc ids in rank order:
///   Answer to "<question>" using: id1, id2
/// or `using: (no matches)` when nothing was retrieved.
class MockLlm final : public LlmClient {
 public:
  std::string complete(const EngineeredPrompt& prompt) override;

  /// While set, every call throws LlmError.
  void set_failing(bool failing) noexcept { failing_ = failing; }
  std::size_t calls() const noexcept { return calls_; }
  std::string last_prompt() const;

 private:
  std::atomic<bool> failing_{false};
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mutex_;
  std::string last_prompt_;
};

}  // namespace contextdb
