#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contextdb/cache/response_cache.hpp"
#include "contextdb/core/embedding.hpp"
#include "contextdb/core/filter.hpp"
#include "contextdb/index/vector_index.hpp"
#include "contextdb/pipeline/llm_client.hpp"
#include "contextdb/pipeline/prompt_template.hpp"
#include "contextdb/store/clock.hpp"
#include "contextdb/store/conversation_store.hpp"
#include "contextdb/store/situational_store.hpp"

namespace contextdb {

inline constexpr std::array<std::string_view, 7> kPipelineStages{
    "cache", "history", "situation", "embed", "search", "llm", "persist"};

struct PipelineOptions {
  std::size_t history_window = 10;
  std::int64_t cache_ttl_ms = kDefaultCacheTtlMs;
  /// Also index each question's embedding in `question_index`.
  bool store_question_embeddings = false;
};

struct PipelineResponse {
  std::string text;
  bool cached = false;
  std::vector<SearchHit> retrieved;
  /// Wall time per stage in ms. A cache hit reports only "cache".
  std::map<std::string, double> latency_ms;
  /// The prompt sent to the model; absent on a cache hit.
  std::optional<EngineeredPrompt> prompt;
};

/// The three context tiers plus the model, wired together. All references
/// must outlive the Pipeline.
struct PipelineDeps {
  ConversationStore& conversations;
  SituationalStore& profiles;
  VectorIndex& index;
  const EmbeddingProvider& embedder;
  LlmClient& llm;
  ResponseCache& cache;
  VectorIndex* question_index = nullptr;
};

/// Runs one user turn end to end:
///   cache check -> history -> profile -> embed -> filtered search ->
///   prompt + model -> persist exchange and cache -> respond.
/// A cache hit returns immediately and touches no store.
class Pipeline {
 public:
  Pipeline(PipelineDeps deps, PromptTemplate tmpl, Clock clock, PipelineOptions options = {});

  /// Throws PipelineError naming the failed stage. Nothing is written to the
  /// conversation store unless the model call succeeded.
  PipelineResponse handle_query(std::string_view session_id, std::string_view user_id,
                                std::string_view question, std::size_t k,
                                const std::optional<FilterExpr>& filter = std::nullopt);

  const PromptTemplate& prompt_template() const noexcept { return template_; }

 private:
  PipelineDeps deps_;
  PromptTemplate template_;
  Clock clock_;
  PipelineOptions options_;
};

/// Appends the user question then the assistant answer with one durable
/// write; `meta` goes on the assistant message.
std::pair<Message, Message> record_exchange(ConversationStore& store, std::string_view session_id,
                                            std::string question, std::string answer,
                                            Metadata meta = {});

/// Trims surrounding whitespace and, if anything was retrieved, appends
/// "\n\nReferences: id1, id2".
std::string postprocess_response(std::string_view raw, const std::vector<SearchHit>& retrieved);

}  // namespace contextdb
