#include "contextdb/pipeline/pipeline.hpp"

#include <chrono>
#include <exception>

#include "contextdb/core/error.hpp"

namespace contextdb {

namespace {

using Millis = std::chrono::duration<double, std::milli>;

// Runs one stage, records its wall time and tags any failure with the stage.
template <typename F>
auto run_stage(std::string_view stage, std::map<std::string, double>& latency, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  const auto record = [&] {
    latency[std::string(stage)] = Millis(std::chrono::steady_clock::now() - start).count();
  };
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      record();
    } else {
      auto result = body();
      record();
      return result;
    }
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(std::string(stage), e.what());
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string postprocess_response(std::string_view raw, const std::vector<SearchHit>& retrieved) {
  std::string out(trim(raw));
  if (!retrieved.empty()) {
    out += "\n\nReferences: ";
    for (std::size_t i = 0; i < retrieved.size(); ++i) {
      if (i > 0) out += ", ";
      out += retrieved[i].doc_id;
    }
  }
  return out;
}

std::pair<Message, Message> record_exchange(ConversationStore& store, std::string_view session_id,
                                            std::string question, std::string answer,
                                            Metadata meta) {
  std::vector<MessageDraft> drafts;
  drafts.push_back({Role::user, std::move(question), {}});
  drafts.push_back({Role::assistant, std::move(answer), std::move(meta)});
  auto written = store.append_messages(session_id, std::move(drafts));
  return {std::move(written[0]), std::move(written[1])};
}

Pipeline::Pipeline(PipelineDeps deps, PromptTemplate tmpl, Clock clock, PipelineOptions options)
    : deps_(deps), template_(std::move(tmpl)), clock_(std::move(clock)), options_(options) {
  if (options_.history_window == 0) throw InvalidArgumentError("history window must be positive");
  if (options_.cache_ttl_ms <= 0) throw InvalidArgumentError("cache TTL must be positive");
  if (options_.store_question_embeddings && deps_.question_index == nullptr) {
    throw InvalidArgumentError("storing question embeddings needs a question index");
  }
}

PipelineResponse Pipeline::handle_query(std::string_view session_id, std::string_view user_id,
                                        std::string_view question, std::size_t k,
                                        const std::optional<FilterExpr>& filter) {
  if (session_id.empty()) throw InvalidArgumentError("session id must be nonempty");
  if (k == 0) throw InvalidArgumentError("k must be at least 1");

  PipelineResponse resp;
  auto& latency = resp.latency_ms;

  const std::string key = make_cache_key(user_id, question);
  auto cached = run_stage("cache", latency, [&] { return deps_.cache.get(key, clock_()); });
  if (cached) {
    resp.text = std::move(*cached);
    resp.cached = true;
    return resp;
  }

  const auto history = run_stage("history", latency, [&] {
    return deps_.conversations.get_history(session_id, options_.history_window);
  });
  const auto profile =
      run_stage("situation", latency, [&] { return deps_.profiles.get_profile(user_id); });
  const Vector query = run_stage("embed", latency, [&] { return deps_.embedder.embed(question); });

  std::vector<RetrievedDoc> hits = run_stage("search", latency, [&] {
    const auto found = filter ? deps_.index.search_filtered(query, k, *filter)
                              : deps_.index.search(query, k);
    std::vector<RetrievedDoc> docs;
    docs.reserve(found.size());
    for (const auto& hit : found) {
      auto doc = deps_.index.get(hit.doc_id);
      if (!doc) continue;  // removed after the search returned
      docs.push_back({hit, std::move(*doc)});
    }
    return docs;
  });
  for (const auto& h : hits) resp.retrieved.push_back(h.hit);

  auto raw = run_stage("llm", latency, [&] {
    resp.prompt = assemble_prompt(template_, question, history, profile, hits);
    return deps_.llm.complete(*resp.prompt);
  });
  resp.text = postprocess_response(raw, resp.retrieved);

  run_stage("persist", latency, [&] {
    Metadata meta{{"user_id", std::string(user_id)}};
    std::string refs;
    for (const auto& h : resp.retrieved) refs += (refs.empty() ? "" : ",") + h.doc_id;
    meta.emplace("retrieved", refs);
    const auto [asked, answered] = record_exchange(deps_.conversations, session_id,
                                                   std::string(question), resp.text, meta);
    if (options_.store_question_embeddings) {
      Document q{"question:" + asked.session_id + ":" + std::to_string(asked.seq),
                 std::string(question),
                 {{"session_id", asked.session_id}, {"user_id", std::string(user_id)}},
                 query};
      deps_.question_index->insert(std::move(q));
    }
    deps_.cache.put(key, resp.text, options_.cache_ttl_ms, clock_());
  });
  return resp;
}

}  // namespace contextdb
