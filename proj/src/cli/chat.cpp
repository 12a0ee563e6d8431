#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "commands.hpp"
#include "contextdb/core/error.hpp"
#include "contextdb/index/flat_index.hpp"
#include "contextdb/pipeline/pipeline.hpp"

namespace contextdb::cli {

namespace {

PromptTemplate load_template(const std::filesystem::path& home, const std::string& name) {
  const auto dir = home / "templates";
  if (std::filesystem::exists(dir / (name + ".txt"))) return PromptTemplate::load(dir, name);
  if (name == "default") return PromptTemplate::builtin();
  throw NotFoundError("no template '" + name + "' in " + dir.string());
}

}  // namespace

int cmd_chat(const ChatOptions& opts, Io& io) {
  std::optional<FilterExpr> filter;
  if (!opts.filter.empty()) filter = FilterExpr::parse(opts.filter);
  if (opts.k == 0) throw InvalidArgumentError("--k must be at least 1");

  const auto index_dir = opts.index_dir.empty() ? opts.home / "index" : opts.index_dir;
  const auto embedder = make_embedder(load_embedder_config(index_dir));
  const auto index = load_index(index_dir / kSnapshotFile);

  std::filesystem::create_directories(opts.home);
  ConversationStore conversations(opts.home / "conversations.jsonl", system_clock());
  SituationalStore profiles(opts.home / "profiles.jsonl", system_clock());
  if (!opts.profiles_seed.empty()) profiles.load_seed(opts.profiles_seed);
  ResponseCache cache(opts.cache_capacity, opts.cache_ttl_ms);
  MockLlm llm;

  const auto questions_path = opts.home / "questions.snap";
  std::unique_ptr<VectorIndex> questions;
  if (opts.store_questions) {
    questions = std::filesystem::exists(questions_path) ? load_index(questions_path)
                                                        : std::make_unique<FlatIndex>();
  }

  PipelineOptions popts;
  popts.history_window = opts.history_window;
  popts.cache_ttl_ms = opts.cache_ttl_ms;
  popts.store_question_embeddings = opts.store_questions;
  Pipeline pipeline({conversations, profiles, *index, *embedder, llm, cache, questions.get()},
                    load_template(opts.home, opts.template_name), system_clock(), popts);

  std::string line;
  while (std::getline(io.in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      const auto resp = pipeline.handle_query(opts.session, opts.user, line, opts.k, filter);
      if (resp.cached) io.out << "[cached] ";
      io.out << resp.text << '\n';
      if (opts.verbose) {
        std::string ids;
        for (const auto& h : resp.retrieved) {
          ids += fmt::format("{}{} ({:.2f})", ids.empty() ? "" : ", ", h.doc_id, h.distance);
        }
        io.out << "retrieved: " << (ids.empty() ? "-" : ids) << '\n';
        io.out << "latency_ms";
        for (const auto stage : kPipelineStages) {
          const auto it = resp.latency_ms.find(std::string(stage));
          if (it != resp.latency_ms.end()) io.out << fmt::format(" {}={:.3f}", stage, it->second);
        }
        io.out << '\n';
      }
    } catch (const std::exception& e) {
      io.err << "error: " << e.what() << '\n';
    }
    io.out.flush();
  }

  if (questions) questions->save(questions_path);
  return kExitOk;
}

}  // namespace contextdb::cli
