#include "contextdb/cli/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "commands.hpp"
#include "contextdb/core/error.hpp"

namespace contextdb::cli {

std::unique_ptr<EmbeddingProvider> make_embedder(const EmbedderConfig& config) {
  if (config.name == "hash") return std::make_unique<HashEmbedder>(config.dim, config.seed);
  if (config.name == "fixture") {
    if (config.dim != 2) {
      throw InvalidArgumentError("the fixture embedder is 2-dimensional; got --dim " +
                                 std::to_string(config.dim));
    }
    return std::make_unique<FixtureEmbedder>();
  }
  throw InvalidArgumentError("unknown embedder '" + config.name + "' (expected hash or fixture)");
}

void save_embedder_config(const std::filesystem::path& index_dir, const EmbedderConfig& config) {
  nlohmann::ordered_json j;
  j["embedder"] = config.name;
  j["dim"] = config.dim;
  j["seed"] = config.seed;
  const auto path = index_dir / kEmbedderFile;
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw StorageError("cannot write '" + path.string() + "'");
}

EmbedderConfig load_embedder_config(const std::filesystem::path& index_dir) {
  const auto path = index_dir / kEmbedderFile;
  std::ifstream in(path);
  if (!in) throw StorageError("cannot open '" + path.string() + "'; run ingest first");
  try {
    const auto j = nlohmann::json::parse(in);
    EmbedderConfig config;
    config.name = j.at("embedder").get<std::string>();
    config.dim = j.at("dim").get<std::size_t>();
    config.seed = j.at("seed").get<std::uint64_t>();
    return config;
  } catch (const nlohmann::json::exception& e) {
    throw StorageError("malformed '" + path.string() + "': " + e.what());
  }
}

std::string format_metadata(const Metadata& meta) {
  std::string out;
  for (const auto& [key, value] : meta) {
    if (!out.empty()) out += ' ';
    out += key;
    out += '=';
    out += value.is_string() ? nlohmann::json(value.as_string()).dump() : value.to_display();
  }
  return out;
}

namespace {

void add_hnsw_flags(CLI::App& cmd, HnswParams& p) {
  cmd.add_option("--m", p.m, "HNSW links per node")->capture_default_str();
  cmd.add_option("--ef-construction", p.ef_construction, "HNSW build beam width")
      ->capture_default_str();
  cmd.add_option("--ef-search", p.ef_search, "HNSW query beam width")->capture_default_str();
}

void add_ivf_flags(CLI::App& cmd, IvfParams& p) {
  cmd.add_option("--nlist", p.nlist, "IVF list count (0 = ceil(sqrt(n)))")->capture_default_str();
  cmd.add_option("--nprobe", p.nprobe, "IVF lists scanned per query")->capture_default_str();
  cmd.add_option("--kmeans-iters", p.kmeans_iters, "IVF k-means iteration cap")
      ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"contextdb: multi-context storage and retrieval for RAG applications", "contextdb"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read option defaults from a TOML/INI file");

  IngestOptions ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Build an index from a JSONL catalog");
  ingest_cmd->add_option("--catalog", ingest.catalog, "JSONL catalog file")->required();
  ingest_cmd->add_option("--index", ingest.index_dir, "Output index directory")->required();
  ingest_cmd->add_option("--embedder", ingest.embedder.name, "hash or fixture")
      ->check(CLI::IsMember({"hash", "fixture"}))
      ->capture_default_str();
  auto* dim_opt = ingest_cmd->add_option("--dim", ingest.embedder.dim, "Hash embedding dimension")
                      ->capture_default_str();
  ingest_cmd->add_option("--seed", ingest.embedder.seed, "Embedding and index seed")
      ->capture_default_str();
  ingest_cmd->add_option("--kind", ingest.kind, "Index kind")
      ->check(CLI::IsMember({"flat", "hnsw", "ivf"}))
      ->capture_default_str();

  QueryOptions query;
  auto* query_cmd = app.add_subcommand("query", "Search an ingested index");
  query_cmd->add_option("--index", query.index_dir, "Index directory")->required();
  query_cmd->add_option("--q", query.question, "Query text")->required();
  query_cmd->add_option("--k", query.k, "Number of hits")->capture_default_str();
  query_cmd->add_option("--filter", query.filter, "Metadata filter, e.g. price<100");

  auto* demo_cmd = app.add_subcommand("demo-shoes", "Run the running-shoe walkthrough");

  ChatOptions chat;
  auto* chat_cmd = app.add_subcommand("chat", "Answer questions read from stdin, one per line");
  chat_cmd->add_option("--session", chat.session, "Conversation session id")->required();
  chat_cmd->add_option("--user", chat.user, "User id for profile lookup")->required();
  chat_cmd->add_option("--k", chat.k, "Documents retrieved per question")->capture_default_str();
  chat_cmd->add_option("--filter", chat.filter, "Metadata filter applied to retrieval");
  chat_cmd->add_flag("--verbose", chat.verbose, "Print retrieved ids and stage latencies");
  chat_cmd->add_option("--home", chat.home, "Data directory")
      ->envname("CONTEXTDB_HOME")
      ->default_str(".contextdb");
  chat_cmd->add_option("--index", chat.index_dir, "Index directory (default <home>/index)");
  chat_cmd->add_option("--history-window", chat.history_window, "Past messages in the prompt")
      ->capture_default_str();
  chat_cmd->add_option("--cache-capacity", chat.cache_capacity, "Response cache entries")
      ->capture_default_str();
  chat_cmd->add_option("--cache-ttl-ms", chat.cache_ttl_ms, "Response cache TTL")
      ->capture_default_str();
  chat_cmd->add_option("--template", chat.template_name, "Template name in <home>/templates")
      ->capture_default_str();
  chat_cmd->add_option("--profiles", chat.profiles_seed, "JSONL profiles to load first");
  chat_cmd->add_flag("--store-questions", chat.store_questions,
                     "Index question embeddings in <home>/questions.snap");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Measure recall@k and latency on random vectors");
  bench_cmd->add_option("--n", bench.n, "Indexed vectors (>= 100)")->capture_default_str();
  bench_cmd->add_option("--dim", bench.dim, "Vector dimension")->capture_default_str();
  bench_cmd->add_option("--k", bench.k, "Neighbors per query")->capture_default_str();
  bench_cmd->add_option("--kind", bench.kind, "Index kind")
      ->check(CLI::IsMember({"flat", "hnsw", "ivf"}))
      ->capture_default_str();
  bench_cmd->add_option("--queries", bench.queries, "Query vectors")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Data and index seed")->capture_default_str();
  add_hnsw_flags(*bench_cmd, bench.hnsw);
  add_ivf_flags(*bench_cmd, bench.ivf);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front()) {
      err << "run '" << sub->get_name() << " --help' for usage\n";
    }
    return kExitUsage;
  }

  Io io{in, out, err};
  try {
    if (ingest_cmd->parsed()) {
      ingest.dim_given = dim_opt->count() > 0;
      if (ingest.embedder.name == "fixture" && !ingest.dim_given) ingest.embedder.dim = 2;
      return cmd_ingest(ingest, io);
    }
    if (query_cmd->parsed()) return cmd_query(query, io);
    if (demo_cmd->parsed()) return cmd_demo_shoes(io);
    if (chat_cmd->parsed()) {
      if (chat.home.empty()) chat.home = ".contextdb";
      return cmd_chat(chat, io);
    }
    if (bench_cmd->parsed()) {
      bench.hnsw.seed = bench.seed;
      bench.ivf.seed = bench.seed;
      return cmd_bench(bench, io);
    }
  } catch (const FilterParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace contextdb::cli
