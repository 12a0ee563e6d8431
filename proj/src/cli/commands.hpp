#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "contextdb/cli/cli.hpp"
#include "contextdb/core/meta_value.hpp"
#include "contextdb/index/hnsw_index.hpp"
#include "contextdb/index/ivf_index.hpp"

namespace contextdb::cli {

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

struct IngestOptions {
  std::filesystem::path catalog;
  std::filesystem::path index_dir;
  EmbedderConfig embedder;
  bool dim_given = false;
  std::string kind = "flat";
};

struct QueryOptions {
  std::filesystem::path index_dir;
  std::string question;
  std::size_t k = 5;
  std::string filter;
};

struct ChatOptions {
  std::filesystem::path home;
  std::filesystem::path index_dir;  // empty: <home>/index
  std::string session;
  std::string user;
  std::size_t k = 3;
  std::string filter;
  bool verbose = false;
  std::size_t history_window = 10;
  std::size_t cache_capacity = 1024;
  std::int64_t cache_ttl_ms = 300000;
  std::string template_name = "default";
  std::filesystem::path profiles_seed;
  bool store_questions = false;
};

struct BenchOptions {
  std::size_t n = 10000;
  std::size_t dim = 64;
  std::size_t k = 10;
  std::size_t queries = 100;
  std::string kind = "hnsw";
  std::uint64_t seed = 42;
  HnswParams hnsw;
  IvfParams ivf;
};

int cmd_ingest(const IngestOptions& opts, Io& io);
int cmd_query(const QueryOptions& opts, Io& io);
int cmd_demo_shoes(Io& io);
int cmd_chat(const ChatOptions& opts, Io& io);
int cmd_bench(const BenchOptions& opts, Io& io);

/// `key=value` pairs in key order; strings are double-quoted.
std::string format_metadata(const Metadata& meta);

}  // namespace contextdb::cli
