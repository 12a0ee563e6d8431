#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "contextdb/core/embedding.hpp"
#include "contextdb/index/vector_index.hpp"

namespace contextdb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Runs the `contextdb` command line. `args` excludes the program name.
/// Returns 0 on success, 1 for usage or parse errors, 2 for data or
/// storage errors.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

/// What `ingest` records next to the snapshot so `query` and `chat` can
/// embed questions the same way.
struct EmbedderConfig {
  std::string name = "hash";  // "hash" or "fixture"
  std::size_t dim = 64;
  std::uint64_t seed = 42;
};

std::unique_ptr<EmbeddingProvider> make_embedder(const EmbedderConfig& config);
void save_embedder_config(const std::filesystem::path& index_dir, const EmbedderConfig& config);
EmbedderConfig load_embedder_config(const std::filesystem::path& index_dir);

inline const std::filesystem::path kSnapshotFile = "index.snap";
inline const std::filesystem::path kEmbedderFile = "embedder.json";

}  // namespace contextdb::cli
