#include <fstream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "contextdb/core/error.hpp"
#include "contextdb/index/flat_index.hpp"
#include "contextdb/store/meta_json.hpp"

namespace contextdb::cli {

namespace {

struct CatalogRecord {
  std::string id;
  std::string text;
  Metadata metadata;
  std::optional<std::vector<float>> embedding;
};

// Throws InvalidArgumentError describing the first problem in the line.
CatalogRecord parse_record(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgumentError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgumentError("record must be a JSON object");

  CatalogRecord rec;
  const auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw InvalidArgumentError("\"id\" must be a nonempty string");
  }
  rec.id = id->get<std::string>();
  const auto text = j.find("text");
  if (text == j.end() || !text->is_string()) throw InvalidArgumentError("\"text\" must be a string");
  rec.text = text->get<std::string>();
  if (const auto meta = j.find("metadata"); meta != j.end()) rec.metadata = metadata_from_json(*meta);
  if (const auto emb = j.find("embedding"); emb != j.end() && !emb->is_null()) {
    if (!emb->is_array() || emb->empty()) {
      throw InvalidArgumentError("\"embedding\" must be a nonempty array of numbers");
    }
    std::vector<float> values;
    for (const auto& v : *emb) {
      if (!v.is_number()) throw InvalidArgumentError("\"embedding\" must contain only numbers");
      values.push_back(v.get<float>());
    }
    rec.embedding = std::move(values);
  }
  return rec;
}

std::unique_ptr<VectorIndex> build_index(const std::string& kind, std::vector<Document> docs,
                                         std::uint64_t seed) {
  std::unique_ptr<VectorIndex> index;
  if (kind == "hnsw") {
    HnswParams params;
    params.seed = seed;
    index = std::make_unique<HnswIndex>(params);
  } else if (kind == "ivf") {
    IvfParams params;
    params.seed = seed;
    auto ivf = std::make_unique<IvfIndex>(params);
    std::vector<Vector> training;
    training.reserve(docs.size());
    for (const auto& d : docs) training.push_back(d.embedding);
    ivf->train(training);
    index = std::move(ivf);
  } else {
    index = std::make_unique<FlatIndex>();
  }
  for (auto& d : docs) index->insert(std::move(d));
  return index;
}

}  // namespace

int cmd_ingest(const IngestOptions& opts, Io& io) {
  const auto embedder = make_embedder(opts.embedder);
  std::ifstream in(opts.catalog);
  if (!in) throw StorageError("cannot read catalog '" + opts.catalog.string() + "'");

  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  std::size_t skipped = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      CatalogRecord rec = parse_record(line);
      Document doc{std::move(rec.id), std::move(rec.text), std::move(rec.metadata),
                   rec.embedding ? Vector(std::move(*rec.embedding)) : embedder->embed(rec.text)};
      validate_document(doc);
      if (doc.embedding.dim() != embedder->dim()) {
        throw DimensionMismatchError(embedder->dim(), doc.embedding.dim());
      }
      docs.push_back(std::move(doc));
    } catch (const DimensionMismatchError& e) {
      throw StorageError(opts.catalog.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      io.err << "warning: " << opts.catalog.string() << ":" << line_no << ": skipped: " << e.what()
             << '\n';
      ++skipped;
    }
  }
  if (docs.empty()) {
    throw StorageError("catalog '" + opts.catalog.string() + "' has zero valid records");
  }

  const std::size_t count = docs.size();
  const auto index = build_index(opts.kind, std::move(docs), opts.embedder.seed);
  std::error_code ec;
  std::filesystem::create_directories(opts.index_dir, ec);
  if (ec) throw StorageError("cannot create '" + opts.index_dir.string() + "': " + ec.message());
  index->save(opts.index_dir / kSnapshotFile);
  save_embedder_config(opts.index_dir, opts.embedder);

  io.out << "ingested " << count << " records into " << opts.index_dir.string()
         << " (kind=" << opts.kind << ", embedder=" << embedder->name()
         << ", dim=" << embedder->dim() << ")";
  if (skipped > 0) io.out << "; skipped " << skipped << " malformed line(s)";
  io.out << '\n';
  return kExitOk;
}

}  // namespace contextdb::cli
