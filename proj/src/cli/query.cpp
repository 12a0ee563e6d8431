#include <ostream>

#include <fmt/format.h>

#include "commands.hpp"
#include "contextdb/core/filter.hpp"

namespace contextdb::cli {

int cmd_query(const QueryOptions& opts, Io& io) {
  // Parse the filter first so grammar mistakes fail fast with exit code 1.
  std::optional<FilterExpr> filter;
  if (!opts.filter.empty()) filter = FilterExpr::parse(opts.filter);

  const auto embedder = make_embedder(load_embedder_config(opts.index_dir));
  const auto index = load_index(opts.index_dir / kSnapshotFile);
  const Vector q = embedder->embed(opts.question);
  const auto hits = filter ? index->search_filtered(q, opts.k, *filter) : index->search(q, opts.k);

  for (const auto& hit : hits) {
    const auto doc = index->get(hit.doc_id);
    io.out << fmt::format("{}\t{}\tdistance={:.2f}\t{}\n", hit.rank, hit.doc_id, hit.distance,
                          doc ? format_metadata(doc->metadata) : "");
  }
  if (hits.empty()) io.out << "no matches\n";
  return kExitOk;
}

}  // namespace contextdb::cli
