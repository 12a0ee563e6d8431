#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "commands.hpp"
#include "contextdb/core/embedding.hpp"
#include "contextdb/core/error.hpp"
#include "contextdb/core/random.hpp"
#include "contextdb/index/flat_index.hpp"

namespace contextdb::cli {

namespace {

using Micros = std::chrono::duration<double, std::micro>;

double percentile(std::vector<double> samples, double p) {
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(samples.size())));
  return samples[std::max<std::size_t>(rank, 1) - 1];
}

}  // namespace

int cmd_bench(const BenchOptions& opts, Io& io) {
  if (opts.n < 100) throw InvalidArgumentError("--n must be at least 100");
  if (opts.k == 0 || opts.k > opts.n) throw InvalidArgumentError("--k must be in 1..n");
  if (opts.queries == 0) throw InvalidArgumentError("--queries must be at least 1");

  Rng rng(opts.seed);
  std::vector<Vector> data;
  data.reserve(opts.n);
  for (std::size_t i = 0; i < opts.n; ++i) data.push_back(random_unit_vector(rng, opts.dim));
  std::vector<Vector> queries;
  for (std::size_t i = 0; i < opts.queries; ++i) queries.push_back(random_unit_vector(rng, opts.dim));

  std::unique_ptr<VectorIndex> index;
  std::string params;
  const auto build_start = std::chrono::steady_clock::now();
  if (opts.kind == "hnsw") {
    index = std::make_unique<HnswIndex>(opts.hnsw);
    params = fmt::format("m={} ef_construction={} ef_search={}", opts.hnsw.m,
                         opts.hnsw.ef_construction, opts.hnsw.ef_search);
  } else if (opts.kind == "ivf") {
    auto ivf = std::make_unique<IvfIndex>(opts.ivf);
    ivf->train(data);
    const auto p = ivf->params();
    params = fmt::format("nlist={} nprobe={} kmeans_iters={}", p.nlist, p.nprobe, p.kmeans_iters);
    index = std::move(ivf);
  } else {
    index = std::make_unique<FlatIndex>();
    params = "exhaustive";
  }
  FlatIndex oracle;
  for (std::size_t i = 0; i < opts.n; ++i) {
    Document doc{fmt::format("v{:06}", i), {}, {}, data[i]};
    oracle.insert(doc);
    index->insert(std::move(doc));
  }
  const double build_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - build_start)
          .count();

  double recall_sum = 0.0;
  std::vector<double> latencies;
  latencies.reserve(queries.size());
  for (const auto& q : queries) {
    const auto start = std::chrono::steady_clock::now();
    const auto hits = index->search(q, opts.k);
    latencies.push_back(Micros(std::chrono::steady_clock::now() - start).count());

    std::unordered_set<std::string> truth;
    for (const auto& h : oracle.search(q, opts.k)) truth.insert(h.doc_id);
    std::size_t found = 0;
    for (const auto& h : hits) found += truth.count(h.doc_id);
    recall_sum += static_cast<double>(found) / static_cast<double>(opts.k);
  }
  const double recall = queries.empty() ? 0.0 : recall_sum / static_cast<double>(queries.size());

  io.out << fmt::format("kind={} n={} dim={} k={} queries={} seed={}\n", opts.kind, opts.n,
                        opts.dim, opts.k, opts.queries, opts.seed);
  io.out << "params " << params << '\n';
  io.out << fmt::format("recall@{}={:.4f}\n", opts.k, recall);
  io.out << fmt::format("latency_build_ms={:.1f}\n", build_ms);
  if (!latencies.empty()) {
    io.out << fmt::format("latency_p50_us={:.1f}\n", percentile(latencies, 0.50));
    io.out << fmt::format("latency_p95_us={:.1f}\n", percentile(latencies, 0.95));
  }
  return kExitOk;
}

}  // namespace contextdb::cli
