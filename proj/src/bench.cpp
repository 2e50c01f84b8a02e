#include "msmgraph/bench.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace msmgraph {

std::vector<BenchRow> run_bench(const VectorDataset& data,
                                std::span<const double> epsilons,
                                std::span<const std::size_t> sizes,
                                const BenchConfig& config) {
  using Clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  for (const std::size_t size : sizes) {
    if (size > data.count()) {
      throw std::invalid_argument("bench size " + std::to_string(size) +
                                  " exceeds the dataset's " +
                                  std::to_string(data.count()) + " rows");
    }
    VectorDataset prefix = data.prefix(size);
    if (config.normalize) prefix = center_and_normalize(prefix);
    for (const double eps : epsilons) {
      BenchRow row;
      row.n = size;
      row.epsilon = eps;
      const auto start = Clock::now();
      const OutputEstimate est =
          estimate_output_size(prefix, eps, config.sample_pairs, config.seed);
      ParamChoice choice = auto_params(size, eps, config.gamma, est, config.tuning);
      choice.params.seed = config.seed;
      row.estimate_seconds =
          std::chrono::duration<double>(Clock::now() - start).count();
      BuildOptions options = config.build;
      options.threads = config.threads;
      options.normalize = false;
      const NeighborGraph graph = build_graph(prefix, choice.params, options);
      row.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
      row.params = choice.params;
      row.cap_binding = choice.cap_binding;
      row.achieved_bound = choice.achieved_bound;
      row.edges = graph.edges.size();
      row.candidates = graph.stats.candidate_count;
      row.timings = graph.stats.timings;
      row.seconds_per_10k_pairs =
          row.wall_seconds * 1e4 / static_cast<double>(std::max<std::size_t>(row.edges, 1));
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bench_table(std::ostream& out, std::span<const BenchRow> rows) {
  out << "n\tepsilon\tlength\tmismatch\tblocks\treplicates\tbound\tedges\tcandidates"
         "\twall_s\ts_per_1e4_pairs\testimate_s\tprojection_s\tsorting_s"
         "\tverification_s\tdedup_s\tfiltering_s\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%zu\t%.6g\t%zu\t%zu\t%zu\t%zu\t%.3e\t%zu\t%zu\t%.4f\t%.6f\t%.4f"
                  "\t%.4f\t%.4f\t%.4f\t%.4f\t%.4f\n",
                  r.n, r.epsilon, r.params.length, r.params.mismatch, r.params.blocks,
                  r.params.replicates, r.achieved_bound, r.edges, r.candidates,
                  r.wall_seconds, r.seconds_per_10k_pairs, r.estimate_seconds,
                  r.timings.projection, r.timings.sorting, r.timings.verification,
                  r.timings.dedup, r.timings.filtering);
    out << buf;
  }
}

}  // namespace msmgraph
