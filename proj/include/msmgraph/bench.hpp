#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "msmgraph/pipeline.hpp"

namespace msmgraph {

struct BenchConfig {
  double gamma = 1e-6;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::size_t sample_pairs = kDefaultSamplePairs;
  bool normalize = false;
  BuildOptions build;
  AutoConfig tuning;
};

struct BenchRow {
  std::size_t n = 0;
  double epsilon = 0.0;
  MsmParams params;
  bool cap_binding = false;
  double achieved_bound = 0.0;
  std::size_t edges = 0;
  std::size_t candidates = 0;
  double estimate_seconds = 0.0;
  double wall_seconds = 0.0;  ///< estimation plus construction
  double seconds_per_10k_pairs = 0.0;
  StageTimings timings;
};

/// Builds the graph of every prefix of `data` for every radius and times it.
std::vector<BenchRow> run_bench(const VectorDataset& data,
                                std::span<const double> epsilons,
                                std::span<const std::size_t> sizes,
                                const BenchConfig& config = {});

/// Tab-separated table with a header row.
void write_bench_table(std::ostream& out, std::span<const BenchRow> rows);

}  // namespace msmgraph
