#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "msmgraph/bitpool.hpp"
#include "msmgraph/lsh.hpp"
#include "msmgraph/msm.hpp"
#include "msmgraph/tuning.hpp"

namespace msmgraph {

struct Edge {
  std::uint32_t i;
  std::uint32_t j;
  double distance;

  bool operator==(const Edge&) const = default;
};

/// Union of per-replicate pair sets. replicate_of[x] is the 1-based
/// replicate that first produced pairs.pairs()[x].
struct CandidateSet {
  PairSet pairs;
  std::vector<std::uint32_t> replicate_of;
  std::vector<std::size_t> new_per_replicate;
};

struct StageTimings {
  double projection = 0.0;
  double sorting = 0.0;       ///< summed over workers
  double verification = 0.0;  ///< summed over workers
  double dedup = 0.0;
  double filtering = 0.0;
  double total = 0.0;
};

struct GraphStats {
  std::size_t candidate_count = 0;  ///< |E|
  std::size_t verified_count = 0;   ///< edges within epsilon
  std::size_t type1_count = 0;      ///< candidates rejected by the exact check
  std::vector<std::size_t> raw_per_replicate;
  std::vector<std::size_t> new_per_replicate;
  std::size_t group_candidates_checked = 0;
  std::size_t largest_group = 0;
  std::size_t oversized_groups = 0;
  bool streaming_dedup = false;
  std::optional<double> achieved_bound;
  StageTimings timings;
};

struct NeighborGraph {
  std::size_t node_count = 0;
  MsmParams params;
  /// Sorted by (i, j).
  std::vector<Edge> edges;
  /// 1-based replicate of first detection, aligned with edges.
  std::vector<std::uint32_t> edge_replicate;
  GraphStats stats;
};

struct BuildOptions {
  /// 0 means hardware concurrency. Output never depends on this.
  std::size_t threads = 0;
  std::size_t chunk_bits = 16;
  /// Center rows and scale them to unit norm before hashing.
  bool normalize = false;
  /// When Q pools would exceed this many bytes, pools are regenerated from
  /// the seed instead of being held. 0 disables the limit.
  std::size_t pool_memory_limit = 0;
  double oversized_group_fraction = 0.1;
};

/// Full pipeline: Q projections, exact Hamming enumeration per replicate,
/// first-witness merge, exact cosine filter.
NeighborGraph build_graph(const VectorDataset& data, const MsmParams& params,
                          const BuildOptions& options = {});

/// Baseline with d = 0 and a fixed replicate count; the length is the
/// longest one whose missing-edge bound stays within gamma.
NeighborGraph build_graph_lsh_only(const VectorDataset& data, double epsilon,
                                   double gamma, std::uint64_t seed = 0,
                                   const BuildOptions& options = {},
                                   const LshOnlyConfig& config = {});

/// Keeps pair (i, j) from replicate h only if it is within d in no earlier
/// replicate. The result is the plain union of the raw sets.
CandidateSet dedup_across_replicates(std::span<const BitStringPool> pools,
                                     std::span<const PairSet> raw,
                                     std::size_t d, std::size_t threads = 1);

/// Cosine-checks every candidate and keeps those within epsilon.
std::vector<Edge> filter_exact(const VectorDataset& data,
                               const CandidateSet& candidates, double epsilon,
                               std::size_t threads = 1,
                               std::vector<std::uint32_t>* kept_replicates = nullptr);

/// Exact Hamming join for callers that already hold binary codes. When the
/// pool's block count does not exceed d it is re-blocked to
/// min(length, max(2d, 1)); d >= length returns every pair.
PairSet build_graph_hamming(const BitStringPool& pool, std::size_t d,
                            const EnumerateOptions& options = {});

}  // namespace msmgraph
