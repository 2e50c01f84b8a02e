#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "msmgraph/pipeline.hpp"

namespace msmgraph {

inline constexpr std::size_t kDefaultOracleLimit = 50000;

/// Every pair within epsilon by exhaustive comparison, sorted by (i, j).
/// Throws std::length_error when n exceeds `limit`.
std::vector<Edge> brute_force_cosine(const VectorDataset& data, double epsilon,
                                     std::size_t limit = kDefaultOracleLimit,
                                     std::size_t threads = 1);

/// Every pair with Hamming distance <= d by exhaustive comparison.
PairSet brute_force_hamming(const BitStringPool& pool, std::size_t d,
                            std::size_t limit = kDefaultOracleLimit);

struct ErrorReport {
  std::size_t true_edge_count = 0;        ///< |E*|
  std::size_t missing_count = 0;          ///< |F2|
  std::size_t false_candidate_count = 0;  ///< |F1|
  double missing_ratio = 0.0;             ///< |F2| / |E*|, 0 when E* is empty
  /// found_per_replicate[q - 1]: true edges whose first witness was q.
  std::vector<std::size_t> found_per_replicate;
};

ErrorReport measure_errors(std::span<const IndexPair> approx,
                           std::span<const Edge> exact);
ErrorReport measure_errors(const CandidateSet& approx, std::span<const Edge> exact);
ErrorReport measure_errors(const NeighborGraph& approx, std::span<const Edge> exact);

std::vector<IndexPair> edge_pairs(std::span<const Edge> edges);

}  // namespace msmgraph
