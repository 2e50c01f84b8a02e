#pragma once

#include <cstddef>
#include <cstdint>
#include <compare>
#include <vector>

#include "msmgraph/bitpool.hpp"

namespace msmgraph {

struct IndexPair {
  std::uint32_t i;
  std::uint32_t j;
  auto operator<=>(const IndexPair&) const = default;
};

/// Unordered index pairs, stored sorted by (i, j) with i < j and no
/// duplicates.
class PairSet {
 public:
  PairSet() = default;
  /// Normalizes i < j, drops self-pairs, sorts and removes duplicates.
  static PairSet from_unsorted(std::vector<IndexPair> pairs);
  /// Takes ownership of an already sorted, duplicate-free list of i < j pairs.
  static PairSet from_sorted(std::vector<IndexPair> pairs);

  const std::vector<IndexPair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  bool contains(IndexPair p) const;
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  bool operator==(const PairSet&) const = default;

 private:
  std::vector<IndexPair> pairs_;
};

/// C(k, d), saturating at UINT64_MAX.
std::uint64_t mask_count(std::size_t k, std::size_t d);

/// All size-d subsets of {0, ..., k-1} in lexicographic order.
std::vector<MaskSet> enumerate_masks(std::size_t k, std::size_t d);

/// Reusable buffers for grouped_radix_sort, one per worker. The bucket
/// table has 2^chunk_bits entries and is all-zero between sorts.
struct SortScratch {
  SortScratch() = default;
  SortScratch(std::size_t count, std::size_t chunk_bits);
  void resize(std::size_t count, std::size_t chunk_bits);

  std::size_t chunk_bits = 0;
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> buffer;
  std::vector<std::uint32_t> keys;
  std::vector<std::uint32_t> bucket;
  std::vector<std::uint32_t> touched;
};

/// Row indices ordered so that equal masked keys are consecutive.
/// Group g spans order[group_starts[g] .. group_starts[g + 1]).
struct GroupedOrder {
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> group_starts;

  std::size_t group_count() const {
    return group_starts.empty() ? 0 : group_starts.size() - 1;
  }
  std::size_t group_size(std::size_t g) const {
    return group_starts[g + 1] - group_starts[g];
  }
};

/// Groups rows by their masked key using a chunked MSD radix pass that
/// visits only non-empty buckets. Group order is not lexicographic.
GroupedOrder grouped_radix_sort(const BitStringPool& pool, const MaskSet& mask,
                                std::size_t chunk_bits, SortScratch& scratch);

struct EnumerateOptions {
  std::size_t chunk_bits = 16;
  /// 0 means hardware concurrency.
  std::size_t threads = 1;
  /// A group larger than this fraction of n is counted as oversized.
  double oversized_group_fraction = 0.1;
};

struct EnumerateStats {
  std::size_t masks = 0;
  std::size_t candidates_checked = 0;
  std::size_t largest_group = 0;
  std::size_t oversized_groups = 0;
  double sort_seconds = 0.0;
  double verify_seconds = 0.0;
};

struct EnumerateResult {
  PairSet pairs;
  EnumerateStats stats;
};

/// Exact enumeration of all pairs with Hamming distance <= d, using the
/// pool's block layout (k = pool.block_count()). Requires d < k.
EnumerateResult enumerate_pairs(const BitStringPool& pool, std::size_t d,
                                const EnumerateOptions& options = {});

}  // namespace msmgraph
