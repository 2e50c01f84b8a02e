#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace msmgraph {

/// Offsets of k contiguous blocks covering [0, length). The first
/// (length mod k) blocks get one extra bit.
std::vector<std::size_t> block_partition(std::size_t length, std::size_t k);

/// A set of d distinct, 0-based block indices, kept sorted.
class MaskSet {
 public:
  MaskSet() = default;
  MaskSet(std::vector<std::size_t> blocks, std::size_t block_count);

  std::span<const std::size_t> blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  bool contains(std::size_t block) const;
  /// Bit b set iff block b is masked. Requires block_count <= 64.
  std::uint64_t bits() const;

 private:
  std::vector<std::size_t> blocks_;
};

/// n bit strings of equal length, packed row-major into 64-bit words.
/// Bit t of a row lives in word t / 64 at position t % 64. Padding bits
/// past `length` are always zero.
class BitStringPool {
 public:
  BitStringPool() = default;
  BitStringPool(std::size_t count, std::size_t length, std::size_t blocks = 1);

  /// Parses rows of '0'/'1' characters; spaces are ignored.
  static BitStringPool from_strings(std::span<const std::string> rows,
                                    std::size_t blocks = 1);

  std::size_t count() const { return count_; }
  std::size_t length() const { return length_; }
  std::size_t words_per_row() const { return words_per_row_; }
  std::size_t block_count() const { return block_bounds_.size() - 1; }
  std::span<const std::size_t> block_bounds() const { return block_bounds_; }

  std::span<const std::uint64_t> row(std::size_t i) const {
    return {storage_.data() + i * words_per_row_, words_per_row_};
  }
  std::span<std::uint64_t> mutable_row(std::size_t i) {
    return {storage_.data() + i * words_per_row_, words_per_row_};
  }
  std::span<const std::uint64_t> storage() const { return storage_; }

  bool bit(std::size_t i, std::size_t t) const;
  void set_bit(std::size_t i, std::size_t t, bool value);

  /// Re-partitions the rows into k blocks. Contents are unchanged.
  void repartition(std::size_t k);

  /// Throws std::out_of_range for bad indices.
  std::size_t hamming_distance(std::size_t i, std::size_t j) const;
  std::size_t hamming_distance_unchecked(std::size_t i, std::size_t j) const;

  std::string row_string(std::size_t i) const;

  bool operator==(const BitStringPool& other) const = default;

 private:
  std::size_t count_ = 0;
  std::size_t length_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> storage_;
  std::vector<std::size_t> block_bounds_{0};
};

/// Reads `width` (<= 64) bits starting at bit `offset`, LSB-first.
std::uint64_t extract_bits(std::span<const std::uint64_t> row,
                           std::size_t offset, std::size_t width);

/// Hamming distance between two packed rows of equal word count.
inline std::size_t packed_distance(std::span<const std::uint64_t> a,
                                   std::span<const std::uint64_t> b) {
  std::size_t total = 0;
  for (std::size_t w = 0; w < a.size(); ++w) {
    total += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
  }
  return total;
}

/// Precomputed extraction plan for the kept (unmasked) blocks of a pool
/// layout under one mask, cut into fixed-width chunks.
class MaskedKeyLayout {
 public:
  MaskedKeyLayout(const BitStringPool& pool, const MaskSet& mask,
                  std::size_t chunk_bits);

  std::size_t chunk_bits() const { return chunk_bits_; }
  std::size_t chunk_count() const { return chunk_count_; }
  std::size_t kept_bits() const { return kept_bits_; }

  /// Writes chunk_count() values into `out`.
  void extract(std::span<const std::uint64_t> row,
               std::span<std::uint32_t> out) const;

 private:
  struct Segment {
    std::size_t offset;
    std::size_t width;
  };
  std::vector<Segment> segments_;
  std::size_t chunk_bits_;
  std::size_t chunk_count_ = 0;
  std::size_t kept_bits_ = 0;
};

/// Chunk sequence of row i with the blocks listed in `mask` removed. Two
/// rows give equal sequences iff their masked strings are equal.
std::vector<std::uint32_t> masked_key_chunks(const BitStringPool& pool,
                                             std::size_t i,
                                             const MaskSet& mask,
                                             std::size_t chunk_bits);

inline constexpr std::size_t kMaxChunkBits = 24;
inline constexpr std::size_t kMaxBlocks = 64;

}  // namespace msmgraph
