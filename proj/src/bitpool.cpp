#include "msmgraph/bitpool.hpp"

#include <algorithm>
#include <stdexcept>

namespace msmgraph {

std::vector<std::size_t> block_partition(std::size_t length, std::size_t k) {
  if (k == 0 || k > length) {
    throw std::invalid_argument("block count must satisfy 1 <= k <= length (k=" +
                                std::to_string(k) + ", length=" +
                                std::to_string(length) + ")");
  }
  const std::size_t base = length / k;
  const std::size_t extra = length % k;
  std::vector<std::size_t> bounds(k + 1, 0);
  for (std::size_t b = 0; b < k; ++b) {
    bounds[b + 1] = bounds[b] + base + (b < extra ? 1 : 0);
  }
  return bounds;
}

MaskSet::MaskSet(std::vector<std::size_t> blocks, std::size_t block_count)
    : blocks_(std::move(blocks)) {
  std::sort(blocks_.begin(), blocks_.end());
  if (std::adjacent_find(blocks_.begin(), blocks_.end()) != blocks_.end()) {
    throw std::invalid_argument("mask contains a repeated block index");
  }
  if (!blocks_.empty() && blocks_.back() >= block_count) {
    throw std::invalid_argument("mask block index " +
                                std::to_string(blocks_.back()) +
                                " out of range for " +
                                std::to_string(block_count) + " blocks");
  }
}

bool MaskSet::contains(std::size_t block) const {
  return std::binary_search(blocks_.begin(), blocks_.end(), block);
}

std::uint64_t MaskSet::bits() const {
  std::uint64_t out = 0;
  for (std::size_t b : blocks_) {
    if (b >= kMaxBlocks) throw std::invalid_argument("mask bits need k <= 64");
    out |= std::uint64_t{1} << b;
  }
  return out;
}

BitStringPool::BitStringPool(std::size_t count, std::size_t length,
                             std::size_t blocks)
    : count_(count),
      length_(length),
      words_per_row_((length + 63) / 64),
      storage_(count * ((length + 63) / 64), 0) {
  if (length == 0) throw std::invalid_argument("bit strings must be non-empty");
  block_bounds_ = block_partition(length, blocks);
}

BitStringPool BitStringPool::from_strings(std::span<const std::string> rows,
                                          std::size_t blocks) {
  std::vector<std::string> cleaned;
  cleaned.reserve(rows.size());
  for (const auto& r : rows) {
    std::string bits;
    for (char c : r) {
      if (c == '0' || c == '1') {
        bits.push_back(c);
      } else if (c != ' ') {
        throw std::invalid_argument("bad character in bit string: '" +
                                    std::string(1, c) + "'");
      }
    }
    cleaned.push_back(std::move(bits));
  }
  if (cleaned.empty()) throw std::invalid_argument("no rows given");
  const std::size_t len = cleaned.front().size();
  BitStringPool pool(cleaned.size(), len, blocks);
  for (std::size_t i = 0; i < cleaned.size(); ++i) {
    if (cleaned[i].size() != len) {
      throw std::invalid_argument("row " + std::to_string(i) +
                                  " has a different length");
    }
    for (std::size_t t = 0; t < len; ++t) {
      if (cleaned[i][t] == '1') pool.set_bit(i, t, true);
    }
  }
  return pool;
}

bool BitStringPool::bit(std::size_t i, std::size_t t) const {
  return (row(i)[t >> 6] >> (t & 63)) & 1u;
}

void BitStringPool::set_bit(std::size_t i, std::size_t t, bool value) {
  if (i >= count_ || t >= length_) throw std::out_of_range("set_bit");
  auto& word = storage_[i * words_per_row_ + (t >> 6)];
  const std::uint64_t m = std::uint64_t{1} << (t & 63);
  word = value ? (word | m) : (word & ~m);
}

void BitStringPool::repartition(std::size_t k) {
  block_bounds_ = block_partition(length_, k);
}

std::size_t BitStringPool::hamming_distance(std::size_t i, std::size_t j) const {
  if (i >= count_ || j >= count_) {
    throw std::out_of_range("row index out of range (" + std::to_string(i) +
                            ", " + std::to_string(j) + ") for " +
                            std::to_string(count_) + " rows");
  }
  return hamming_distance_unchecked(i, j);
}

std::size_t BitStringPool::hamming_distance_unchecked(std::size_t i,
                                                      std::size_t j) const {
  return packed_distance(row(i), row(j));
}

std::string BitStringPool::row_string(std::size_t i) const {
  std::string s(length_, '0');
  for (std::size_t t = 0; t < length_; ++t) {
    if (bit(i, t)) s[t] = '1';
  }
  return s;
}

std::uint64_t extract_bits(std::span<const std::uint64_t> row,
                           std::size_t offset, std::size_t width) {
  if (width == 0) return 0;
  const std::size_t word = offset >> 6;
  const std::size_t shift = offset & 63;
  std::uint64_t value = row[word] >> shift;
  if (shift != 0 && shift + width > 64) {
    value |= row[word + 1] << (64 - shift);
  }
  if (width < 64) value &= (std::uint64_t{1} << width) - 1;
  return value;
}

MaskedKeyLayout::MaskedKeyLayout(const BitStringPool& pool, const MaskSet& mask,
                                 std::size_t chunk_bits)
    : chunk_bits_(chunk_bits) {
  if (chunk_bits == 0 || chunk_bits > kMaxChunkBits) {
    throw std::invalid_argument("chunk_bits must be in [1, 24]");
  }
  const auto bounds = pool.block_bounds();
  const std::size_t k = pool.block_count();
  if (!mask.blocks().empty() && mask.blocks().back() >= k) {
    throw std::invalid_argument("mask does not fit the pool's block layout");
  }
  for (std::size_t b = 0; b < k; ++b) {
    if (mask.contains(b)) continue;
    const std::size_t lo = bounds[b];
    const std::size_t hi = bounds[b + 1];
    if (!segments_.empty() &&
        segments_.back().offset + segments_.back().width == lo) {
      segments_.back().width += hi - lo;
    } else {
      segments_.push_back({lo, hi - lo});
    }
    kept_bits_ += hi - lo;
  }
  chunk_count_ = (kept_bits_ + chunk_bits - 1) / chunk_bits;
}

void MaskedKeyLayout::extract(std::span<const std::uint64_t> row,
                              std::span<std::uint32_t> out) const {
  // Bits are appended LSB-first into an accumulator and peeled off in
  // chunk_bits pieces; the final chunk is zero-padded.
  std::uint64_t acc = 0;
  std::size_t acc_bits = 0;
  std::size_t produced = 0;
  const std::uint64_t chunk_mask = (std::uint64_t{1} << chunk_bits_) - 1;
  for (const auto& seg : segments_) {
    std::size_t offset = seg.offset;
    std::size_t remaining = seg.width;
    while (remaining > 0) {
      const std::size_t room = 64 - acc_bits;
      const std::size_t take = std::min({remaining, room, std::size_t{32}});
      acc |= extract_bits(row, offset, take) << acc_bits;
      acc_bits += take;
      offset += take;
      remaining -= take;
      while (acc_bits >= chunk_bits_) {
        out[produced++] = static_cast<std::uint32_t>(acc & chunk_mask);
        acc >>= chunk_bits_;
        acc_bits -= chunk_bits_;
      }
    }
  }
  if (acc_bits > 0) out[produced++] = static_cast<std::uint32_t>(acc);
}

std::vector<std::uint32_t> masked_key_chunks(const BitStringPool& pool,
                                             std::size_t i,
                                             const MaskSet& mask,
                                             std::size_t chunk_bits) {
  if (i >= pool.count()) throw std::out_of_range("row index out of range");
  const MaskedKeyLayout layout(pool, mask, chunk_bits);
  std::vector<std::uint32_t> out(layout.chunk_count(), 0);
  layout.extract(pool.row(i), out);
  return out;
}

}  // namespace msmgraph
