#include "msmgraph/msm.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <string>

#include "parallel.hpp"

namespace msmgraph {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct BlockWord {
  std::size_t word;
  std::uint64_t bits;
};

// For each block, the (word, bit-mask) pieces it covers.
std::vector<std::vector<BlockWord>> block_word_masks(const BitStringPool& pool) {
  const auto bounds = pool.block_bounds();
  std::vector<std::vector<BlockWord>> out(pool.block_count());
  for (std::size_t b = 0; b < pool.block_count(); ++b) {
    std::size_t t = bounds[b];
    while (t < bounds[b + 1]) {
      const std::size_t word = t >> 6;
      const std::size_t end = std::min(bounds[b + 1], (word + 1) * 64);
      const std::size_t lo = t & 63;
      const std::size_t width = end - t;
      const std::uint64_t m =
          width == 64 ? ~std::uint64_t{0}
                      : (((std::uint64_t{1} << width) - 1) << lo);
      out[b].push_back({word, m});
      t = end;
    }
  }
  return out;
}

std::uint64_t differing_blocks(std::span<const std::uint64_t> a,
                               std::span<const std::uint64_t> b,
                               const std::vector<std::vector<BlockWord>>& blocks) {
  std::uint64_t out = 0;
  for (std::size_t blk = 0; blk < blocks.size(); ++blk) {
    for (const auto& piece : blocks[blk]) {
      if ((a[piece.word] ^ b[piece.word]) & piece.bits) {
        out |= std::uint64_t{1} << blk;
        break;
      }
    }
  }
  return out;
}

}  // namespace

PairSet PairSet::from_unsorted(std::vector<IndexPair> pairs) {
  for (auto& p : pairs) {
    if (p.i > p.j) std::swap(p.i, p.j);
  }
  std::erase_if(pairs, [](const IndexPair& p) { return p.i == p.j; });
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  PairSet out;
  out.pairs_ = std::move(pairs);
  return out;
}

PairSet PairSet::from_sorted(std::vector<IndexPair> pairs) {
  PairSet out;
  out.pairs_ = std::move(pairs);
  return out;
}

bool PairSet::contains(IndexPair p) const {
  if (p.i > p.j) std::swap(p.i, p.j);
  return std::binary_search(pairs_.begin(), pairs_.end(), p);
}

std::uint64_t mask_count(std::size_t k, std::size_t d) {
  if (d > k) return 0;
  d = std::min(d, k - d);
  std::uint64_t result = 1;
  for (std::size_t r = 1; r <= d; ++r) {
    // result * (k - d + r) / r stays integral at every step.
    const std::uint64_t num = k - d + r;
    const unsigned __int128 next = static_cast<unsigned __int128>(result) * num / r;
    if (next > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = static_cast<std::uint64_t>(next);
  }
  return result;
}

std::vector<MaskSet> enumerate_masks(std::size_t k, std::size_t d) {
  if (d > k) throw std::invalid_argument("mask size exceeds block count");
  std::vector<MaskSet> masks;
  std::vector<std::size_t> current(d);
  for (std::size_t i = 0; i < d; ++i) current[i] = i;
  for (;;) {
    masks.emplace_back(current, k);
    // Advance to the next combination in lexicographic order.
    std::size_t pos = d;
    while (pos > 0 && current[pos - 1] == k - d + pos - 1) --pos;
    if (pos == 0) break;
    ++current[pos - 1];
    for (std::size_t i = pos; i < d; ++i) current[i] = current[i - 1] + 1;
  }
  return masks;
}

SortScratch::SortScratch(std::size_t count, std::size_t chunk_bits) {
  resize(count, chunk_bits);
}

void SortScratch::resize(std::size_t count, std::size_t bits) {
  if (bits == 0 || bits > kMaxChunkBits) {
    throw std::invalid_argument("chunk_bits must be in [1, 24]");
  }
  if (bits != chunk_bits) {
    chunk_bits = bits;
    bucket.assign(std::size_t{1} << bits, 0);
  }
  order.resize(count);
  buffer.resize(count);
}

GroupedOrder grouped_radix_sort(const BitStringPool& pool, const MaskSet& mask,
                                std::size_t chunk_bits, SortScratch& scratch) {
  const std::size_t n = pool.count();
  if (scratch.chunk_bits != chunk_bits || scratch.order.size() != n) {
    throw std::invalid_argument("sort scratch is not sized for this pool");
  }
  const MaskedKeyLayout layout(pool, mask, chunk_bits);
  const std::size_t chunks = layout.chunk_count();

  scratch.keys.resize(n * chunks);
  for (std::size_t i = 0; i < n; ++i) {
    layout.extract(pool.row(i),
                   std::span(scratch.keys.data() + i * chunks, chunks));
  }
  auto& order = scratch.order;
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);

  struct Range {
    std::uint32_t begin;
    std::uint32_t end;
  };
  std::vector<Range> groups;
  if (n > 0) groups.push_back({0, static_cast<std::uint32_t>(n)});
  std::vector<Range> refined;
  auto& bucket = scratch.bucket;
  auto& touched = scratch.touched;
  const std::uint32_t* keys = scratch.keys.data();

  for (std::size_t c = 0; c < chunks; ++c) {
    refined.clear();
    bool any_split_candidate = false;
    for (const Range g : groups) {
      if (g.end - g.begin < 2) {
        refined.push_back(g);
        continue;
      }
      touched.clear();
      for (std::uint32_t x = g.begin; x < g.end; ++x) {
        const std::uint32_t v = keys[order[x] * chunks + c];
        if (bucket[v]++ == 0) touched.push_back(v);
      }
      if (touched.size() == 1) {
        bucket[touched.front()] = 0;
        refined.push_back(g);
        any_split_candidate = true;
        continue;
      }
      std::uint32_t pos = g.begin;
      for (const std::uint32_t v : touched) {
        const std::uint32_t count = bucket[v];
        bucket[v] = pos;
        refined.push_back({pos, pos + count});
        if (count > 1) any_split_candidate = true;
        pos += count;
      }
      for (std::uint32_t x = g.begin; x < g.end; ++x) {
        const std::uint32_t r = order[x];
        scratch.buffer[bucket[keys[r * chunks + c]]++] = r;
      }
      std::copy(scratch.buffer.begin() + g.begin,
                scratch.buffer.begin() + g.end, order.begin() + g.begin);
      for (const std::uint32_t v : touched) bucket[v] = 0;
    }
    groups.swap(refined);
    if (!any_split_candidate) break;
  }

  GroupedOrder out;
  out.order.assign(order.begin(), order.end());
  out.group_starts.reserve(groups.size() + 1);
  for (const Range g : groups) out.group_starts.push_back(g.begin);
  out.group_starts.push_back(static_cast<std::uint32_t>(n));
  return out;
}

EnumerateResult enumerate_pairs(const BitStringPool& pool, std::size_t d,
                                const EnumerateOptions& options) {
  const std::size_t n = pool.count();
  const std::size_t k = pool.block_count();
  if (n == 0) throw std::invalid_argument("enumerate_pairs needs a non-empty pool");
  if (d >= k) {
    throw std::invalid_argument("mismatch budget d=" + std::to_string(d) +
                                " must be smaller than block count k=" +
                                std::to_string(k));
  }
  if (k > kMaxBlocks) throw std::invalid_argument("block count above 64");
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("pool too large for 32-bit row ids");
  }

  const auto masks = enumerate_masks(k, d);
  std::vector<std::uint64_t> mask_bits;
  mask_bits.reserve(masks.size());
  for (const auto& m : masks) mask_bits.push_back(m.bits());
  const auto blocks = block_word_masks(pool);
  const std::size_t oversize_limit = static_cast<std::size_t>(
      options.oversized_group_fraction * static_cast<double>(n));

  struct MaskOutput {
    std::vector<IndexPair> pairs;
    EnumerateStats stats;
  };
  std::vector<MaskOutput> outputs(masks.size());
  const std::size_t threads =
      std::min(detail::resolve_threads(options.threads), masks.size());
  std::vector<SortScratch> scratch(std::max<std::size_t>(threads, 1));

  detail::parallel_for(masks.size(), threads, [&](std::size_t h, std::size_t w) {
    auto& local = outputs[h];
    auto& buf = scratch[w];
    if (buf.order.size() != n || buf.chunk_bits != options.chunk_bits) {
      buf.resize(n, options.chunk_bits);
    }
    auto start = Clock::now();
    const GroupedOrder grouped =
        grouped_radix_sort(pool, masks[h], options.chunk_bits, buf);
    local.stats.sort_seconds = seconds_since(start);

    start = Clock::now();
    for (std::size_t g = 0; g < grouped.group_count(); ++g) {
      const std::size_t size = grouped.group_size(g);
      local.stats.largest_group = std::max(local.stats.largest_group, size);
      if (size > oversize_limit && size > 1) ++local.stats.oversized_groups;
      if (size < 2) continue;
      const std::uint32_t* members = grouped.order.data() + grouped.group_starts[g];
      for (std::size_t a = 0; a + 1 < size; ++a) {
        const auto row_a = pool.row(members[a]);
        for (std::size_t b = a + 1; b < size; ++b) {
          ++local.stats.candidates_checked;
          const auto row_b = pool.row(members[b]);
          if (packed_distance(row_a, row_b) > d) continue;
          // Emit only under the first mask whose masked keys coincide.
          const std::uint64_t diff = differing_blocks(row_a, row_b, blocks);
          bool seen_earlier = false;
          for (std::size_t e = 0; e < h; ++e) {
            if ((diff & ~mask_bits[e]) == 0) {
              seen_earlier = true;
              break;
            }
          }
          if (seen_earlier) continue;
          const auto x = members[a];
          const auto y = members[b];
          local.pairs.push_back(x < y ? IndexPair{x, y} : IndexPair{y, x});
        }
      }
    }
    local.stats.verify_seconds = seconds_since(start);
  });

  EnumerateResult result;
  std::size_t total = 0;
  for (const auto& o : outputs) total += o.pairs.size();
  std::vector<IndexPair> merged;
  merged.reserve(total);
  for (auto& o : outputs) {
    merged.insert(merged.end(), o.pairs.begin(), o.pairs.end());
    result.stats.candidates_checked += o.stats.candidates_checked;
    result.stats.largest_group =
        std::max(result.stats.largest_group, o.stats.largest_group);
    result.stats.oversized_groups += o.stats.oversized_groups;
    result.stats.sort_seconds += o.stats.sort_seconds;
    result.stats.verify_seconds += o.stats.verify_seconds;
  }
  std::sort(merged.begin(), merged.end());
  result.pairs = PairSet::from_sorted(std::move(merged));
  result.stats.masks = masks.size();
  return result;
}

}  // namespace msmgraph
