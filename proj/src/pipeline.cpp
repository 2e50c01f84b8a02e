#include "msmgraph/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "msmgraph/errors.hpp"
#include "parallel.hpp"

namespace msmgraph {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct TaggedPair {
  IndexPair pair;
  std::uint32_t replicate;
};

struct TaggedEdge {
  Edge edge;
  std::uint32_t replicate;
};

CandidateSet assemble_candidates(std::vector<std::vector<IndexPair>>& survivors) {
  CandidateSet out;
  out.new_per_replicate.resize(survivors.size());
  std::vector<TaggedPair> tagged;
  std::size_t total = 0;
  for (const auto& s : survivors) total += s.size();
  tagged.reserve(total);
  for (std::size_t h = 0; h < survivors.size(); ++h) {
    for (const auto& p : survivors[h]) {
      tagged.push_back({p, static_cast<std::uint32_t>(h + 1)});
    }
    survivors[h].clear();
    survivors[h].shrink_to_fit();
  }
  std::sort(tagged.begin(), tagged.end(), [](const TaggedPair& a, const TaggedPair& b) {
    return a.pair != b.pair ? a.pair < b.pair : a.replicate < b.replicate;
  });
  std::vector<IndexPair> pairs;
  pairs.reserve(tagged.size());
  out.replicate_of.reserve(tagged.size());
  for (const auto& t : tagged) {
    if (!pairs.empty() && pairs.back() == t.pair) continue;
    pairs.push_back(t.pair);
    out.replicate_of.push_back(t.replicate);
    ++out.new_per_replicate[t.replicate - 1];
  }
  out.pairs = PairSet::from_sorted(std::move(pairs));
  return out;
}

}  // namespace

CandidateSet dedup_across_replicates(std::span<const BitStringPool> pools,
                                     std::span<const PairSet> raw, std::size_t d,
                                     std::size_t threads) {
  if (pools.size() != raw.size()) {
    throw std::invalid_argument("dedup needs one pool per raw pair set");
  }
  for (const auto& pool : pools) {
    if (pool.count() != pools.front().count() ||
        pool.length() != pools.front().length()) {
      throw std::invalid_argument("replicate pools differ in shape");
    }
  }
  std::vector<std::vector<IndexPair>> survivors(raw.size());
  detail::parallel_for(raw.size(), threads, [&](std::size_t h, std::size_t) {
    auto& keep = survivors[h];
    keep.reserve(raw[h].size());
    for (const auto& p : raw[h]) {
      bool earlier = false;
      for (std::size_t g = 0; g < h; ++g) {
        if (pools[g].hamming_distance(p.i, p.j) <= d) {
          earlier = true;
          break;
        }
      }
      if (!earlier) keep.push_back(p);
    }
  });
  return assemble_candidates(survivors);
}

std::vector<Edge> filter_exact(const VectorDataset& data,
                               const CandidateSet& candidates, double epsilon,
                               std::size_t threads,
                               std::vector<std::uint32_t>* kept_replicates) {
  const auto& pairs = candidates.pairs.pairs();
  for (const auto& p : pairs) {
    if (p.j >= data.count()) throw std::out_of_range("candidate index out of range");
  }
  std::vector<double> sq_norms(data.count());
  for (std::size_t i = 0; i < data.count(); ++i) {
    sq_norms[i] = dot(data.row(i), data.row(i));
  }

  constexpr std::size_t kPairsPerTask = 1 << 14;
  const std::size_t tasks = (pairs.size() + kPairsPerTask - 1) / kPairsPerTask;
  std::vector<std::vector<Edge>> parts(tasks);
  std::vector<std::vector<std::uint32_t>> reps(tasks);
  const bool tagged = candidates.replicate_of.size() == pairs.size();
  detail::parallel_for(tasks, threads, [&](std::size_t t, std::size_t) {
    const std::size_t lo = t * kPairsPerTask;
    const std::size_t hi = std::min(pairs.size(), lo + kPairsPerTask);
    for (std::size_t x = lo; x < hi; ++x) {
      const auto [i, j] = pairs[x];
      if (sq_norms[i] == 0.0 || sq_norms[j] == 0.0) {
        throw DataError("zero-norm vector in candidate pair");
      }
      const double dist =
          cosine_distance_from(dot(data.row(i), data.row(j)), sq_norms[i], sq_norms[j]);
      if (dist <= epsilon) {
        parts[t].push_back({i, j, dist});
        reps[t].push_back(tagged ? candidates.replicate_of[x] : 0);
      }
    }
  });
  std::vector<Edge> edges;
  for (auto& part : parts) edges.insert(edges.end(), part.begin(), part.end());
  if (kept_replicates) {
    kept_replicates->clear();
    for (auto& r : reps) kept_replicates->insert(kept_replicates->end(), r.begin(), r.end());
  }
  return edges;
}

NeighborGraph build_graph(const VectorDataset& input, const MsmParams& params,
                          const BuildOptions& options) {
  const auto total_start = Clock::now();
  params.validate();
  if (input.count() == 0) throw DataError("empty dataset");
  if (input.count() > std::numeric_limits<std::uint32_t>::max()) {
    throw DataError("dataset too large for 32-bit row ids");
  }
  VectorDataset normalized;
  if (options.normalize) normalized = center_and_normalize(input);
  const VectorDataset& data = options.normalize ? normalized : input;
  require_positive_norms(data);

  const std::size_t n = data.count();
  const std::size_t q_count = params.replicates;
  const std::size_t threads = detail::resolve_threads(options.threads);
  const std::size_t outer = std::min(threads, q_count);
  const std::size_t inner = std::max<std::size_t>(1, threads / outer);

  NeighborGraph graph;
  graph.node_count = n;
  graph.params = params;
  GraphStats& stats = graph.stats;

  const std::size_t pool_bytes = n * ((params.length + 63) / 64) * 8;
  const bool keep_pools = options.pool_memory_limit == 0 ||
                          q_count * pool_bytes <= options.pool_memory_limit;
  stats.streaming_dedup = !keep_pools;

  auto make_pool = [&](std::size_t q, std::size_t workers) {
    BitStringPool pool = project(data, {params.length, params.seed, q + 1}, workers);
    pool.repartition(params.blocks);
    return pool;
  };

  const EnumerateOptions enum_options{options.chunk_bits, inner,
                                      options.oversized_group_fraction};
  std::vector<EnumerateStats> enum_stats(q_count);
  std::vector<double> projection_seconds(q_count, 0.0);
  std::vector<std::size_t> raw_sizes(q_count, 0);
  std::vector<std::size_t> new_sizes(q_count, 0);
  std::vector<double> dedup_seconds(q_count, 0.0);
  std::vector<double> filter_seconds(q_count, 0.0);
  std::vector<std::vector<Edge>> replicate_edges(q_count);

  // Exact check of one replicate's first-witness survivors.
  auto verify = [&](std::size_t q, std::vector<IndexPair>&& survivors) {
    const auto start = Clock::now();
    CandidateSet c;
    c.pairs = PairSet::from_sorted(std::move(survivors));
    replicate_edges[q] = filter_exact(data, c, params.epsilon, inner);
    filter_seconds[q] = seconds_since(start);
  };

  if (keep_pools) {
    // Pools are small next to the pair sets, so hold all of them and run
    // enumerate, dedup and filter per replicate. Only the replicates in
    // flight keep their raw pairs.
    std::vector<BitStringPool> pools(q_count);
    detail::parallel_for(q_count, outer, [&](std::size_t q, std::size_t) {
      const auto start = Clock::now();
      pools[q] = make_pool(q, inner);
      projection_seconds[q] = seconds_since(start);
    });
    detail::parallel_for(q_count, outer, [&](std::size_t q, std::size_t) {
      EnumerateResult result = enumerate_pairs(pools[q], params.mismatch, enum_options);
      enum_stats[q] = result.stats;
      raw_sizes[q] = result.pairs.size();
      const auto start = Clock::now();
      std::vector<IndexPair> keep;
      keep.reserve(result.pairs.size());
      for (const auto& p : result.pairs) {
        bool earlier = false;
        for (std::size_t g = 0; g < q && !earlier; ++g) {
          earlier = pools[g].hamming_distance_unchecked(p.i, p.j) <= params.mismatch;
        }
        if (!earlier) keep.push_back(p);
      }
      result.pairs = PairSet();
      new_sizes[q] = keep.size();
      dedup_seconds[q] = seconds_since(start);
      verify(q, std::move(keep));
    });
  } else {
    std::vector<std::vector<IndexPair>> survivors(q_count);
    detail::parallel_for(q_count, outer, [&](std::size_t q, std::size_t) {
      const auto start = Clock::now();
      BitStringPool pool = make_pool(q, inner);
      projection_seconds[q] = seconds_since(start);
      EnumerateResult result = enumerate_pairs(pool, params.mismatch, enum_options);
      enum_stats[q] = result.stats;
      raw_sizes[q] = result.pairs.size();
      survivors[q].assign(result.pairs.begin(), result.pairs.end());
    });
    // Regenerate one pool at a time and strike pairs already caught by it
    // from every later replicate.
    for (std::size_t g = 0; g + 1 < q_count; ++g) {
      const auto regen_start = Clock::now();
      const BitStringPool pool = make_pool(g, threads);
      stats.timings.projection += seconds_since(regen_start);
      const auto start = Clock::now();
      detail::parallel_for(q_count - g - 1, threads, [&](std::size_t x, std::size_t) {
        std::erase_if(survivors[g + 1 + x], [&](const IndexPair& p) {
          return pool.hamming_distance_unchecked(p.i, p.j) <= params.mismatch;
        });
      });
      dedup_seconds[g] += seconds_since(start);
    }
    detail::parallel_for(q_count, outer, [&](std::size_t q, std::size_t) {
      new_sizes[q] = survivors[q].size();
      verify(q, std::move(survivors[q]));
    });
  }

  for (std::size_t q = 0; q < q_count; ++q) {
    stats.raw_per_replicate.push_back(raw_sizes[q]);
    stats.new_per_replicate.push_back(new_sizes[q]);
    stats.candidate_count += new_sizes[q];
    stats.group_candidates_checked += enum_stats[q].candidates_checked;
    stats.largest_group = std::max(stats.largest_group, enum_stats[q].largest_group);
    stats.oversized_groups += enum_stats[q].oversized_groups;
    stats.timings.sorting += enum_stats[q].sort_seconds;
    stats.timings.verification += enum_stats[q].verify_seconds;
    stats.timings.projection += projection_seconds[q];
    stats.timings.dedup += dedup_seconds[q];
    stats.timings.filtering += filter_seconds[q];
  }

  // First-witness dedup makes the per-replicate edge sets disjoint.
  std::vector<TaggedEdge> tagged;
  {
    std::size_t total = 0;
    for (const auto& e : replicate_edges) total += e.size();
    tagged.reserve(total);
  }
  for (std::size_t q = 0; q < q_count; ++q) {
    for (const auto& e : replicate_edges[q]) {
      tagged.push_back({e, static_cast<std::uint32_t>(q + 1)});
    }
    replicate_edges[q] = {};
  }
  std::sort(tagged.begin(), tagged.end(), [](const TaggedEdge& a, const TaggedEdge& b) {
    return std::pair(a.edge.i, a.edge.j) < std::pair(b.edge.i, b.edge.j);
  });
  graph.edges.reserve(tagged.size());
  graph.edge_replicate.reserve(tagged.size());
  for (const auto& t : tagged) {
    graph.edges.push_back(t.edge);
    graph.edge_replicate.push_back(t.replicate);
  }
  stats.verified_count = graph.edges.size();
  stats.type1_count = stats.candidate_count - stats.verified_count;
  if (params.epsilon <= 1.0) {
    stats.achieved_bound = missing_edge_bound(
        params.length, params.mismatch, collision_prob(params.epsilon), q_count);
  }
  stats.timings.total = seconds_since(total_start);
  return graph;
}

NeighborGraph build_graph_lsh_only(const VectorDataset& data, double epsilon,
                                   double gamma, std::uint64_t seed,
                                   const BuildOptions& options,
                                   const LshOnlyConfig& config) {
  ParamChoice choice = lsh_only_params(epsilon, gamma, config);
  choice.params.seed = seed;
  return build_graph(data, choice.params, options);
}

PairSet build_graph_hamming(const BitStringPool& pool, std::size_t d,
                            const EnumerateOptions& options) {
  if (pool.count() == 0) throw std::invalid_argument("empty pool");
  if (d >= pool.length()) {
    std::vector<IndexPair> all;
    const auto n = static_cast<std::uint32_t>(pool.count());
    all.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = i + 1; j < n; ++j) all.push_back({i, j});
    }
    return PairSet::from_sorted(std::move(all));
  }
  if (pool.block_count() > d && pool.block_count() <= kMaxBlocks) {
    return enumerate_pairs(pool, d, options).pairs;
  }
  BitStringPool reblocked = pool;
  reblocked.repartition(std::min(pool.length(), std::max<std::size_t>(2 * d, 1)));
  return enumerate_pairs(reblocked, d, options).pairs;
}

}  // namespace msmgraph
