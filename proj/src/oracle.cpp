#include "msmgraph/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "msmgraph/errors.hpp"
#include "parallel.hpp"

namespace msmgraph {

namespace {

void check_limit(std::size_t n, std::size_t limit) {
  if (n > limit) {
    throw std::length_error("exhaustive comparison refused: n=" + std::to_string(n) +
                            " exceeds the limit of " + std::to_string(limit));
  }
}

// Shared walk over two sorted pair lists. `approx_replicates` may be empty.
ErrorReport compare_sorted(std::span<const IndexPair> approx,
                           std::span<const std::uint32_t> approx_replicates,
                           std::span<const IndexPair> exact) {
  ErrorReport report;
  report.true_edge_count = exact.size();
  std::size_t a = 0;
  std::size_t e = 0;
  while (a < approx.size() || e < exact.size()) {
    if (e == exact.size() || (a < approx.size() && approx[a] < exact[e])) {
      ++report.false_candidate_count;
      ++a;
    } else if (a == approx.size() || exact[e] < approx[a]) {
      ++report.missing_count;
      ++e;
    } else {
      if (!approx_replicates.empty()) {
        const std::size_t q = approx_replicates[a];
        if (q > 0) {
          if (report.found_per_replicate.size() < q) {
            report.found_per_replicate.resize(q, 0);
          }
          ++report.found_per_replicate[q - 1];
        }
      }
      ++a;
      ++e;
    }
  }
  report.missing_ratio =
      exact.empty() ? 0.0
                    : static_cast<double>(report.missing_count) /
                          static_cast<double>(exact.size());
  return report;
}

}  // namespace

std::vector<IndexPair> edge_pairs(std::span<const Edge> edges) {
  std::vector<IndexPair> out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.push_back({e.i, e.j});
  return out;
}

std::vector<Edge> brute_force_cosine(const VectorDataset& data, double epsilon,
                                     std::size_t limit, std::size_t threads) {
  const std::size_t n = data.count();
  check_limit(n, limit);
  std::vector<double> sq_norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    sq_norms[i] = dot(data.row(i), data.row(i));
    if (!(sq_norms[i] > 0.0)) {
      throw DataError("row " + std::to_string(i) + " has zero norm");
    }
  }
  std::vector<std::vector<Edge>> rows(n);
  detail::parallel_for(n, threads, [&](std::size_t i, std::size_t) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d =
          cosine_distance_from(dot(data.row(i), data.row(j)), sq_norms[i], sq_norms[j]);
      if (d <= epsilon) {
        rows[i].push_back(
            {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), d});
      }
    }
  });
  std::vector<Edge> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

PairSet brute_force_hamming(const BitStringPool& pool, std::size_t d,
                            std::size_t limit) {
  const std::size_t n = pool.count();
  check_limit(n, limit);
  std::vector<IndexPair> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pool.hamming_distance_unchecked(i, j) <= d) {
        out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
      }
    }
  }
  return PairSet::from_sorted(std::move(out));
}

ErrorReport measure_errors(std::span<const IndexPair> approx,
                           std::span<const Edge> exact) {
  std::vector<IndexPair> a(approx.begin(), approx.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  auto e = edge_pairs(exact);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return compare_sorted(a, {}, e);
}

ErrorReport measure_errors(const CandidateSet& approx, std::span<const Edge> exact) {
  auto e = edge_pairs(exact);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  const auto& pairs = approx.pairs.pairs();
  std::span<const std::uint32_t> reps;
  if (approx.replicate_of.size() == pairs.size()) reps = approx.replicate_of;
  return compare_sorted(pairs, reps, e);
}

ErrorReport measure_errors(const NeighborGraph& approx, std::span<const Edge> exact) {
  auto e = edge_pairs(exact);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  const auto a = edge_pairs(approx.edges);
  std::span<const std::uint32_t> reps;
  if (approx.edge_replicate.size() == a.size()) reps = approx.edge_replicate;
  return compare_sorted(a, reps, e);
}

}  // namespace msmgraph
