#pragma once

// Shared test data: the ten-string pool of the worked example, planted
// near-duplicate pools, and planted-cluster vector datasets.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "msmgraph/bitpool.hpp"
#include "msmgraph/lsh.hpp"

namespace msmgraph::testdata {

/// Ten 16-bit strings; row r (0-based) is string r + 1 in 1-based numbering.
inline std::vector<std::string> example_rows() {
  return {
      "1011 1111 0011 1110", "1101 0111 0111 0001", "1100 1000 1101 1100",
      "0100 0001 0111 1101", "1010 0010 1110 1010", "1111 0011 1001 0111",
      "0000 0001 0011 1110", "0101 1001 0111 1000", "1101 1000 1101 1110",
      "1001 0011 1001 0111",
  };
}

inline BitStringPool example_pool(std::size_t blocks = 4) {
  const auto rows = example_rows();
  return BitStringPool::from_strings(rows, blocks);
}

/// Random pool in which about half the rows are noisy copies of earlier
/// rows (up to max_flips bit flips), so small-d joins have work to do.
inline BitStringPool planted_pool(std::size_t n, std::size_t length,
                                  std::size_t blocks, std::size_t max_flips,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BitStringPool pool(n, length, blocks);
  for (std::size_t i = 0; i < n; ++i) {
    const bool copy = i > 0 && (rng() & 1);
    if (copy) {
      const std::size_t src = rng() % i;
      for (std::size_t t = 0; t < length; ++t) pool.set_bit(i, t, pool.bit(src, t));
      const std::size_t flips = rng() % (max_flips + 1);
      for (std::size_t f = 0; f < flips; ++f) {
        const std::size_t t = rng() % length;
        pool.set_bit(i, t, !pool.bit(i, t));
      }
    } else {
      for (std::size_t t = 0; t < length; ++t) pool.set_bit(i, t, rng() & 1);
    }
  }
  return pool;
}

inline std::vector<float> gaussian_vector(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(normal(rng));
  return v;
}

struct ClusterSpec {
  std::size_t clusters = 100;
  std::size_t cluster_size = 40;
  std::size_t background = 0;
  std::size_t dim = 64;
  /// Per-coordinate noise added to a unit-norm centre.
  double noise = 0.025;
};

/// Clustered points first (cluster c occupies rows c*size .. ), then
/// isotropic background points.
inline VectorDataset planted_clusters(const ClusterSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = spec.clusters * spec.cluster_size + spec.background;
  VectorDataset data(n, spec.dim);
  std::size_t row = 0;
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    auto centre = gaussian_vector(rng, spec.dim);
    double nrm = 0.0;
    for (float x : centre) nrm += static_cast<double>(x) * x;
    nrm = std::sqrt(nrm);
    for (std::size_t m = 0; m < spec.cluster_size; ++m, ++row) {
      auto out = data.mutable_row(row);
      for (std::size_t k = 0; k < spec.dim; ++k) {
        out[k] = static_cast<float>(centre[k] / nrm + spec.noise * normal(rng));
      }
    }
  }
  for (; row < n; ++row) {
    auto v = gaussian_vector(rng, spec.dim);
    std::copy(v.begin(), v.end(), data.mutable_row(row).begin());
  }
  return data;
}

/// Two vectors in `dim` dimensions at exactly the given angle (up to float
/// rounding of the sine and cosine).
inline VectorDataset pair_at_angle(double theta, std::size_t dim = 2) {
  VectorDataset data(2, dim);
  data.mutable_row(0)[0] = 1.0f;
  data.mutable_row(1)[0] = static_cast<float>(std::cos(theta));
  data.mutable_row(1)[1] = static_cast<float>(std::sin(theta));
  return data;
}

}  // namespace msmgraph::testdata
