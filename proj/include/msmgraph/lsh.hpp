#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "msmgraph/bitpool.hpp"

namespace msmgraph {

/// n dense float vectors of dimension dim, stored row-major.
class VectorDataset {
 public:
  VectorDataset() = default;
  VectorDataset(std::size_t count, std::size_t dim);
  VectorDataset(std::size_t count, std::size_t dim, std::vector<float> values);

  std::size_t count() const { return count_; }
  std::size_t dim() const { return dim_; }
  std::span<const float> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<float> mutable_row(std::size_t i) {
    return {values_.data() + i * dim_, dim_};
  }
  const std::vector<float>& values() const { return values_; }

  /// The first n rows.
  VectorDataset prefix(std::size_t n) const;

  bool operator==(const VectorDataset&) const = default;

 private:
  std::size_t count_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> values_;
};

/// Subtracts the column means, then scales every row to unit norm.
/// Throws DataError if a row ends up with zero norm.
VectorDataset center_and_normalize(const VectorDataset& data);

/// Throws DataError naming the first row with zero or non-finite norm.
void require_positive_norms(const VectorDataset& data);

struct ProjectionSpec {
  std::size_t length = 0;
  std::uint64_t seed = 0;
  std::uint64_t replicate_id = 1;
};

/// Column t of the Gaussian projection matrix for (seed, replicate_id).
/// Entries are Box-Muller transforms of a mt19937_64 stream seeded from a
/// splitmix64 mix of (seed, replicate_id, t), so results are identical on
/// every platform and independent of scheduling.
void projection_column(std::uint64_t seed, std::uint64_t replicate_id,
                       std::uint64_t column, std::span<double> out);

/// Sign-of-projection hashing: bit (i, t) is 1 iff r_t . x_i > 0.
BitStringPool project(const VectorDataset& data, const ProjectionSpec& spec,
                      std::size_t threads = 1);

double dot(std::span<const float> x, std::span<const float> y);
double norm(std::span<const float> x);

/// 1 - dot / sqrt(sq_x * sq_y), clamped to [0, 2]. Taking one square root
/// of the product makes identical vectors come out at exactly zero.
inline double cosine_distance_from(double dot, double sq_x, double sq_y) {
  const double d = 1.0 - dot / std::sqrt(sq_x * sq_y);
  return d < 0.0 ? 0.0 : (d > 2.0 ? 2.0 : d);
}

/// 1 - cos(x, y), clamped to [0, 2].
double cosine_distance(std::span<const float> x, std::span<const float> y);

/// Angle between x and y in [0, pi].
double angle(std::span<const float> x, std::span<const float> y);

/// Per-bit mismatch probability for neighbors at cosine radius epsilon:
/// arccos(1 - epsilon) / pi. Requires epsilon in [0, 1].
double collision_prob(double epsilon);

/// sqrt(2 * epsilon): the Euclidean radius matching a cosine radius
/// on unit vectors, and its inverse.
double euclidean_radius_from_cosine(double epsilon);
double cosine_radius_from_euclidean(double radius);

}  // namespace msmgraph
