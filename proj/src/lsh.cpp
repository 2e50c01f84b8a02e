#include "msmgraph/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "msmgraph/errors.hpp"
#include "parallel.hpp"

namespace msmgraph {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

// Upper bound on the doubles of R held at once.
constexpr std::size_t kProjectionBlockDoubles = std::size_t{1} << 20;
constexpr std::size_t kRowsPerTask = 512;

}  // namespace

VectorDataset::VectorDataset(std::size_t count, std::size_t dim)
    : count_(count), dim_(dim), values_(count * dim, 0.0f) {}

VectorDataset::VectorDataset(std::size_t count, std::size_t dim,
                             std::vector<float> values)
    : count_(count), dim_(dim), values_(std::move(values)) {
  if (values_.size() != count * dim) {
    throw std::invalid_argument("dataset payload size does not match n * D");
  }
}

VectorDataset VectorDataset::prefix(std::size_t n) const {
  n = std::min(n, count_);
  return VectorDataset(n, dim_,
                       std::vector<float>(values_.begin(),
                                          values_.begin() + n * dim_));
}

double dot(std::span<const float> x, std::span<const float> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    s += static_cast<double>(x[k]) * static_cast<double>(y[k]);
  }
  return s;
}

double norm(std::span<const float> x) { return std::sqrt(dot(x, x)); }

void require_positive_norms(const VectorDataset& data) {
  for (std::size_t i = 0; i < data.count(); ++i) {
    const double nrm = norm(data.row(i));
    if (!std::isfinite(nrm)) {
      throw DataError("row " + std::to_string(i) + " has non-finite entries");
    }
    if (nrm == 0.0) {
      throw DataError("row " + std::to_string(i) + " has zero norm");
    }
  }
}

VectorDataset center_and_normalize(const VectorDataset& data) {
  const std::size_t n = data.count();
  const std::size_t dim = data.dim();
  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = data.row(i);
    for (std::size_t k = 0; k < dim; ++k) mean[k] += r[k];
  }
  if (n > 0) {
    for (auto& m : mean) m /= static_cast<double>(n);
  }
  VectorDataset out(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = data.row(i);
    std::vector<double> centered(dim);
    double sq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      centered[k] = static_cast<double>(src[k]) - mean[k];
      sq += centered[k] * centered[k];
    }
    const double nrm = std::sqrt(sq);
    // Compare against the input scale: float rounding leaves tiny residue
    // when a row equals the mean.
    if (!(nrm > 1e-12 * (norm(src) + 1e-300))) {
      throw DataError("row " + std::to_string(i) +
                      " has zero norm after centering");
    }
    auto dst = out.mutable_row(i);
    for (std::size_t k = 0; k < dim; ++k) {
      dst[k] = static_cast<float>(centered[k] / nrm);
    }
  }
  return out;
}

void projection_column(std::uint64_t seed, std::uint64_t replicate_id,
                       std::uint64_t column, std::span<double> out) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ replicate_id);
  s = splitmix64(s ^ column);
  std::mt19937_64 engine(s);
  for (std::size_t k = 0; k < out.size(); k += 2) {
    const double u1 = static_cast<double>((engine() >> 11) + 1) * kTwoPow53Inv;
    const double u2 = static_cast<double>(engine() >> 11) * kTwoPow53Inv;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    out[k] = radius * std::cos(phase);
    if (k + 1 < out.size()) out[k + 1] = radius * std::sin(phase);
  }
}

BitStringPool project(const VectorDataset& data, const ProjectionSpec& spec,
                      std::size_t threads) {
  if (spec.length == 0) throw std::invalid_argument("projection length must be >= 1");
  if (data.count() == 0) throw std::invalid_argument("cannot project an empty dataset");
  require_positive_norms(data);

  const std::size_t n = data.count();
  const std::size_t dim = std::max<std::size_t>(data.dim(), 1);
  BitStringPool pool(n, spec.length);

  const std::size_t words = pool.words_per_row();
  const std::size_t words_per_block =
      std::max<std::size_t>(1, kProjectionBlockDoubles / (64 * dim));
  std::vector<double> columns;
  const std::size_t tasks = (n + kRowsPerTask - 1) / kRowsPerTask;

  for (std::size_t w0 = 0; w0 < words; w0 += words_per_block) {
    const std::size_t w1 = std::min(words, w0 + words_per_block);
    const std::size_t t0 = w0 * 64;
    const std::size_t t1 = std::min(spec.length, w1 * 64);
    columns.assign((t1 - t0) * data.dim(), 0.0);
    for (std::size_t t = t0; t < t1; ++t) {
      projection_column(spec.seed, spec.replicate_id, t,
                        std::span(columns.data() + (t - t0) * data.dim(),
                                  data.dim()));
    }
    detail::parallel_for(tasks, threads, [&](std::size_t task, std::size_t) {
      const std::size_t r0 = task * kRowsPerTask;
      const std::size_t r1 = std::min(n, r0 + kRowsPerTask);
      for (std::size_t i = r0; i < r1; ++i) {
        const auto x = data.row(i);
        auto bits = pool.mutable_row(i);
        for (std::size_t t = t0; t < t1; ++t) {
          const double* col = columns.data() + (t - t0) * data.dim();
          double s = 0.0;
          for (std::size_t k = 0; k < x.size(); ++k) s += col[k] * x[k];
          if (s > 0.0) bits[t >> 6] |= std::uint64_t{1} << (t & 63);
        }
      }
    });
  }
  return pool;
}

double cosine_distance(std::span<const float> x, std::span<const float> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dimension mismatch");
  const double sx = dot(x, x);
  const double sy = dot(y, y);
  if (sx == 0.0 || sy == 0.0) throw DataError("cosine distance of a zero-norm vector");
  return cosine_distance_from(dot(x, y), sx, sy);
}

double angle(std::span<const float> x, std::span<const float> y) {
  if (x.size() != y.size()) throw std::invalid_argument("dimension mismatch");
  const double nx = norm(x);
  const double ny = norm(y);
  if (nx == 0.0 || ny == 0.0) throw DataError("angle of a zero-norm vector");
  return std::acos(std::clamp(dot(x, y) / (nx * ny), -1.0, 1.0));
}

double collision_prob(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1] (got " +
                                std::to_string(epsilon) + ")");
  }
  return std::acos(1.0 - epsilon) / std::numbers::pi;
}

double euclidean_radius_from_cosine(double epsilon) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("negative cosine radius");
  return std::sqrt(2.0 * epsilon);
}

double cosine_radius_from_euclidean(double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("negative Euclidean radius");
  return radius * radius / 2.0;
}

}  // namespace msmgraph
