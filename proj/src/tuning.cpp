#include "msmgraph/tuning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "msmgraph/errors.hpp"

namespace msmgraph {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kWilsonZ = 1.959963984540054;

double log_choose(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("probability must lie in [0, 1]");
  }
}

// Unbiased draw from [0, bound) independent of the standard library's
// distribution implementation.
std::uint64_t bounded(std::mt19937_64& engine, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t x = engine();
    if (x < limit) return x % bound;
  }
}

}  // namespace

void MsmParams::validate() const {
  if (length == 0) throw std::invalid_argument("length must be >= 1");
  if (blocks == 0 || blocks > length) {
    throw std::invalid_argument("blocks must satisfy 1 <= k <= length");
  }
  if (blocks > 64) throw std::invalid_argument("blocks must be <= 64");
  if (mismatch >= blocks) {
    throw std::invalid_argument("mismatch must be smaller than blocks");
  }
  if (replicates == 0) throw std::invalid_argument("replicates must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1]");
  }
  if (!(epsilon >= 0.0 && epsilon <= 2.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 2]");
  }
}

double log_binomial_upper_tail(std::size_t length, std::size_t mismatch,
                               double p) {
  check_probability(p);
  if (mismatch >= length) return kNegInf;
  if (p == 0.0) return kNegInf;
  if (p == 1.0) return 0.0;
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  std::vector<double> terms;
  terms.reserve(length - mismatch);
  for (std::size_t k = mismatch + 1; k <= length; ++k) {
    terms.push_back(log_choose(length, k) + static_cast<double>(k) * lp +
                    static_cast<double>(length - k) * lq);
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return std::min(0.0, top + std::log(sum));
}

double binomial_cdf(std::size_t length, std::size_t mismatch, double p) {
  return -std::expm1(log_binomial_upper_tail(length, mismatch, p));
}

double log_missing_edge_bound(std::size_t length, std::size_t mismatch,
                              double p, std::size_t replicates) {
  if (replicates == 0) throw std::invalid_argument("replicates must be >= 1");
  const double tail = log_binomial_upper_tail(length, mismatch, p);
  if (tail == kNegInf) return kNegInf;
  return static_cast<double>(replicates) * tail;
}

double missing_edge_bound(std::size_t length, std::size_t mismatch, double p,
                          std::size_t replicates) {
  return std::exp(log_missing_edge_bound(length, mismatch, p, replicates));
}

std::size_t min_replicates(std::size_t length, std::size_t mismatch, double p,
                           double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (gamma >= 1.0) return 1;
  const double tail = log_binomial_upper_tail(length, mismatch, p);
  if (tail == kNegInf) return 1;
  if (tail >= 0.0) {
    throw InfeasibleError("no replicate count reaches gamma: a single replicate "
                          "never catches a neighbor at this (length, d, p)");
  }
  const double log_gamma = std::log(gamma);
  double estimate = std::ceil(log_gamma / tail);
  if (!(estimate < 1e12)) throw InfeasibleError("replicate count is unbounded");
  auto q = static_cast<std::size_t>(std::max(1.0, estimate));
  // Settle rounding at the boundary with the same expression callers use.
  while (static_cast<double>(q) * tail > log_gamma) ++q;
  while (q > 1 && static_cast<double>(q - 1) * tail <= log_gamma) --q;
  return q;
}

OutputEstimate estimate_output_size(const VectorDataset& data, double epsilon,
                                    std::size_t sample_pairs,
                                    std::uint64_t seed) {
  const std::size_t n = data.count();
  if (n < 2) throw DataError("output estimation needs at least two vectors");
  if (sample_pairs == 0) throw std::invalid_argument("sample_pairs must be >= 1");

  std::vector<double> sq_norms(n);
  for (std::size_t i = 0; i < n; ++i) {
    sq_norms[i] = dot(data.row(i), data.row(i));
    if (!(sq_norms[i] > 0.0) || !std::isfinite(sq_norms[i])) {
      throw DataError("row " + std::to_string(i) + " has zero or non-finite norm");
    }
  }
  auto within = [&](std::size_t i, std::size_t j) {
    return cosine_distance_from(dot(data.row(i), data.row(j)), sq_norms[i], sq_norms[j]) <=
           epsilon;
  };

  OutputEstimate est;
  est.total_pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  if (est.total_pairs <= static_cast<double>(sample_pairs)) {
    est.exhaustive = true;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        ++est.sampled_pairs;
        if (within(i, j)) ++est.hits;
      }
    }
    est.estimate_S = est.lower_S = est.upper_S = static_cast<double>(est.hits);
    return est;
  }

  std::mt19937_64 engine(seed);
  for (std::size_t s = 0; s < sample_pairs; ++s) {
    const std::size_t i = bounded(engine, n);
    std::size_t j = bounded(engine, n - 1);
    if (j >= i) ++j;
    if (within(i, j)) ++est.hits;
  }
  est.sampled_pairs = sample_pairs;
  const double trials = static_cast<double>(sample_pairs);
  const double phat = static_cast<double>(est.hits) / trials;
  const double z2 = kWilsonZ * kWilsonZ;
  const double centre = (phat + z2 / (2 * trials)) / (1 + z2 / trials);
  const double half = kWilsonZ / (1 + z2 / trials) *
                      std::sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials));
  est.estimate_S = phat * est.total_pairs;
  est.lower_S = std::max(0.0, centre - half) * est.total_pairs;
  est.upper_S = std::min(1.0, centre + half) * est.total_pairs;
  return est;
}

std::size_t default_length(std::size_t n) {
  if (n < 2) return 2;
  return 2 * static_cast<std::size_t>(std::bit_width(n - 1));
}

std::optional<std::size_t> smallest_mismatch(std::size_t length, double p,
                                             double gamma, double threshold) {
  for (std::size_t d = 0; d == 0 || 2 * d <= length; ++d) {
    if (d >= 64) break;
    try {
      if (static_cast<double>(min_replicates(length, d, p, gamma)) < threshold) {
        return d;
      }
    } catch (const InfeasibleError&) {
    }
  }
  return std::nullopt;
}

ParamChoice auto_params(std::size_t n, double epsilon, double gamma,
                        const OutputEstimate& estimate, const AutoConfig& config,
                        const ParamOverrides& overrides) {
  if (n < 2) throw std::invalid_argument("automatic parameters need n >= 2");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1] for automatic parameters");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1]");
  }

  ParamChoice choice;
  choice.p = collision_prob(epsilon);
  choice.base_length = default_length(n);

  MsmParams& params = choice.params;
  params.epsilon = epsilon;
  params.gamma = gamma;
  if (overrides.length) {
    params.length = *overrides.length;
  } else {
    params.length = choice.base_length;
    if (config.allow_halving &&
        estimate.upper_S < config.halving_fraction * static_cast<double>(n)) {
      params.length = std::max<std::size_t>(1, params.length / 2);
      choice.length_halved = true;
    }
  }
  if (params.length == 0) throw std::invalid_argument("length must be >= 1");

  if (overrides.mismatch) {
    params.mismatch = *overrides.mismatch;
  } else {
    const auto d = smallest_mismatch(params.length, choice.p, gamma,
                                     config.replicate_threshold);
    if (!d) {
      throw InfeasibleError(
          "no mismatch budget d keeps the replicate count below the threshold "
          "at this radius; use exhaustive pairwise comparison instead");
    }
    params.mismatch = *d;
  }
  params.blocks = overrides.blocks
                      ? *overrides.blocks
                      : std::max<std::size_t>(2 * params.mismatch, 1);
  if (params.mismatch >= params.blocks || params.blocks > params.length) {
    throw InfeasibleError("mismatch budget d=" + std::to_string(params.mismatch) +
                          " has no valid block count k with d < k <= length");
  }

  const double s = std::max(0.0, estimate.estimate_S);
  choice.replicate_cap = static_cast<std::size_t>(std::ceil(
      std::max(config.cap_factor * s / static_cast<double>(n), config.cap_floor)));
  if (overrides.replicates) {
    params.replicates = *overrides.replicates;
    try {
      choice.gamma_replicates =
          min_replicates(params.length, params.mismatch, choice.p, gamma);
    } catch (const InfeasibleError&) {
      choice.gamma_replicates = 0;
    }
  } else {
    choice.gamma_replicates =
        min_replicates(params.length, params.mismatch, choice.p, gamma);
    params.replicates = choice.gamma_replicates;
    if (config.apply_cap && choice.gamma_replicates > choice.replicate_cap) {
      params.replicates = choice.replicate_cap;
      choice.cap_binding = true;
    }
  }
  params.validate();
  choice.achieved_bound = missing_edge_bound(params.length, params.mismatch,
                                             choice.p, params.replicates);
  return choice;
}

ParamChoice lsh_only_params(double epsilon, double gamma,
                            const LshOnlyConfig& config) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("gamma must lie in (0, 1]");
  }
  ParamChoice choice;
  choice.p = collision_prob(epsilon);
  const double log_gamma = std::log(gamma);
  std::size_t best = 0;
  // The d = 0 bound grows with the length, so the feasible lengths form a
  // prefix of 1, 2, ...
  for (std::size_t len = 1; len <= config.max_length; ++len) {
    if (log_missing_edge_bound(len, 0, choice.p, config.replicates) > log_gamma) {
      break;
    }
    best = len;
  }
  if (best == 0) {
    throw InfeasibleError("no string length reaches gamma with d = 0 and Q = " +
                          std::to_string(config.replicates));
  }
  choice.params = MsmParams{epsilon, gamma, best, 0, 1, config.replicates, 0};
  choice.base_length = best;
  choice.gamma_replicates = config.replicates;
  choice.replicate_cap = config.replicates;
  choice.achieved_bound = missing_edge_bound(best, 0, choice.p, config.replicates);
  return choice;
}

}  // namespace msmgraph
