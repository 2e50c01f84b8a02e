#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "msmgraph/lsh.hpp"

namespace msmgraph {

/// Parameters of one graph construction run.
struct MsmParams {
  double epsilon = 0.0;      ///< cosine-distance radius
  double gamma = 1e-6;       ///< missing-edge-ratio budget
  std::size_t length = 0;    ///< bits per string
  std::size_t mismatch = 0;  ///< Hamming budget d
  std::size_t blocks = 1;    ///< block count k
  std::size_t replicates = 1;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless 0 <= d < k <= length, k <= 64,
  /// Q >= 1, 0 < gamma <= 1 and epsilon in [0, 2].
  void validate() const;

  bool operator==(const MsmParams&) const = default;
};

/// log of sum_{k > d} C(l, k) p^k (1 - p)^(l - k): the probability that a
/// neighbor pair lands farther than d in a single replicate.
double log_binomial_upper_tail(std::size_t length, std::size_t mismatch,
                               double p);

/// P(Binom(length, p) <= mismatch).
double binomial_cdf(std::size_t length, std::size_t mismatch, double p);

/// Upper bound on the expected missing-edge ratio after Q replicates,
/// (1 - CDF)^Q, evaluated in log space. The log form stays usable where
/// the bound underflows a double.
double log_missing_edge_bound(std::size_t length, std::size_t mismatch,
                              double p, std::size_t replicates);
double missing_edge_bound(std::size_t length, std::size_t mismatch, double p,
                          std::size_t replicates);

/// Smallest Q with missing_edge_bound <= gamma. Throws InfeasibleError when
/// no Q reaches gamma (the single-replicate CDF is zero).
std::size_t min_replicates(std::size_t length, std::size_t mismatch, double p,
                           double gamma);

struct OutputEstimate {
  std::size_t sampled_pairs = 0;
  std::size_t hits = 0;
  double total_pairs = 0.0;  ///< n(n-1)/2
  double estimate_S = 0.0;
  double lower_S = 0.0;  ///< 95% Wilson interval, scaled to pair counts
  double upper_S = 0.0;
  bool exhaustive = false;  ///< every pair was examined; the interval is exact
};

inline constexpr std::size_t kDefaultSamplePairs = 10000;

/// Estimates the number of pairs within epsilon by uniform pair sampling
/// with replacement. When n(n-1)/2 <= sample_pairs every pair is counted
/// instead.
OutputEstimate estimate_output_size(const VectorDataset& data, double epsilon,
                                    std::size_t sample_pairs,
                                    std::uint64_t seed);

struct AutoConfig {
  double replicate_threshold = 25.0;
  double cap_factor = 30.0;
  double cap_floor = 5.0;
  bool apply_cap = true;
  /// Halve the length when the upper confidence limit of S falls below
  /// halving_fraction * n.
  bool allow_halving = true;
  double halving_fraction = 0.01;
};

struct ParamOverrides {
  std::optional<std::size_t> length;
  std::optional<std::size_t> mismatch;
  std::optional<std::size_t> blocks;
  std::optional<std::size_t> replicates;

  bool complete() const { return length && mismatch && blocks && replicates; }
};

struct ParamChoice {
  MsmParams params;
  double p = 0.0;
  std::size_t base_length = 0;
  bool length_halved = false;
  std::size_t gamma_replicates = 0;  ///< minimum Q reaching gamma
  std::size_t replicate_cap = 0;     ///< ceil(max(30 S / n, 5))
  bool cap_binding = false;
  double achieved_bound = 0.0;
};

/// 2 * ceil(log2 n).
std::size_t default_length(std::size_t n);

/// Smallest d (with 2d <= length, or d = 0) whose minimum replicate count is
/// below `threshold`.
std::optional<std::size_t> smallest_mismatch(std::size_t length, double p,
                                             double gamma, double threshold);

/// Chooses (length, d, k, Q) from n, epsilon, gamma and the output estimate.
/// Fields present in `overrides` are taken as given and the remaining ones
/// are derived around them. Throws InfeasibleError when no d works.
ParamChoice auto_params(std::size_t n, double epsilon, double gamma,
                        const OutputEstimate& estimate,
                        const AutoConfig& config = {},
                        const ParamOverrides& overrides = {});

struct LshOnlyConfig {
  std::size_t replicates = 300;
  std::size_t max_length = 128;
};

/// d = 0, fixed Q, and the longest length whose bound stays within gamma.
ParamChoice lsh_only_params(double epsilon, double gamma,
                            const LshOnlyConfig& config = {});

}  // namespace msmgraph
