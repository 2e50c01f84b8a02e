#include "msmgraph/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "msmgraph/bench.hpp"
#include "msmgraph/errors.hpp"
#include "msmgraph/io.hpp"
#include "msmgraph/oracle.hpp"
#include "msmgraph/pipeline.hpp"
#include "msmgraph/tuning.hpp"

namespace msmgraph {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RadiusFlags {
  std::optional<double> epsilon;
  std::optional<double> euclidean;
  bool normalize = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--epsilon", epsilon, "Cosine-distance radius");
    cmd->add_option("--euclidean-radius", euclidean,
                    "Euclidean radius on unit vectors (requires --normalize)");
    cmd->add_flag("--normalize", normalize, "Center and unit-normalize rows first");
  }

  double resolve() const {
    if (epsilon && euclidean) {
      throw UsageError("--epsilon and --euclidean-radius are mutually exclusive");
    }
    if (euclidean) {
      if (!normalize) throw UsageError("--euclidean-radius requires --normalize");
      if (!(*euclidean >= 0.0 && *euclidean <= 2.0)) {
        throw UsageError("--euclidean-radius must lie in [0, 2]");
      }
      return cosine_radius_from_euclidean(*euclidean);
    }
    if (!epsilon) throw UsageError("--epsilon is required");
    if (!(*epsilon >= 0.0 && *epsilon <= 2.0)) {
      throw UsageError("--epsilon must lie in [0, 2]");
    }
    return *epsilon;
  }
};

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw UsageError("--gamma must lie in (0, 1]");
}

void check_auto_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw UsageError("--epsilon must lie in (0, 1] when parameters are chosen "
                     "automatically");
  }
}

void check_chunk_bits(std::size_t bits) {
  if (bits == 0 || bits > kMaxChunkBits) throw UsageError("--chunk-bits must lie in [1, 24]");
}

VectorDataset load(const std::string& path, bool normalize) {
  VectorDataset data = io::read_dataset(path);
  if (normalize && data.count() > 0) data = center_and_normalize(data);
  return data;
}

Json estimate_json(const OutputEstimate& est) {
  return Json{{"sampled_pairs", est.sampled_pairs},
              {"hits", est.hits},
              {"estimate_S", est.estimate_S},
              {"S_lower", est.lower_S},
              {"S_upper", est.upper_S},
              {"exhaustive", est.exhaustive}};
}

Json choice_json(const ParamChoice& c) {
  return Json{{"length", c.params.length},
              {"mismatch", c.params.mismatch},
              {"blocks", c.params.blocks},
              {"replicates", c.params.replicates},
              {"p", c.p},
              {"base_length", c.base_length},
              {"length_halved", c.length_halved},
              {"gamma_replicates", c.gamma_replicates},
              {"replicate_cap", c.replicate_cap},
              {"cap_binding", c.cap_binding},
              {"achieved_bound", c.achieved_bound}};
}

// ---------------------------------------------------------------- build

struct BuildFlags {
  std::string input;
  std::string output;
  std::string metadata;
  RadiusFlags radius;
  double gamma = 1e-6;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::optional<std::size_t> length;
  std::optional<std::size_t> mismatch;
  std::optional<std::size_t> blocks;
  std::optional<std::size_t> replicates;
  bool lsh_only = false;
  std::size_t chunk_bits = 16;
  std::size_t sample_pairs = kDefaultSamplePairs;
  std::size_t pool_memory_limit = 0;
};

int cmd_build(const BuildFlags& f, std::ostream& out, std::ostream& err) {
  const double epsilon = f.radius.resolve();
  check_gamma(f.gamma);
  check_chunk_bits(f.chunk_bits);
  if (f.lsh_only) {
    if (f.length) throw UsageError("--length conflicts with --lsh-only");
    if (f.mismatch) throw UsageError("--mismatch conflicts with --lsh-only");
    if (f.blocks) throw UsageError("--blocks conflicts with --lsh-only");
    if (f.replicates) throw UsageError("--replicates conflicts with --lsh-only");
  }
  if (f.replicates && *f.replicates == 0) throw UsageError("--replicates must be >= 1");
  if (f.length && *f.length == 0) throw UsageError("--length must be >= 1");
  if (f.blocks && *f.blocks == 0) throw UsageError("--blocks must be >= 1");

  const VectorDataset data = load(f.input, f.radius.normalize);
  if (data.count() == 0) throw DataError("empty dataset: " + f.input);

  const ParamOverrides overrides{f.length, f.mismatch, f.blocks, f.replicates};
  ParamChoice choice;
  std::optional<OutputEstimate> estimate;
  std::string mode = "msm";
  if (f.lsh_only) {
    check_auto_epsilon(epsilon);
    choice = lsh_only_params(epsilon, f.gamma);
    mode = "lsh-only";
  } else if (overrides.complete()) {
    choice.params = MsmParams{epsilon, f.gamma, *f.length, *f.mismatch,
                              *f.blocks, *f.replicates, f.seed};
    try {
      choice.params.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--length/--mismatch/--blocks/--replicates: ") +
                       e.what());
    }
    if (epsilon <= 1.0) {
      choice.p = collision_prob(epsilon);
      choice.achieved_bound = missing_edge_bound(f.length.value(), *f.mismatch,
                                                 choice.p, *f.replicates);
    }
  } else {
    check_auto_epsilon(epsilon);
    if (data.count() < 2) {
      throw DataError("automatic parameters need at least two vectors");
    }
    if (f.mismatch && f.blocks && *f.mismatch >= *f.blocks) {
      throw UsageError("--mismatch must be smaller than --blocks");
    }
    estimate = estimate_output_size(data, epsilon, f.sample_pairs, f.seed);
    choice = auto_params(data.count(), epsilon, f.gamma, *estimate, {}, overrides);
  }
  choice.params.seed = f.seed;

  BuildOptions options;
  options.threads = f.threads;
  options.chunk_bits = f.chunk_bits;
  options.pool_memory_limit = f.pool_memory_limit;
  const NeighborGraph graph = build_graph(data, choice.params, options);
  const auto& p = graph.params;
  const auto& s = graph.stats;

  io::EdgeList list;
  list.metadata = {
      {"command", "build"},
      {"mode", mode},
      {"n", std::to_string(data.count())},
      {"dim", std::to_string(data.dim())},
      {"normalize", f.radius.normalize ? "1" : "0"},
      {"epsilon", num(p.epsilon)},
      {"gamma", num(p.gamma)},
      {"length", std::to_string(p.length)},
      {"mismatch", std::to_string(p.mismatch)},
      {"blocks", std::to_string(p.blocks)},
      {"replicates", std::to_string(p.replicates)},
      {"seed", std::to_string(p.seed)},
      {"achieved_bound", s.achieved_bound ? num(*s.achieved_bound) : "n/a"},
      {"cap_binding", choice.cap_binding ? "1" : "0"},
      {"candidates", std::to_string(s.candidate_count)},
      {"edges", std::to_string(s.verified_count)},
      {"type1", std::to_string(s.type1_count)},
  };
  list.edges = graph.edges;
  io::write_edge_list(f.output, list);

  if (s.oversized_groups > 0) {
    err << "warning: " << s.oversized_groups
        << " equal-key groups exceeded 10% of the rows (largest " << s.largest_group
        << "); the parameters are a poor fit for this radius\n";
  }
  if (choice.cap_binding) {
    err << "warning: replicate cap bound Q at " << p.replicates
        << "; achieved missing-edge bound " << choice.achieved_bound
        << " exceeds gamma " << p.gamma << "\n";
  }

  Json record{{"command", "build"},
              {"mode", mode},
              {"n", data.count()},
              {"dim", data.dim()},
              {"epsilon", p.epsilon},
              {"gamma", p.gamma},
              {"seed", p.seed},
              {"params", choice_json(choice)},
              {"stats",
               {{"candidates", s.candidate_count},
                {"edges", s.verified_count},
                {"type1", s.type1_count},
                {"raw_per_replicate", s.raw_per_replicate},
                {"new_per_replicate", s.new_per_replicate},
                {"group_candidates_checked", s.group_candidates_checked},
                {"largest_group", s.largest_group},
                {"oversized_groups", s.oversized_groups},
                {"streaming_dedup", s.streaming_dedup}}},
              {"timings",
               {{"projection", s.timings.projection},
                {"sorting", s.timings.sorting},
                {"verification", s.timings.verification},
                {"dedup", s.timings.dedup},
                {"filtering", s.timings.filtering},
                {"total", s.timings.total}}}};
  if (s.achieved_bound) record["achieved_bound"] = *s.achieved_bound;
  if (estimate) record["estimate"] = estimate_json(*estimate);
  out << record.dump(2) << '\n';
  if (!f.metadata.empty()) {
    std::ofstream meta(f.metadata);
    if (!meta) throw DataError("cannot write " + f.metadata);
    meta << record.dump(2) << '\n';
  }
  return kExitOk;
}

// --------------------------------------------------------------- oracle

int cmd_oracle(const std::string& input, const std::string& output,
               const RadiusFlags& radius, std::size_t limit, std::size_t threads,
               std::ostream& out) {
  const double epsilon = radius.resolve();
  const VectorDataset data = load(input, radius.normalize);
  io::EdgeList list;
  list.edges = brute_force_cosine(data, epsilon, limit, threads);
  list.metadata = {{"command", "oracle"},
                   {"n", std::to_string(data.count())},
                   {"dim", std::to_string(data.dim())},
                   {"normalize", radius.normalize ? "1" : "0"},
                   {"epsilon", num(epsilon)},
                   {"edges", std::to_string(list.edges.size())}};
  io::write_edge_list(output, list);
  out << Json{{"command", "oracle"}, {"n", data.count()}, {"edges", list.edges.size()}}.dump(2)
      << '\n';
  return kExitOk;
}

// -------------------------------------------------------------- compare

int cmd_compare(const std::string& approx_path, const std::string& exact_path,
                std::ostream& out) {
  const io::EdgeList approx = io::read_edge_list(approx_path);
  const io::EdgeList exact = io::read_edge_list(exact_path);
  const auto pairs = edge_pairs(approx.edges);
  const ErrorReport report = measure_errors(pairs, exact.edges);
  out << Json{{"command", "compare"},
              {"true_edges", report.true_edge_count},
              {"approx_edges", approx.edges.size()},
              {"missing", report.missing_count},
              {"missing_ratio", report.missing_ratio},
              {"extra_pairs", report.false_candidate_count}}
             .dump(2)
      << '\n';
  return kExitOk;
}

// ------------------------------------------------------------- estimate

int cmd_estimate(const std::string& input, const RadiusFlags& radius, double gamma,
                 std::uint64_t seed, std::size_t sample_pairs, std::ostream& out) {
  const double epsilon = radius.resolve();
  check_auto_epsilon(epsilon);
  check_gamma(gamma);
  if (sample_pairs == 0) throw UsageError("--sample-pairs must be >= 1");
  const VectorDataset data = load(input, radius.normalize);
  const OutputEstimate est = estimate_output_size(data, epsilon, sample_pairs, seed);
  const ParamChoice choice = auto_params(data.count(), epsilon, gamma, est);
  Json record = choice_json(choice);
  record["command"] = "estimate";
  record["n"] = data.count();
  record["dim"] = data.dim();
  record["epsilon"] = epsilon;
  record["gamma"] = gamma;
  record["estimate"] = estimate_json(est);
  out << record.dump(2) << '\n';
  return kExitOk;
}

// -------------------------------------------------------------- project

int cmd_project(const std::string& input, const std::string& output,
                std::size_t length, std::uint64_t seed, std::uint64_t replicate,
                bool normalize, std::size_t threads, std::ostream& out) {
  if (length == 0) throw UsageError("--length must be >= 1");
  const VectorDataset data = load(input, normalize);
  if (data.count() == 0) throw DataError("empty dataset: " + input);
  const BitStringPool pool = project(data, {length, seed, replicate}, threads);
  io::write_pool(output, pool);
  out << Json{{"command", "project"},
              {"n", pool.count()},
              {"length", pool.length()},
              {"seed", seed},
              {"replicate", replicate}}
             .dump(2)
      << '\n';
  return kExitOk;
}

// -------------------------------------------------------------- hamming

int cmd_hamming(const std::string& pool_path, const std::string& output,
                std::size_t mismatch, std::optional<std::size_t> blocks,
                std::size_t chunk_bits, std::size_t threads, std::ostream& out) {
  check_chunk_bits(chunk_bits);
  BitStringPool pool = io::read_pool(pool_path);
  if (pool.count() == 0) throw DataError("empty pool: " + pool_path);
  if (blocks) {
    if (*blocks == 0 || *blocks > pool.length()) {
      throw UsageError("--blocks must lie in [1, length]");
    }
    if (mismatch >= *blocks && mismatch < pool.length()) {
      throw UsageError("--mismatch must be smaller than --blocks");
    }
    pool.repartition(*blocks);
  }
  const PairSet pairs =
      build_graph_hamming(pool, mismatch, EnumerateOptions{chunk_bits, threads, 0.1});
  std::ofstream file(output, std::ios::trunc);
  if (!file) throw DataError("cannot write " + output);
  file << "# msmgraph hamming pairs v1\n"
       << "# n=" << pool.count() << "\n# length=" << pool.length()
       << "\n# mismatch=" << mismatch << "\n# pairs=" << pairs.size() << '\n';
  for (const auto& p : pairs) {
    file << p.i << ' ' << p.j << ' ' << pool.hamming_distance(p.i, p.j) << '\n';
  }
  out << Json{{"command", "hamming"}, {"n", pool.count()}, {"pairs", pairs.size()}}.dump(2)
      << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- bench

template <class T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream field(item);
    T v{};
    std::string rest;
    if (!(field >> v) || (field >> rest)) {
      throw UsageError(std::string(flag) + ": cannot parse '" + item + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw UsageError(std::string(flag) + " is empty");
  return values;
}

int cmd_bench(const std::string& input, const std::string& epsilon_list,
              const std::string& size_list, const BenchConfig& config,
              std::ostream& out) {
  const auto epsilons = parse_list<double>(epsilon_list, "--epsilon-list");
  const auto sizes = parse_list<std::size_t>(size_list, "--sizes");
  for (double e : epsilons) check_auto_epsilon(e);
  check_gamma(config.gamma);
  const VectorDataset data = io::read_dataset(input);
  for (std::size_t n : sizes) {
    if (n > data.count()) throw UsageError("--sizes: " + std::to_string(n) +
                                           " exceeds the dataset's row count");
    if (n < 2) throw UsageError("--sizes: every size must be >= 2");
  }
  const auto rows = run_bench(data, epsilons, sizes, config);
  write_bench_table(out, rows);
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Epsilon-neighbor graphs via cosine LSH and multiple sorting", "msmgraph"};
  app.require_subcommand(1);

  BuildFlags build;
  auto* build_cmd = app.add_subcommand("build", "Construct an epsilon-neighbor graph");
  build_cmd->add_option("--input", build.input, "Dataset file")->required();
  build_cmd->add_option("--output", build.output, "Edge-list file")->required();
  build.radius.add(build_cmd);
  build_cmd->add_option("--gamma", build.gamma, "Missing-edge-ratio budget");
  build_cmd->add_option("--seed", build.seed, "Random seed");
  build_cmd->add_option("--threads", build.threads, "Worker threads (0 = all)");
  build_cmd->add_option("--length", build.length, "Bits per string");
  build_cmd->add_option("--mismatch", build.mismatch, "Hamming budget d");
  build_cmd->add_option("--blocks", build.blocks, "Block count k");
  build_cmd->add_option("--replicates", build.replicates, "Replicate count Q");
  build_cmd->add_flag("--lsh-only", build.lsh_only, "d = 0, Q = 300 baseline");
  build_cmd->add_option("--chunk-bits", build.chunk_bits, "Radix chunk width");
  build_cmd->add_option("--sample-pairs", build.sample_pairs, "Pairs sampled for S");
  build_cmd->add_option("--metadata", build.metadata, "Write the run record here");
  build_cmd->add_option("--pool-memory-limit", build.pool_memory_limit,
                        "Bytes of replicate pools to hold (0 = unlimited)");

  std::string oracle_in, oracle_out;
  RadiusFlags oracle_radius;
  std::size_t oracle_limit = kDefaultOracleLimit;
  std::size_t oracle_threads = 0;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive epsilon-neighbor pairs");
  oracle_cmd->add_option("--input", oracle_in, "Dataset file")->required();
  oracle_cmd->add_option("--output", oracle_out, "Edge-list file")->required();
  oracle_radius.add(oracle_cmd);
  oracle_cmd->add_option("--limit", oracle_limit, "Largest n accepted");
  oracle_cmd->add_option("--threads", oracle_threads, "Worker threads (0 = all)");

  std::string approx_path, exact_path;
  auto* compare_cmd = app.add_subcommand("compare", "Missing-edge report of two edge lists");
  compare_cmd->add_option("--approx", approx_path, "Edge list under test")->required();
  compare_cmd->add_option("--exact", exact_path, "Exact edge list")->required();

  std::string est_in;
  RadiusFlags est_radius;
  double est_gamma = 1e-6;
  std::uint64_t est_seed = 0;
  std::size_t est_samples = kDefaultSamplePairs;
  auto* estimate_cmd = app.add_subcommand("estimate", "Choose parameters for a dataset");
  estimate_cmd->add_option("--input", est_in, "Dataset file")->required();
  est_radius.add(estimate_cmd);
  estimate_cmd->add_option("--gamma", est_gamma, "Missing-edge-ratio budget");
  estimate_cmd->add_option("--seed", est_seed, "Random seed");
  estimate_cmd->add_option("--sample-pairs", est_samples, "Pairs sampled for S");

  std::string proj_in, proj_out;
  std::size_t proj_length = 0;
  std::uint64_t proj_seed = 0;
  std::uint64_t proj_replicate = 1;
  bool proj_normalize = false;
  std::size_t proj_threads = 0;
  auto* project_cmd = app.add_subcommand("project", "Hash a dataset to a pool file");
  project_cmd->add_option("--input", proj_in, "Dataset file")->required();
  project_cmd->add_option("--output", proj_out, "Pool file")->required();
  project_cmd->add_option("--length", proj_length, "Bits per string")->required();
  project_cmd->add_option("--seed", proj_seed, "Random seed");
  project_cmd->add_option("--replicate", proj_replicate, "Replicate id");
  project_cmd->add_flag("--normalize", proj_normalize, "Center and unit-normalize rows first");
  project_cmd->add_option("--threads", proj_threads, "Worker threads (0 = all)");

  std::string ham_pool, ham_out;
  std::size_t ham_mismatch = 0;
  std::optional<std::size_t> ham_blocks;
  std::size_t ham_chunk = 16;
  std::size_t ham_threads = 0;
  auto* hamming_cmd = app.add_subcommand("hamming", "All pool pairs within Hamming distance d");
  hamming_cmd->add_option("--pool", ham_pool, "Pool file")->required();
  hamming_cmd->add_option("--output", ham_out, "Edge-list file")->required();
  hamming_cmd->add_option("--mismatch", ham_mismatch, "Hamming budget d")->required();
  hamming_cmd->add_option("--blocks", ham_blocks, "Block count k");
  hamming_cmd->add_option("--chunk-bits", ham_chunk, "Radix chunk width");
  hamming_cmd->add_option("--threads", ham_threads, "Worker threads (0 = all)");

  std::string bench_in, bench_eps, bench_sizes;
  BenchConfig bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time construction over dataset prefixes");
  bench_cmd->add_option("--input", bench_in, "Dataset file")->required();
  bench_cmd->add_option("--epsilon-list", bench_eps, "Comma-separated radii")->required();
  bench_cmd->add_option("--sizes", bench_sizes, "Comma-separated prefix sizes")->required();
  bench_cmd->add_option("--gamma", bench.gamma, "Missing-edge-ratio budget");
  bench_cmd->add_option("--seed", bench.seed, "Random seed");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0 = all)");
  bench_cmd->add_flag("--normalize", bench.normalize, "Center and unit-normalize rows first");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*build_cmd) return cmd_build(build, out, err);
    if (*oracle_cmd) {
      return cmd_oracle(oracle_in, oracle_out, oracle_radius, oracle_limit,
                        oracle_threads, out);
    }
    if (*compare_cmd) return cmd_compare(approx_path, exact_path, out);
    if (*estimate_cmd) {
      return cmd_estimate(est_in, est_radius, est_gamma, est_seed, est_samples, out);
    }
    if (*project_cmd) {
      return cmd_project(proj_in, proj_out, proj_length, proj_seed, proj_replicate,
                         proj_normalize, proj_threads, out);
    }
    if (*hamming_cmd) {
      return cmd_hamming(ham_pool, ham_out, ham_mismatch, ham_blocks, ham_chunk,
                         ham_threads, out);
    }
    if (*bench_cmd) return cmd_bench(bench_in, bench_eps, bench_sizes, bench, out);
  } catch (const InfeasibleError& e) {
    err << "infeasible parameters: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::length_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::out_of_range& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace msmgraph
