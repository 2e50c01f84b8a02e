#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "msmgraph/bitpool.hpp"
#include "msmgraph/lsh.hpp"
#include "msmgraph/pipeline.hpp"

namespace msmgraph::io {

// Dataset files.
//
// Binary layout, all integers little-endian:
//   bytes 0..7    magic "MSMGVEC\0"
//   bytes 8..11   u32 version (1)
//   bytes 12..15  u32 element width in bytes (4)
//   bytes 16..23  u64 n
//   bytes 24..31  u64 D
//   then n * D IEEE-754 float32 values, row-major, little-endian.
//
// Anything without the magic is read as headerless CSV: one row per line,
// comma separated, every row with the same column count.

inline constexpr char kDatasetMagic[8] = {'M', 'S', 'M', 'G', 'V', 'E', 'C', '\0'};
inline constexpr std::uint32_t kDatasetVersion = 1;

VectorDataset read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const VectorDataset& data);
void write_dataset_csv(const std::filesystem::path& path, const VectorDataset& data);

VectorDataset read_dataset(std::istream& in);
VectorDataset parse_csv(std::istream& in);

// Pool files: magic "MSMGPOOL", u64 n, u64 length, then n rows of
// ceil(length / 8) bytes. Bit t of a row is bit (t % 8) of byte t / 8.
// Padding bits must be zero.

inline constexpr char kPoolMagic[8] = {'M', 'S', 'M', 'G', 'P', 'O', 'O', 'L'};

BitStringPool read_pool(const std::filesystem::path& path);
void write_pool(const std::filesystem::path& path, const BitStringPool& pool);
BitStringPool read_pool(std::istream& in);
void write_pool(std::ostream& out, const BitStringPool& pool);

// Edge lists: '#' comment lines, then "i j distance" per line with
// 0-based i < j, sorted by (i, j). Comment lines of the form "# key=value"
// carry run metadata.

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct EdgeList {
  Metadata metadata;
  std::vector<Edge> edges;
};

/// Fixed notation with nine significant digits ("0.000000000" for zero).
std::string format_distance(double distance);

void write_edge_list(std::ostream& out, const EdgeList& list);
void write_edge_list(const std::filesystem::path& path, const EdgeList& list);
/// Throws DataError on malformed, unsorted or duplicate lines.
EdgeList read_edge_list(std::istream& in);
EdgeList read_edge_list(const std::filesystem::path& path);

}  // namespace msmgraph::io
