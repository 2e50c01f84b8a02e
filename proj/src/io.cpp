#include "msmgraph/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "msmgraph/errors.hpp"

namespace msmgraph::io {

namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    bytes[b] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * b)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw DataError(std::string("truncated header field: ") + what);
  }
  std::uint64_t v = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) {
    v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  }
  return static_cast<T>(v);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

bool starts_with_magic(std::istream& in, const char (&magic)[8]) {
  std::array<char, 8> head{};
  const auto pos = in.tellg();
  in.read(head.data(), head.size());
  const bool hit = in.gcount() == 8 && std::memcmp(head.data(), magic, 8) == 0;
  in.clear();
  in.seekg(pos);
  return hit;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

VectorDataset read_dataset(std::istream& in) {
  if (!starts_with_magic(in, kDatasetMagic)) return parse_csv(in);
  in.ignore(8);
  const auto version = get_le<std::uint32_t>(in, "version");
  if (version != kDatasetVersion) {
    throw DataError("unsupported dataset version " + std::to_string(version));
  }
  const auto width = get_le<std::uint32_t>(in, "element width");
  if (width != 4) {
    throw DataError("unsupported element width " + std::to_string(width));
  }
  const auto n = get_le<std::uint64_t>(in, "n");
  const auto dim = get_le<std::uint64_t>(in, "D");
  if (dim != 0 && n > std::numeric_limits<std::uint64_t>::max() / dim / 4) {
    throw DataError("dataset header declares an impossible size");
  }
  const std::uint64_t values = n * dim;
  std::vector<float> payload(values);
  std::vector<unsigned char> raw(values * 4);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::uint64_t>(in.gcount()) != raw.size()) {
    throw DataError("dataset payload is shorter than n * D values");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("dataset payload is longer than n * D values");
  }
  for (std::uint64_t v = 0; v < values; ++v) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(raw[4 * v + b]) << (8 * b);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    if (!std::isfinite(f)) {
      throw DataError("non-finite value in row " + std::to_string(v / dim));
    }
    payload[v] = f;
  }
  return VectorDataset(n, dim, std::move(payload));
}

VectorDataset parse_csv(std::istream& in) {
  std::vector<float> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    std::size_t fields = 0;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = body.find(',', start);
      const auto field = trim(body.substr(start, comma == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : comma - start));
      float value = 0.0f;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        throw DataError("CSV line " + std::to_string(line_no) + ": cannot parse '" +
                        std::string(field) + "'");
      }
      if (!std::isfinite(value)) {
        throw DataError("CSV line " + std::to_string(line_no) + ": non-finite value");
      }
      values.push_back(value);
      ++fields;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = fields;
    } else if (fields != cols) {
      throw DataError("CSV line " + std::to_string(line_no) + " has " +
                      std::to_string(fields) + " columns, expected " +
                      std::to_string(cols));
    }
    ++rows;
  }
  return VectorDataset(rows, cols, std::move(values));
}

VectorDataset read_dataset(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dataset(in);
}

void write_dataset(const std::filesystem::path& path, const VectorDataset& data) {
  auto out = open_out(path);
  out.write(kDatasetMagic, 8);
  put_le<std::uint32_t>(out, kDatasetVersion);
  put_le<std::uint32_t>(out, 4);
  put_le<std::uint64_t>(out, data.count());
  put_le<std::uint64_t>(out, data.dim());
  for (float f : data.values()) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    put_le<std::uint32_t>(out, bits);
  }
  if (!out) throw DataError("failed writing " + path.string());
}

void write_dataset_csv(const std::filesystem::path& path, const VectorDataset& data) {
  auto out = open_out(path);
  char buf[64];
  for (std::size_t i = 0; i < data.count(); ++i) {
    const auto row = data.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(row[k]));
      if (k) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

BitStringPool read_pool(std::istream& in) {
  if (!starts_with_magic(in, kPoolMagic)) throw DataError("not a pool file");
  in.ignore(8);
  const auto n = get_le<std::uint64_t>(in, "n");
  const auto length = get_le<std::uint64_t>(in, "length");
  if (length == 0) throw DataError("pool length must be positive");
  if (n > (std::uint64_t{1} << 40) || length > (std::uint64_t{1} << 32)) {
    throw DataError("pool header declares an impossible size");
  }
  const std::size_t row_bytes = (length + 7) / 8;
  BitStringPool pool(n, length);
  std::vector<unsigned char> buf(row_bytes);
  for (std::size_t i = 0; i < n; ++i) {
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(row_bytes))) {
      throw DataError("pool payload truncated at row " + std::to_string(i));
    }
    const std::size_t tail = length % 8;
    if (tail != 0 && (buf.back() >> tail) != 0) {
      throw DataError("nonzero padding bits in pool row " + std::to_string(i));
    }
    auto row = pool.mutable_row(i);
    for (std::size_t b = 0; b < row_bytes; ++b) {
      row[b / 8] |= static_cast<std::uint64_t>(buf[b]) << (8 * (b % 8));
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError("pool payload is longer than the header declares");
  }
  return pool;
}

void write_pool(std::ostream& out, const BitStringPool& pool) {
  out.write(kPoolMagic, 8);
  put_le<std::uint64_t>(out, pool.count());
  put_le<std::uint64_t>(out, pool.length());
  const std::size_t row_bytes = (pool.length() + 7) / 8;
  std::vector<char> buf(row_bytes);
  for (std::size_t i = 0; i < pool.count(); ++i) {
    const auto row = pool.row(i);
    for (std::size_t b = 0; b < row_bytes; ++b) {
      buf[b] = static_cast<char>((row[b / 8] >> (8 * (b % 8))) & 0xff);
    }
    out.write(buf.data(), static_cast<std::streamsize>(row_bytes));
  }
}

BitStringPool read_pool(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pool(in);
}

void write_pool(const std::filesystem::path& path, const BitStringPool& pool) {
  auto out = open_out(path);
  write_pool(out, pool);
  if (!out) throw DataError("failed writing " + path.string());
}

std::string format_distance(double distance) {
  int decimals = 9;
  if (distance > 0.0) {
    decimals = std::max(0, 8 - static_cast<int>(std::floor(std::log10(distance))));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, distance);
  return buf;
}

void write_edge_list(std::ostream& out, const EdgeList& list) {
  out << "# msmgraph edge list v1\n";
  for (const auto& [key, value] : list.metadata) {
    out << "# " << key << '=' << value << '\n';
  }
  for (const auto& e : list.edges) {
    out << e.i << ' ' << e.j << ' ' << format_distance(e.distance) << '\n';
  }
}

void write_edge_list(const std::filesystem::path& path, const EdgeList& list) {
  auto out = open_out(path);
  write_edge_list(out, list);
  if (!out) throw DataError("failed writing " + path.string());
}

EdgeList read_edge_list(std::istream& in) {
  EdgeList list;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      const auto text = trim(body.substr(1));
      const auto eq = text.find('=');
      if (eq != std::string_view::npos && eq > 0) {
        list.metadata.emplace_back(std::string(trim(text.substr(0, eq))),
                                   std::string(trim(text.substr(eq + 1))));
      }
      continue;
    }
    std::istringstream fields{std::string(body)};
    std::uint64_t i = 0;
    std::uint64_t j = 0;
    std::string dist_text;
    std::string extra;
    if (!(fields >> i >> j >> dist_text) || (fields >> extra)) {
      throw DataError("edge list line " + std::to_string(line_no) + " is malformed");
    }
    double dist = 0.0;
    const auto [ptr, ec] =
        std::from_chars(dist_text.data(), dist_text.data() + dist_text.size(), dist);
    if (ec != std::errc() || ptr != dist_text.data() + dist_text.size()) {
      throw DataError("edge list line " + std::to_string(line_no) + ": bad distance");
    }
    if (i >= j || j > std::numeric_limits<std::uint32_t>::max()) {
      throw DataError("edge list line " + std::to_string(line_no) + ": need i < j");
    }
    const Edge e{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), dist};
    if (!list.edges.empty()) {
      const auto& prev = list.edges.back();
      if (std::pair(prev.i, prev.j) >= std::pair(e.i, e.j)) {
        throw DataError("edge list line " + std::to_string(line_no) +
                        " is out of order or duplicated");
      }
    }
    list.edges.push_back(e);
  }
  return list;
}

EdgeList read_edge_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_edge_list(in);
}

}  // namespace msmgraph::io
