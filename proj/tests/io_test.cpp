#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "msmgraph/errors.hpp"
#include "msmgraph/io.hpp"

using namespace msmgraph;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "msmgraph_io_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(DatasetFile, BinaryRoundTrip) {
  const auto data = testdata::planted_clusters({3, 7, 11, 13, 0.1}, 2);
  const auto path = temp_path("round.bin");
  io::write_dataset(path, data);
  EXPECT_EQ(fs::file_size(path), 32 + data.values().size() * 4);
  EXPECT_EQ(io::read_dataset(path), data);
}

TEST(DatasetFile, HeaderLayout) {
  VectorDataset data(2, 3, {1, 2, 3, 4, 5, -0.0f});
  const auto path = temp_path("layout.bin");
  io::write_dataset(path, data);
  const std::string bytes = slurp(path);
  ASSERT_EQ(bytes.size(), 32u + 24u);
  EXPECT_EQ(bytes.substr(0, 8), std::string("MSMGVEC\0", 8));
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[12], 4);
  EXPECT_EQ(bytes[16], 2);
  EXPECT_EQ(bytes[24], 3);
  float first = 0;
  std::memcpy(&first, bytes.data() + 32, 4);
  EXPECT_EQ(first, 1.0f);
}

TEST(DatasetFile, RejectsTruncatedAndNonFinite) {
  const auto data = testdata::planted_clusters({1, 4, 0, 5, 0.1}, 2);
  const auto path = temp_path("trunc.bin");
  io::write_dataset(path, data);
  fs::resize_file(path, fs::file_size(path) - 3);
  EXPECT_THROW(io::read_dataset(path), DataError);

  VectorDataset bad(1, 2, {1.0f, std::nanf("")});
  const auto nan_path = temp_path("nan.bin");
  io::write_dataset(nan_path, bad);
  EXPECT_THROW(io::read_dataset(nan_path), DataError);
  EXPECT_THROW(io::read_dataset(temp_path("does_not_exist.bin")), DataError);
}

TEST(DatasetFile, CsvRoundTrip) {
  const auto data = testdata::planted_clusters({2, 5, 3, 6, 0.3}, 9);
  const auto path = temp_path("round.csv");
  io::write_dataset_csv(path, data);
  EXPECT_EQ(io::read_dataset(path), data);
}

TEST(DatasetFile, CsvParsing) {
  std::istringstream ok("1,2,3\n 4 , 5.5 ,-6e-1\r\n\n");
  const auto data = io::read_dataset(ok);
  EXPECT_EQ(data.count(), 2u);
  EXPECT_EQ(data.dim(), 3u);
  EXPECT_EQ(data.row(1)[1], 5.5f);
  EXPECT_EQ(data.row(1)[2], -0.6f);
  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(io::read_dataset(ragged), DataError);
  std::istringstream junk("1,x\n");
  EXPECT_THROW(io::read_dataset(junk), DataError);
  std::istringstream inf("1,inf\n");
  EXPECT_THROW(io::read_dataset(inf), DataError);
  std::istringstream empty("");
  EXPECT_EQ(io::read_dataset(empty).count(), 0u);
}

TEST(PoolFile, RoundTrip) {
  for (std::size_t len : {1u, 8u, 13u, 64u, 100u}) {
    auto pool = testdata::planted_pool(37, len, 1, 2, len);
    std::stringstream buf;
    io::write_pool(buf, pool);
    EXPECT_EQ(buf.str().size(), 24 + 37 * ((len + 7) / 8));
    const auto back = io::read_pool(buf);
    EXPECT_EQ(back, pool) << len;
  }
}

TEST(PoolFile, ByteLayoutAndPadding) {
  const auto pool = BitStringPool::from_strings(std::vector<std::string>{"1010000011"}, 1);
  std::stringstream buf;
  io::write_pool(buf, pool);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.size(), 24u + 2u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[24]), 0b00000101u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[25]), 0b00000011u);
  std::string dirty = bytes;
  dirty[25] = static_cast<char>(0b10000011);
  std::stringstream in(dirty);
  EXPECT_THROW(io::read_pool(in), DataError);
  std::stringstream short_in(bytes.substr(0, 25));
  EXPECT_THROW(io::read_pool(short_in), DataError);
  std::stringstream wrong("NOTAPOOL" + bytes.substr(8));
  EXPECT_THROW(io::read_pool(wrong), DataError);
}

TEST(EdgeListFile, FormatDistance) {
  EXPECT_EQ(io::format_distance(0.0), "0.000000000");
  EXPECT_EQ(io::format_distance(0.0489434837), "0.0489434837");
  EXPECT_EQ(io::format_distance(1.0), "1.00000000");
  EXPECT_EQ(io::format_distance(1.2345678912), "1.23456789");
  EXPECT_EQ(io::format_distance(3.1e-5), "0.0000310000000");
}

TEST(EdgeListFile, RoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  io::EdgeList list;
  list.metadata = {{"command", "build"}, {"epsilon", "0.05"}};
  for (std::uint32_t i = 0; i < 50; ++i) list.edges.push_back({i, i + 3, u(rng)});
  list.edges.push_back({60, 61, 0.0});
  std::stringstream first;
  io::write_edge_list(first, list);
  std::stringstream in(first.str());
  const auto back = io::read_edge_list(in);
  EXPECT_EQ(back.metadata, list.metadata);
  ASSERT_EQ(back.edges.size(), list.edges.size());
  for (std::size_t x = 0; x < list.edges.size(); ++x) {
    EXPECT_EQ(back.edges[x].i, list.edges[x].i);
    EXPECT_EQ(back.edges[x].j, list.edges[x].j);
    EXPECT_NEAR(back.edges[x].distance, list.edges[x].distance,
                5e-9 * std::max(list.edges[x].distance, 1e-300));
  }
  // Reading and writing again is a fixed point.
  std::stringstream second;
  io::write_edge_list(second, back);
  EXPECT_EQ(first.str(), second.str());
}

TEST(EdgeListFile, RejectsBadLines) {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return io::read_edge_list(in);
  };
  EXPECT_EQ(parse("# a=b\n0 1 0.5\n").edges.size(), 1u);
  EXPECT_THROW(parse("1 0 0.5\n"), DataError);
  EXPECT_THROW(parse("0 1 0.5\n0 1 0.5\n"), DataError);
  EXPECT_THROW(parse("0 2 0.5\n0 1 0.5\n"), DataError);
  EXPECT_THROW(parse("0 1\n"), DataError);
  EXPECT_THROW(parse("0 1 abc\n"), DataError);
  EXPECT_THROW(parse("0 1 0.5 7\n"), DataError);
  EXPECT_TRUE(parse("# msmgraph edge list v1\n").edges.empty());
}
