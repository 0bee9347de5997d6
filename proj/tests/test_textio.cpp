#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "pcwinter/errors.hpp"
#include "pcwinter/hash.hpp"
#include "pcwinter/textio.hpp"

namespace pcwinter {
namespace {

TEST(SplitFields, KeepsEmptyFields) {
  const auto f = split_fields("a,,b,", ',');
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[0], "a");
  EXPECT_EQ(f[1], "");
  EXPECT_EQ(f[2], "b");
  EXPECT_EQ(f[3], "");
  EXPECT_EQ(split_fields("", ',').size(), 1u);
}

TEST(LineReader, CountsLinesAndStripsCr) {
  const auto dir = testing::scratch_dir("lines");
  testing::write_text(dir / "f.txt", "one\r\ntwo\nthree");
  LineReader r(dir / "f.txt");
  std::string_view line;
  std::vector<std::string> got;
  while (r.next(line)) got.emplace_back(line);
  EXPECT_EQ(got, (std::vector<std::string>{"one", "two", "three"}));
  EXPECT_EQ(r.line_number(), 3u);
  EXPECT_THROW(LineReader(dir / "missing.txt"), ParseError);
}

TEST(ParseNumbers, AcceptsAndRejects) {
  const auto dir = testing::scratch_dir("numbers");
  testing::write_text(dir / "f.txt", "x\n");
  LineReader r(dir / "f.txt");
  std::string_view line;
  r.next(line);
  EXPECT_EQ(parse_double(" 1.5 ", r), 1.5);
  EXPECT_EQ(parse_double("+2", r), 2.0);
  EXPECT_EQ(parse_double("-1e-3", r), -1e-3);
  EXPECT_EQ(parse_uint("42", r), 42u);
  EXPECT_EQ(parse_int("-7", r), -7);
  EXPECT_THROW(parse_double("", r), ParseError);
  EXPECT_THROW(parse_double("1.5x", r), ParseError);
  EXPECT_THROW(parse_uint("-1", r), ParseError);
  try {
    parse_uint("abc", r);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(2.0 / 3.0, 3), "0.667");
}

TEST(AtomicFile, CommitAndAbandon) {
  const auto dir = testing::scratch_dir("atomic");
  {
    AtomicFile f(dir / "a.txt");
    f.stream() << "hello";
    f.commit();
  }
  EXPECT_EQ(read_file(dir / "a.txt"), "hello");
  {
    AtomicFile f(dir / "a.txt");
    f.stream() << "partial";
  }
  EXPECT_EQ(read_file(dir / "a.txt"), "hello");
  EXPECT_FALSE(std::filesystem::exists(dir / "a.txt.tmp"));
}

TEST(Hash, KnownFnvVectors) {
  Fnv1a empty;
  EXPECT_EQ(empty.digest(), 0xcbf29ce484222325ULL);
  Fnv1a a;
  a.update("a");
  EXPECT_EQ(a.digest(), 0xaf63dc4c8601ec8cULL);
  Fnv1a foobar;
  foobar.update("foo");
  foobar.update("bar");
  EXPECT_EQ(foobar.digest(), 0x85944171f73967e8ULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Hash, StreamSeedsDiffer) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 4; ++m) {
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(stream_seed(m, i));
  }
  EXPECT_EQ(seen.size(), 4000u);
  EXPECT_EQ(stream_seed(3, 9), stream_seed(3, 9));
}

}  // namespace
}  // namespace pcwinter
