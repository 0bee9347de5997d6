#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace pcwinter {

// Line-oriented reader that tracks line numbers for error messages. Strips a
// trailing '\r'.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);

  bool next(std::string_view& line);
  std::size_t line_number() const { return line_number_; }
  const std::string& file() const { return file_; }

 private:
  std::ifstream in_;
  std::string file_;
  std::string buffer_;
  std::size_t line_number_ = 0;
};

std::vector<std::string_view> split_fields(std::string_view line, char sep);

double parse_double(std::string_view field, const LineReader& where);
std::uint64_t parse_uint(std::string_view field, const LineReader& where);
std::int64_t parse_int(std::string_view field, const LineReader& where);

// Shortest text that parses back to the same double.
std::string format_double(double value);
// Fixed number of significant digits.
std::string format_double(double value, int significant_digits);

// Writes to `<path>.tmp` and renames over `path` on commit(). An uncommitted
// file is removed on destruction.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path);
  ~AtomicFile();
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ofstream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace pcwinter
