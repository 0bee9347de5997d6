#include "pcwinter/textio.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "pcwinter/errors.hpp"
#include "pcwinter/hash.hpp"

namespace pcwinter {

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

LineReader::LineReader(const std::filesystem::path& path) : in_(path), file_(path.string()) {
  if (!in_) throw ParseError(file_, 0, "cannot open file");
}

bool LineReader::next(std::string_view& line) {
  if (!std::getline(in_, buffer_)) return false;
  ++line_number_;
  if (!buffer_.empty() && buffer_.back() == '\r') buffer_.pop_back();
  line = buffer_;
  return true;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view field, const LineReader& where, const char* kind) {
  field = trim(field);
  T value{};
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(where.file(), where.line_number(),
                     std::string("malformed ") + kind + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

double parse_double(std::string_view field, const LineReader& where) {
  return parse_number<double>(field, where, "number");
}

std::uint64_t parse_uint(std::string_view field, const LineReader& where) {
  return parse_number<std::uint64_t>(field, where, "node id");
}

std::int64_t parse_int(std::string_view field, const LineReader& where) {
  return parse_number<std::int64_t>(field, where, "integer");
}

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string format_double(double value, int significant_digits) {
  char buf[48];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general,
                                       significant_digits);
  return std::string(buf, ptr);
}

AtomicFile::AtomicFile(std::filesystem::path path)
    : path_(std::move(path)), tmp_(path_.string() + ".tmp"), out_(tmp_, std::ios::binary) {
  if (!out_) throw Error("cannot open '" + tmp_.string() + "' for writing");
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(tmp_, ec);
  }
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw Error("write to '" + tmp_.string() + "' failed");
  out_.close();
  std::filesystem::rename(tmp_, path_);
  committed_ = true;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace pcwinter
