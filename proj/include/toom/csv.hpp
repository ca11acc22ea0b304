#pragma once

// Minimal CSV I/O with fixed headers. Doubles are written in the shortest
// form that round-trips, so output bytes depend only on the values.

#include <concepts>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace toom {

std::string format_number(double x);
std::string format_number(std::int64_t x);
std::string format_number(std::uint64_t x);
template <std::integral I>
std::string format_number(I x) {
  if constexpr (std::is_signed_v<I>) {
    return format_number(static_cast<std::int64_t>(x));
  } else {
    return format_number(static_cast<std::uint64_t>(x));
  }
}
inline std::string format_number(std::string_view s) { return std::string(s); }
inline std::string format_number(const std::string& s) { return s; }
inline std::string format_number(const char* s) { return s; }

/// Throws FormatError on anything but a complete number.
double parse_double(std::string_view field);
std::int64_t parse_int(std::string_view field);

class CsvWriter {
 public:
  /// Creates or truncates `path` and writes the header. Throws IoError.
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  template <typename... Fields>
  void row(const Fields&... fields) {
    static_assert(sizeof...(Fields) > 0);
    std::string line;
    ((line += format_number(fields), line += ','), ...);
    line.back() = '\n';
    write_line(line, sizeof...(Fields));
  }

  /// Flushes and checks the stream. Throws IoError.
  void close();

 private:
  void write_line(const std::string& line, std::size_t fields);

  std::filesystem::path path_;
  std::size_t columns_;
  std::ofstream out_;
};

class CsvReader {
 public:
  /// Opens `path` and checks that its header equals `expected`. Throws IoError
  /// when the file cannot be read, FormatError on a header mismatch.
  CsvReader(const std::filesystem::path& path, const std::vector<std::string>& expected);

  /// Reads the next row; false at end of file. Throws FormatError for a row
  /// with the wrong number of fields.
  bool next(std::vector<std::string_view>& fields);

 private:
  std::filesystem::path path_;
  std::size_t columns_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_no_ = 1;
};

}  // namespace toom
