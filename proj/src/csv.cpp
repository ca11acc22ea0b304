#include "toom/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "toom/error.hpp"

namespace toom {
namespace {

template <typename T>
std::string to_text(T x) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return to_text(x);
}

std::string format_number(std::int64_t x) { return to_text(x); }
std::string format_number(std::uint64_t x) { return to_text(x); }

double parse_double(std::string_view field) {
  if (field == "nan") return std::nan("");
  double x = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FormatError("not a number: '" + std::string(field) + "'");
  }
  return x;
}

std::int64_t parse_int(std::string_view field) {
  std::int64_t x = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FormatError("not an integer: '" + std::string(field) + "'");
  }
  return x;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : path_(path), columns_(header.size()), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  std::string line;
  for (const auto& h : header) line += h + ',';
  line.back() = '\n';
  out_ << line;
}

void CsvWriter::write_line(const std::string& line, std::size_t fields) {
  if (fields != columns_) throw FormatError("CSV row width does not match the header");
  out_ << line;
  if (!out_) throw IoError("write failed: " + path_.string());
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw IoError("write failed: " + path_.string());
  out_.close();
}

CsvReader::CsvReader(const std::filesystem::path& path, const std::vector<std::string>& expected)
    : path_(path), columns_(expected.size()), in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open " + path.string());
  if (!std::getline(in_, line_)) throw FormatError(path.string() + ": missing header");
  const auto got = split(line_);
  bool same = got.size() == expected.size();
  for (std::size_t i = 0; same && i < got.size(); ++i) same = got[i] == expected[i];
  if (!same) throw FormatError(path.string() + ": unexpected header '" + line_ + "'");
}

bool CsvReader::next(std::vector<std::string_view>& fields) {
  while (std::getline(in_, line_)) {
    ++line_no_;
    if (line_.empty()) continue;
    fields = split(line_);
    if (fields.size() != columns_) {
      throw FormatError(path_.string() + ":" + std::to_string(line_no_) + ": expected " +
                        std::to_string(columns_) + " fields");
    }
    return true;
  }
  if (in_.bad()) throw IoError("read failed: " + path_.string());
  return false;
}

}  // namespace toom
