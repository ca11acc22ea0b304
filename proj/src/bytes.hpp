#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "toom/error.hpp"

namespace toom::detail {

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline std::uint64_t get_u64(std::span<const std::uint8_t>& in) {
  if (in.size() < 8) throw FormatError("checkpoint: truncated blob");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  in = in.subspan(8);
  return v;
}

inline double get_f64(std::span<const std::uint8_t>& in) {
  return std::bit_cast<double>(get_u64(in));
}

inline std::uint8_t get_u8(std::span<const std::uint8_t>& in) {
  if (in.empty()) throw FormatError("checkpoint: truncated blob");
  const std::uint8_t v = in[0];
  in = in.subspan(1);
  return v;
}

}  // namespace toom::detail
