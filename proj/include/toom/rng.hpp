#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace toom {

/// One machine word of spins: bit k holds the spin of replica (lane) k.
using Word = std::uint64_t;
inline constexpr int kLanes = 64;

/// Probability rounded to 32 binary digits, numerator over 2^32 in [0, 2^32].
class DyadicProbability {
 public:
  /// Throws DomainError unless 0 <= p <= 1.
  explicit DyadicProbability(double p);

  std::uint64_t numerator() const { return numerator_; }
  double value() const { return static_cast<double>(numerator_) / 4294967296.0; }

 private:
  std::uint64_t numerator_;
};

/// Seeded 64-bit generator (Mersenne twister) with a stream identifier.
/// Distinct (seed, stream) pairs seed through std::seed_seq and give
/// independent sequences.
class RngState {
 public:
  explicit RngState(std::uint64_t seed, std::uint64_t stream = 0);

  Word next_word() { return engine_(); }

  /// Uniform integer in [0, n) by 128-bit multiply-shift (bias below n / 2^64).
  std::size_t uniform_index(std::size_t n) {
    const auto product = static_cast<unsigned __int128>(engine_()) * n;
    return static_cast<std::size_t>(product >> 64);
  }

  /// Uniform double in (0, 1].
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Appends seed, stream and the full generator state (little endian).
  void serialize(std::vector<std::uint8_t>& out) const;
  /// Reads what serialize wrote; advances `in`. Throws FormatError.
  static RngState deserialize(std::span<const std::uint8_t>& in);

  static constexpr std::size_t kSerializedBytes = 8 * (2 + 313);

  friend bool operator==(const RngState& a, const RngState& b) {
    return a.seed_ == b.seed_ && a.stream_ == b.stream_ && a.engine_ == b.engine_;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// Word whose bits are independently 1 with probability `p`: scan the binary
/// digits of p from the least significant set digit upward, OR-ing a fresh
/// random word for a 1 digit and AND-ing one for a 0 digit.
Word biased_word(RngState& rng, const DyadicProbability& p);

}  // namespace toom
