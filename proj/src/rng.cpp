#include "toom/rng.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "bytes.hpp"
#include "toom/error.hpp"

namespace toom {

DyadicProbability::DyadicProbability(double p) : numerator_(0) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability must lie in [0, 1]");
  numerator_ = static_cast<std::uint64_t>(std::llround(p * 4294967296.0));
}

RngState::RngState(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x70u, 0x6f6du};
  engine_.seed(seq);
}

void RngState::serialize(std::vector<std::uint8_t>& out) const {
  detail::put_u64(out, seed_);
  detail::put_u64(out, stream_);
  // The standard only exposes the engine state through its text form: 312
  // state words followed by the position index.
  std::ostringstream text;
  text << engine_;
  std::istringstream words(text.str());
  std::uint64_t v = 0;
  std::size_t count = 0;
  while (words >> v) {
    detail::put_u64(out, v);
    ++count;
  }
  if (count != 313) throw FormatError("unexpected mt19937_64 state layout");
}

RngState RngState::deserialize(std::span<const std::uint8_t>& in) {
  RngState rng(0, 0);
  rng.seed_ = detail::get_u64(in);
  rng.stream_ = detail::get_u64(in);
  std::ostringstream text;
  for (int i = 0; i < 313; ++i) {
    if (i) text << ' ';
    text << detail::get_u64(in);
  }
  std::istringstream parse(text.str());
  parse >> rng.engine_;
  if (parse.fail()) throw FormatError("checkpoint: corrupt generator state");
  return rng;
}

Word biased_word(RngState& rng, const DyadicProbability& p) {
  const std::uint64_t num = p.numerator();
  if (num == 0) return 0;
  if (num >= (std::uint64_t{1} << 32)) return ~Word{0};
  int digit = std::countr_zero(num);
  Word w = rng.next_word();
  for (++digit; digit < 32; ++digit) {
    if ((num >> digit) & 1u) {
      w |= rng.next_word();
    } else {
      w &= rng.next_word();
    }
  }
  return w;
}

}  // namespace toom
