#include "toom/lattice.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <string>

#include "bytes.hpp"
#include "toom/error.hpp"

namespace toom {
namespace {

constexpr char kMagic[8] = {'T', 'O', 'O', 'M', 'C', 'K', 'P', 'T'};

template <typename F>
void for_each_lane(Word mask, F&& f) {
  for (; mask; mask &= mask - 1) f(std::countr_zero(mask));
}

SpinLattice bernoulli_lattice(Topology topology, std::size_t n, double density, RngState& rng) {
  SpinLattice lattice(topology, n);
  const DyadicProbability p(density);
  for (Word& w : lattice.words()) w = biased_word(rng, p);
  return lattice;
}

}  // namespace

SpinLattice::SpinLattice(Topology topology, std::size_t size) : topology_(topology) {
  if (size == 0) throw ConfigError("lattice size must be positive");
  words_.assign(size, 0);
}

void SpinLattice::set_spin(std::size_t site, int lane, int value) {
  const Word bit = Word{1} << lane;
  if (value < 0) {
    words_[site] |= bit;
  } else {
    words_[site] &= ~bit;
  }
}

void SpinLattice::advance_clock(double dt) {
  if (!(dt >= 0.0)) throw DomainError("clock increments must be nonnegative");
  clock_ += dt;
}

EventRecord apply_event(SpinLattice& lattice, std::size_t site, Word accept,
                        std::size_t crossing_site) {
  EventRecord rec;
  rec.site = site;
  std::span<Word> w = lattice.words();
  const std::size_t n = w.size();
  const Word first = w[site];
  const Word start = accept | first;
  rec.accepted = start;
  if (start == 0) return rec;

  w[site] ^= start;
  Word todo = start;
  if (lattice.topology() == Topology::HalfLine) {
    for (std::size_t j = site + 1; j < n && todo; ++j) {
      const Word flip = todo & (first ^ w[j]);
      w[j] ^= flip;
      todo &= ~flip;
    }
    rec.boundary_flip = todo;
    rec.partner_found = start & ~todo;
    return rec;
  }

  Word crossing = 0;
  auto scan = [&](std::size_t from, std::size_t to) {
    for (std::size_t j = from; j < to && todo; ++j) {
      if (j == crossing_site) crossing = todo;
      const Word flip = todo & (first ^ w[j]);
      w[j] ^= flip;
      todo &= ~flip;
    }
  };
  scan(site + 1, n);
  scan(0, site);
  // No opposite spin anywhere on the ring: undo the initiator flip.
  w[site] ^= todo;
  rec.no_op = todo;
  rec.partner_found = start & ~todo;
  rec.bond_crossing = crossing & ~todo;
  return rec;
}

LaneValues lane_magnetizations(const SpinLattice& lattice) {
  LaneValues down{};
  for (const Word w : lattice.words()) for_each_lane(w, [&](int lane) { ++down[lane]; });
  LaneValues m{};
  const auto size = static_cast<std::int64_t>(lattice.size());
  for (int k = 0; k < kLanes; ++k) m[k] = size - 2 * down[k];
  return m;
}

double IntegratedCurrent::mean_rate() const {
  const double span = t1 - t0;
  if (!(span > 0.0)) throw InsufficientData("current measured over an empty interval");
  double sum = 0.0;
  for (const auto c : counts) sum += static_cast<double>(c);
  return sum / (kLanes * span);
}

std::vector<std::uint8_t> checkpoint(const SpinLattice& lattice, const RngState& rng) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.push_back(kCheckpointVersion);
  out.push_back(static_cast<std::uint8_t>(lattice.topology()));
  detail::put_u64(out, lattice.size());
  detail::put_f64(out, lattice.clock());
  rng.serialize(out);
  for (const Word w : lattice.words()) detail::put_u64(out, w);
  return out;
}

std::pair<SpinLattice, RngState> restore(std::span<const std::uint8_t> blob) {
  if (blob.size() < sizeof kMagic || std::memcmp(blob.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatError("checkpoint: bad magic");
  }
  blob = blob.subspan(sizeof kMagic);
  const std::uint8_t version = detail::get_u8(blob);
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint8_t tag = detail::get_u8(blob);
  if (tag > 1) throw FormatError("checkpoint: unknown topology tag");
  const std::uint64_t size = detail::get_u64(blob);
  const double clock = detail::get_f64(blob);
  RngState rng = RngState::deserialize(blob);
  if (size == 0 || blob.size() != size * 8) {
    throw FormatError("checkpoint: word array does not match the declared size");
  }
  if (!(clock >= 0.0) || !std::isfinite(clock)) throw FormatError("checkpoint: bad clock");
  SpinLattice lattice(static_cast<Topology>(tag), size);
  for (Word& w : lattice.words()) w = detail::get_u64(blob);
  lattice.advance_clock(clock);
  return {std::move(lattice), std::move(rng)};
}

ToomEngine::ToomEngine(SpinLattice lattice, const ModelParams& params, RngState rng, TimeMode mode)
    : lattice_(std::move(lattice)),
      params_(params),
      bias_(params.lambda()),
      rng_(std::move(rng)),
      mode_(mode),
      magnetization_(lane_magnetizations(lattice_)) {}

ToomEngine ToomEngine::half_line(std::size_t n, const ModelParams& params, std::uint64_t seed,
                                 double init_density, std::uint64_t stream, TimeMode mode) {
  if (n < 2) throw ConfigError("half-line window needs n >= 2");
  RngState rng(seed, stream);
  SpinLattice lattice = bernoulli_lattice(Topology::HalfLine, n, init_density, rng);
  return ToomEngine(std::move(lattice), params, std::move(rng), mode);
}

ToomEngine ToomEngine::ring(std::size_t n, const ModelParams& params, std::uint64_t seed,
                            double density, std::uint64_t stream, TimeMode mode) {
  if (n < 2) throw ConfigError("ring needs N >= 2");
  RngState rng(seed, stream);
  SpinLattice lattice = bernoulli_lattice(Topology::Ring, n, density, rng);
  return ToomEngine(std::move(lattice), params, std::move(rng), mode);
}

double ToomEngine::draw_dt() {
  const double n = static_cast<double>(lattice_.size());
  return mode_ == TimeMode::Exact ? -std::log(rng_.uniform_open()) / n : 1.0 / n;
}

EventRecord ToomEngine::step(double dt) {
  const std::size_t site = rng_.uniform_index(lattice_.size());
  const Word bias = biased_word(rng_, bias_);
  return apply(site, bias, dt);
}

EventRecord ToomEngine::attempt_event() { return step(draw_dt()); }

EventRecord ToomEngine::apply(std::size_t site, Word bias, double dt) {
  const Word first = lattice_.words()[site];
  EventRecord rec = apply_event(lattice_, site, bias, crossing_site_);
  rec.dt = dt;
  lattice_.advance_clock(dt);
  if (rec.boundary_flip) {
    // Lone flips change M by +2 (- to +) or -2 (+ to -).
    for_each_lane(rec.boundary_flip & first, [&](int k) { magnetization_[k] += 2; });
    for_each_lane(rec.boundary_flip & ~first, [&](int k) { magnetization_[k] -= 2; });
  }
  if (rec.bond_crossing) {
    for_each_lane(rec.bond_crossing & ~first, [&](int k) { current_.counts[k] += 2; });
    for_each_lane(rec.bond_crossing & first, [&](int k) { current_.counts[k] -= 2; });
  }
  return rec;
}

std::uint64_t ToomEngine::advance_until(double t_target) {
  if (!(t_target >= lattice_.clock())) throw DomainError("target time lies in the past");
  std::uint64_t events = 0;
  for (;;) {
    const double dt = draw_dt();
    if (lattice_.clock() + dt > t_target) break;
    step(dt);
    ++events;
  }
  // The waiting time that ran past the target is discarded; for exponential
  // waits the residual is again exponential, so the next draw continues the
  // chain exactly.
  lattice_.advance_clock(t_target - lattice_.clock());
  return events;
}

void ToomEngine::start_current(std::size_t bond) {
  if (lattice_.topology() != Topology::Ring) {
    throw ConfigError("current tallies are defined on the ring only");
  }
  if (bond >= lattice_.size()) throw ConfigError("bond index out of range");
  crossing_site_ = (bond + 1) % lattice_.size();
  current_ = IntegratedCurrent{};
  current_.bond = bond;
  current_.t0 = lattice_.clock();
}

IntegratedCurrent ToomEngine::current() const {
  IntegratedCurrent c = current_;
  c.t1 = lattice_.clock();
  return c;
}

ToomEngine ToomEngine::resume(std::span<const std::uint8_t> blob, const ModelParams& params,
                              TimeMode mode) {
  auto [lattice, rng] = restore(blob);
  return ToomEngine(std::move(lattice), params, std::move(rng), mode);
}

}  // namespace toom
