#pragma once

// Multispin-coded continuous-time simulation of the Toom spin exchange model.
//
// Site j of the lattice is one 64-bit word; bit k of that word is the spin of
// replica k (1 = spin -1, 0 = spin +1). All replicas share the chosen site of
// every event, so they are exact copies of the process marginally but are not
// independent of each other.

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "toom/coefficients.hpp"
#include "toom/rng.hpp"

namespace toom {

enum class Topology : std::uint8_t { HalfLine = 0, Ring = 1 };

/// Exact uniformization (exponential waiting times) or deterministic 1/size
/// increments for throughput runs.
enum class TimeMode { Exact, Fast };

using LaneValues = std::array<std::int64_t, kLanes>;

class SpinLattice {
 public:
  /// All spins +1, clock 0. Throws ConfigError for size 0.
  SpinLattice(Topology topology, std::size_t size);

  Topology topology() const { return topology_; }
  std::size_t size() const { return words_.size(); }
  double clock() const { return clock_; }

  std::span<const Word> words() const { return words_; }
  std::span<Word> words() { return words_; }

  /// +1 or -1.
  int spin(std::size_t site, int lane) const {
    return ((words_[site] >> lane) & 1u) ? -1 : 1;
  }
  void set_spin(std::size_t site, int lane, int value);

  /// Throws DomainError for negative dt.
  void advance_clock(double dt);

  friend bool operator==(const SpinLattice&, const SpinLattice&) = default;

 private:
  Topology topology_;
  std::vector<Word> words_;
  double clock_ = 0.0;
};

/// Outcome of one attempted event, per lane.
struct EventRecord {
  std::size_t site = 0;
  Word accepted = 0;        ///< lanes that attempted an exchange
  Word partner_found = 0;   ///< lanes that exchanged with an opposite spin
  Word boundary_flip = 0;   ///< half-line lanes that flipped alone (block rule)
  Word no_op = 0;           ///< ring lanes with no opposite spin anywhere
  Word bond_crossing = 0;   ///< lanes whose exchange path crossed the tracked bond
  double dt = 0.0;
};

inline constexpr std::size_t kNoBond = std::numeric_limits<std::size_t>::max();

/// Deterministic core of an event: flip `site` in the lanes of `accept`, then
/// scan to the right (clockwise on the ring) and in each lane flip the first
/// spin opposite to the initiator's original spin. On the half-line the scan
/// stops at the last site and lanes without a partner keep the lone flip; on
/// the ring the scan covers size-1 sites and lanes without a partner are
/// restored. `crossing_site` is the site right of a tracked bond (or kNoBond).
/// Does not touch the clock.
EventRecord apply_event(SpinLattice& lattice, std::size_t site, Word accept,
                        std::size_t crossing_site = kNoBond);

/// Per lane M = sum of spins = size - 2 * (number of 1 bits in that lane).
LaneValues lane_magnetizations(const SpinLattice& lattice);

/// Net magnetization carried rightward across one bond of a ring, per lane.
/// An exchange moving a + spin across the bond counts +2, a - spin -2.
struct IntegratedCurrent {
  std::size_t bond = 0;  ///< bond between sites `bond` and `bond + 1` (mod N)
  LaneValues counts{};
  double t0 = 0.0;
  double t1 = 0.0;

  /// Lane average of count / (t1 - t0).
  double mean_rate() const;
};

/// Serialise a lattice and its generator: "TOOMCKPT", version byte, topology
/// byte, u64 size, f64 clock, generator state, raw words (all little endian).
std::vector<std::uint8_t> checkpoint(const SpinLattice& lattice, const RngState& rng);

/// Inverse of checkpoint. Throws FormatError on a bad magic, version,
/// topology, or a truncated / oversized blob.
std::pair<SpinLattice, RngState> restore(std::span<const std::uint8_t> blob);

inline constexpr std::uint8_t kCheckpointVersion = 1;

class ToomEngine {
 public:
  ToomEngine(SpinLattice lattice, const ModelParams& params, RngState rng,
             TimeMode mode = TimeMode::Exact);

  /// Window [1, n] of the half-line. Every spin is -1 with probability
  /// `init_density`, independently over sites and lanes. Throws ConfigError for n < 2.
  static ToomEngine half_line(std::size_t n, const ModelParams& params, std::uint64_t seed,
                              double init_density = 0.5, std::uint64_t stream = 0,
                              TimeMode mode = TimeMode::Exact);

  /// Ring of N sites with Bernoulli initial spins as above. Throws ConfigError for N < 2.
  static ToomEngine ring(std::size_t n, const ModelParams& params, std::uint64_t seed,
                         double density, std::uint64_t stream = 0,
                         TimeMode mode = TimeMode::Exact);

  const SpinLattice& lattice() const { return lattice_; }
  const RngState& rng() const { return rng_; }
  double clock() const { return lattice_.clock(); }
  const ModelParams& params() const { return params_; }
  TimeMode mode() const { return mode_; }

  /// Uniform site, acceptance word biased_word(lambda) | spins[site], waiting time.
  EventRecord attempt_event();

  /// One event with externally supplied decisions; the clock advances by dt.
  EventRecord apply(std::size_t site, Word bias, double dt);

  /// Runs every event with time <= t_target, then sets the clock to t_target
  /// (the state is the process at exactly t_target). Returns the number of
  /// events. Throws DomainError for a target in the past. In fast mode the
  /// deterministic grid restarts at t_target.
  std::uint64_t advance_until(double t_target);

  /// Per-lane magnetization, maintained incrementally.
  const LaneValues& magnetizations() const { return magnetization_; }

  /// Starts tallying the current across `bond` (ring only) from the present time.
  void start_current(std::size_t bond);
  void stop_current() { crossing_site_ = kNoBond; }
  IntegratedCurrent current() const;

  std::vector<std::uint8_t> checkpoint() const { return toom::checkpoint(lattice_, rng_); }
  static ToomEngine resume(std::span<const std::uint8_t> blob, const ModelParams& params,
                           TimeMode mode = TimeMode::Exact);

 private:
  double draw_dt();
  EventRecord step(double dt);

  SpinLattice lattice_;
  ModelParams params_;
  DyadicProbability bias_;
  RngState rng_;
  TimeMode mode_;
  LaneValues magnetization_{};
  std::size_t crossing_site_ = kNoBond;
  IntegratedCurrent current_{};
};

}  // namespace toom
