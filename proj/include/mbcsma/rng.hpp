#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace mbcsma {

/// Deterministic pseudo-random source for one simulation run.
///
/// A run owns exactly one Rng; every random decision (backoff draws, band
/// selection, winner election) consumes from it in event-dispatch order, so
/// a (seed, config) pair fully determines a run.  Bounded draws use rejection
/// sampling on top of the raw 64-bit stream instead of
/// std::uniform_int_distribution, whose output is not pinned by the standard;
/// this keeps traces byte-identical across standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Uniform integer in [lo, hi], both bounds inclusive.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw std::logic_error("Rng::uniform_int: lo > hi");
    const std::uint64_t span = hi - lo + 1;  // span == 0 means the full range
    std::uint64_t value;
    if (span == 0) {
      value = next();
    } else {
      // Reject the tail of the 64-bit range that does not divide evenly.
      const std::uint64_t limit = std::uint64_t(-span) % span;  // 2^64 mod span
      do {
        value = next();
      } while (value < limit);
      value %= span;
    }
    return lo + value;
  }

  std::uint64_t seed() const { return seed_; }

  /// Number of raw 64-bit words consumed so far (the stream position).
  std::uint64_t position() const { return position_; }

 private:
  std::uint64_t next() {
    ++position_;
    return engine_();
  }

  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
};

}  // namespace mbcsma
