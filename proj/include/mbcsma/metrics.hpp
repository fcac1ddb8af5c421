#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mbcsma/time.hpp"

namespace mbcsma {

/// Tally of contention rounds that had the same number of simultaneous
/// transmitters, for conditional collision statistics.
struct RoundStats {
  std::uint64_t rounds = 0;
  std::uint64_t attempts = 0;            ///< transmitters summed over rounds
  std::uint64_t collided = 0;            ///< attempts undecodable at the responder
  std::uint64_t grants = 0;
  std::uint64_t virtual_collisions = 0;
  std::uint64_t all_collided = 0;
};

/// Everything one run produces.  Rate metrics (attempts, collisions, payload
/// bits, delays, round buckets) cover only the measurement window after
/// warmup; structural counters cover the whole run.
struct RunMetrics {
  std::uint64_t rts_attempts = 0;
  std::uint64_t rts_collisions = 0;
  double acked_payload_bits = 0.0;
  std::vector<nanos_t> delays;  ///< head-of-queue to ACK, one per exchange
  nanos_t sim_duration = 0;     ///< measurement window length

  std::uint64_t exchanges_completed = 0;  ///< measured (post-warmup)
  std::uint64_t exchanges_total = 0;      ///< including warmup
  std::uint64_t grants = 0;
  std::uint64_t virtual_collisions = 0;
  std::uint64_t corrupted_data_receptions = 0;  ///< DATA undecodable at its destination
  std::uint64_t corrupted_cts_receptions = 0;   ///< CTS undecodable at any listener
  std::vector<std::uint64_t> completions_by_station;
  std::vector<RoundStats> rounds_by_k;  ///< indexed by transmitter count
};

/// Fraction of resolved RTS attempts that were undecodable at the receiver.
inline double collision_probability(std::uint64_t attempts,
                                    std::uint64_t collisions) {
  if (attempts == 0) return 0.0;
  return static_cast<double>(collisions) / static_cast<double>(attempts);
}

/// Acknowledged payload bits per second over the measurement window.
inline double saturation_throughput_bps(double acked_payload_bits,
                                        nanos_t duration) {
  if (duration <= 0) return 0.0;
  return acked_payload_bits / seconds_from_nanos(duration);
}

/// Empirical delay distribution; quantiles use the smallest sample whose
/// cumulative rank reaches the requested fraction.
class DelayCdf {
 public:
  explicit DelayCdf(std::vector<nanos_t> samples) : sorted_(std::move(samples)) {
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::size_t count() const { return sorted_.size(); }
  bool empty() const { return sorted_.empty(); }

  nanos_t quantile_ns(double q) const {
    if (sorted_.empty()) {
      throw std::logic_error("DelayCdf::quantile_ns: no samples");
    }
    if (q < 0.0 || q > 1.0) {
      throw std::invalid_argument("DelayCdf::quantile_ns: q outside [0, 1]");
    }
    if (q == 0.0) return sorted_.front();
    const auto rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(sorted_.size())));
    return sorted_[std::min(rank, sorted_.size()) - 1];
  }

  double quantile_seconds(double q) const {
    return seconds_from_nanos(quantile_ns(q));
  }

  double mean_seconds() const {
    if (sorted_.empty()) return 0.0;
    double acc = 0.0;
    for (nanos_t d : sorted_) acc += seconds_from_nanos(d);
    return acc / static_cast<double>(sorted_.size());
  }

 private:
  std::vector<nanos_t> sorted_;
};

/// Relative throughput improvement of a multiband run over the single-band
/// baseline, in percent.
inline double throughput_gain_percent(double multiband_bps,
                                      double singleband_bps) {
  if (singleband_bps <= 0.0) {
    throw std::invalid_argument("throughput_gain_percent: baseline <= 0");
  }
  return 100.0 * (multiband_bps - singleband_bps) / singleband_bps;
}

/// Delay improvement of a multiband run versus the single-band baseline,
/// expressed in percent of the multiband delay: halving the delay is a 100%
/// gain.
inline double delay_gain_percent(double singleband_delay,
                                 double multiband_delay) {
  if (multiband_delay <= 0.0) {
    throw std::invalid_argument("delay_gain_percent: multiband delay <= 0");
  }
  return 100.0 * (singleband_delay - multiband_delay) / multiband_delay;
}

/// Exact probabilities for one contention round in which `transmitters`
/// stations each pick one of `n_bands` bands independently and uniformly.
struct SlotOracle {
  double p_station_collision = 0.0;  ///< a tagged station shares its band
  double p_round_success = 0.0;      ///< some band holds exactly one station
};

/// Enumerates all n_bands^transmitters band assignments.  Guarded so the
/// state space stays small; closed forms exist for the station metric but the
/// enumeration is the reference the simulator is checked against.
inline SlotOracle slot_oracle(std::uint32_t transmitters,
                              std::uint32_t n_bands) {
  if (transmitters == 0 || n_bands == 0) {
    throw std::invalid_argument("slot_oracle: empty round");
  }
  double space = 1.0;
  for (std::uint32_t i = 0; i < transmitters; ++i) {
    space *= static_cast<double>(n_bands);
    if (space > 1e7) {
      throw std::invalid_argument("slot_oracle: state space too large");
    }
  }

  std::vector<std::uint32_t> assignment(transmitters, 0);
  std::vector<std::uint32_t> occupancy(n_bands, 0);
  std::uint64_t tagged_collided = 0;
  std::uint64_t round_succeeded = 0;
  std::uint64_t total = 0;

  for (;;) {
    std::fill(occupancy.begin(), occupancy.end(), 0);
    for (std::uint32_t band : assignment) ++occupancy[band];
    ++total;
    if (occupancy[assignment[0]] >= 2) ++tagged_collided;
    if (std::find(occupancy.begin(), occupancy.end(), 1u) != occupancy.end()) {
      ++round_succeeded;
    }

    std::uint32_t pos = 0;
    while (pos < transmitters && ++assignment[pos] == n_bands) {
      assignment[pos] = 0;
      ++pos;
    }
    if (pos == transmitters) break;
  }

  SlotOracle oracle;
  oracle.p_station_collision =
      static_cast<double>(tagged_collided) / static_cast<double>(total);
  oracle.p_round_success =
      static_cast<double>(round_succeeded) / static_cast<double>(total);
  return oracle;
}

/// Closed form for the tagged-station collision probability:
/// 1 - ((n_bands - 1) / n_bands)^(transmitters - 1).
inline double p_station_collision_closed_form(std::uint32_t transmitters,
                                              std::uint32_t n_bands) {
  if (transmitters == 0 || n_bands == 0) {
    throw std::invalid_argument("p_station_collision_closed_form: empty round");
  }
  const double miss = (static_cast<double>(n_bands) - 1.0) /
                      static_cast<double>(n_bands);
  return 1.0 - std::pow(miss, static_cast<double>(transmitters - 1));
}

}  // namespace mbcsma
