#pragma once

#include <cmath>
#include <cstdint>

namespace mbcsma {

/// Simulation time in integer nanoseconds since run start.
using nanos_t = std::int64_t;

/// Converts a duration in seconds to nanoseconds, rounding up so that a
/// frame or interframe gap is never shorter on the wire than its physical
/// duration.
inline nanos_t nanos_ceil_from_seconds(double seconds) {
  return static_cast<nanos_t>(std::ceil(seconds * 1e9));
}

inline double seconds_from_nanos(nanos_t ns) {
  return static_cast<double>(ns) * 1e-9;
}

}  // namespace mbcsma
