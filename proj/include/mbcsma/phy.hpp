#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbcsma/time.hpp"

namespace mbcsma {

/// Physical-layer and interframe parameters.  Defaults model an 802.11n-class
/// link; all sizes are in bits, all times in seconds.
struct PhyParams {
  double payload_bits = 8184.0;
  double mac_header_bits = 272.0;
  double phy_header_bits = 128.0;
  double ack_bits = 112.0;        ///< excluding the PHY header
  double rts_bits = 160.0;        ///< excluding the PHY header
  double cts_bits = 112.0;        ///< excluding the PHY header
  double channel_bit_rate = 72.2e6;
  double propagation_delay = 1e-6;
  double sifs = 10e-6;
  double slot_time = 9e-6;
  double difs = 28e-6;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0)) {
        throw std::invalid_argument(std::string("PhyParams: ") + name +
                                    " must be positive");
      }
    };
    positive(payload_bits, "payload_bits");
    positive(mac_header_bits, "mac_header_bits");
    positive(phy_header_bits, "phy_header_bits");
    positive(ack_bits, "ack_bits");
    positive(rts_bits, "rts_bits");
    positive(cts_bits, "cts_bits");
    positive(channel_bit_rate, "channel_bit_rate");
    positive(propagation_delay, "propagation_delay");
    positive(sifs, "sifs");
    positive(slot_time, "slot_time");
    positive(difs, "difs");
    if (difs <= sifs) {
      throw std::invalid_argument("PhyParams: difs must exceed sifs");
    }
  }
};

/// Contiguous spectrum divided into n_bands equal sub-bands.
struct BandPlan {
  std::uint32_t n_bands = 1;

  void validate() const {
    if (n_bands < 1) throw std::invalid_argument("BandPlan: n_bands must be >= 1");
    if (n_bands > 32) throw std::invalid_argument("BandPlan: at most 32 bands");
  }
};

/// Set of band indices as a bitmask (band i <-> bit i).
using BandSet = std::uint32_t;

inline BandSet all_bands(const BandPlan& plan) {
  return plan.n_bands == 32 ? ~BandSet{0}
                            : ((BandSet{1} << plan.n_bands) - 1);
}

inline BandSet band_bit(std::uint32_t band) { return BandSet{1} << band; }

inline bool bands_overlap(BandSet a, BandSet b) { return (a & b) != 0; }

inline int band_count(BandSet s) { return __builtin_popcount(s); }

/// Contiguous block of `span` bands starting at `first`.
inline BandSet band_block(std::uint32_t first, std::uint32_t span) {
  BandSet block = span == 32 ? ~BandSet{0} : ((BandSet{1} << span) - 1);
  return block << first;
}

enum class FrameKind : std::uint8_t { Rts, Cts, Data, Ack };

inline const char* to_string(FrameKind kind) {
  switch (kind) {
    case FrameKind::Rts: return "RTS";
    case FrameKind::Cts: return "CTS";
    case FrameKind::Data: return "DATA";
    case FrameKind::Ack: return "ACK";
  }
  return "?";
}

/// Frame air time in seconds.  Control and data frames carry a PHY header;
/// DATA additionally carries the MAC header and payload.  The duration does
/// not depend on how many bands the frame occupies.
inline double frame_duration_seconds(FrameKind kind, const PhyParams& p) {
  double bits = p.phy_header_bits;
  switch (kind) {
    case FrameKind::Rts: bits += p.rts_bits; break;
    case FrameKind::Cts: bits += p.cts_bits; break;
    case FrameKind::Ack: bits += p.ack_bits; break;
    case FrameKind::Data: bits += p.mac_header_bits + p.payload_bits; break;
  }
  return bits / p.channel_bit_rate;
}

/// All protocol durations pre-converted to integer nanoseconds (rounded up),
/// so the event loop never handles fractional time.
struct PhyTiming {
  nanos_t rts = 0;
  nanos_t cts = 0;
  nanos_t data = 0;
  nanos_t ack = 0;
  nanos_t prop = 0;
  nanos_t sifs = 0;
  nanos_t slot = 0;
  nanos_t difs = 0;

  /// Virtual-carrier-sense reservation carried by an RTS: the time from the
  /// end of the RTS to the end of the closing ACK.
  nanos_t rts_nav = 0;
  /// Same, carried by a CTS: from the end of the CTS to the end of the ACK.
  nanos_t cts_nav = 0;

  /// How long an RTS sender waits for a CTS after finishing its RTS.
  nanos_t cts_timeout = 0;
  /// How long a DATA sender waits for the ACK after finishing its DATA.
  nanos_t ack_timeout = 0;
  /// How long the AP waits for the granted DATA to start arriving after the
  /// end of its CTS.
  nanos_t ap_watchdog = 0;

  static PhyTiming from(const PhyParams& p) {
    PhyTiming t;
    t.rts = nanos_ceil_from_seconds(frame_duration_seconds(FrameKind::Rts, p));
    t.cts = nanos_ceil_from_seconds(frame_duration_seconds(FrameKind::Cts, p));
    t.data = nanos_ceil_from_seconds(frame_duration_seconds(FrameKind::Data, p));
    t.ack = nanos_ceil_from_seconds(frame_duration_seconds(FrameKind::Ack, p));
    t.prop = nanos_ceil_from_seconds(p.propagation_delay);
    t.sifs = nanos_ceil_from_seconds(p.sifs);
    t.slot = nanos_ceil_from_seconds(p.slot_time);
    t.difs = nanos_ceil_from_seconds(p.difs);
    t.rts_nav = 3 * t.prop + 3 * t.sifs + t.cts + t.data + t.ack;
    t.cts_nav = 2 * t.prop + 2 * t.sifs + t.data + t.ack;
    t.cts_timeout = t.sifs + t.cts + 2 * t.prop + t.slot;
    t.ack_timeout = t.sifs + t.ack + 2 * t.prop + t.slot;
    t.ap_watchdog = t.sifs + t.prop + t.slot;
    return t;
  }

  nanos_t frame(FrameKind kind) const {
    switch (kind) {
      case FrameKind::Rts: return rts;
      case FrameKind::Cts: return cts;
      case FrameKind::Data: return data;
      case FrameKind::Ack: return ack;
    }
    return 0;
  }
};

using NodeId = std::uint32_t;
constexpr NodeId kNoNode = ~NodeId{0};

/// One MAC frame.  `bands` is the set of sub-bands the frame occupies: an
/// RTS uses the sender's chosen span, CTS/DATA/ACK always occupy the whole
/// spectrum.  `nav_duration` is the channel reservation announced to third
/// parties, counted from the end of this frame.
struct Frame {
  FrameKind kind = FrameKind::Rts;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  BandSet bands = 0;
  nanos_t duration = 0;
  nanos_t nav_duration = 0;
  /// CTS only: stations whose RTS the responder decoded this round.  Lets a
  /// contender learn whether it lost the draw or was never heard.
  std::vector<NodeId> decoded_senders;
};

}  // namespace mbcsma
