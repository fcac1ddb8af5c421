#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbcsma/time.hpp"

namespace mbcsma {

/// Coarse classification of a scheduled event, as it appears in traces.
enum class EventKind : std::uint8_t {
  TransmissionStart,  ///< a frame leaves its transmitter's antenna
  TransmissionEnd,    ///< the transmitter finishes sending
  TimerExpiry,        ///< protocol timer (backoff, timeout, arrival edge, ...)
  SlotBoundary,       ///< generic slot tick; unused by the MAC, free for tests
};

inline const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::TransmissionStart: return "TransmissionStart";
    case EventKind::TransmissionEnd: return "TransmissionEnd";
    case EventKind::TimerExpiry: return "TimerExpiry";
    case EventKind::SlotBoundary: return "SlotBoundary";
  }
  return "?";
}

/// Fine-grained purpose of an event.  The engine treats this as opaque; the
/// simulation layer uses it to route dispatch, and the trace renderer uses it
/// to produce the human-readable detail column.
enum class EventTag : std::uint8_t {
  None,
  TxStart,        ///< payload = transmission id
  TxEnd,          ///< payload = transmission id
  ArrivalStart,   ///< payload = transmission id; listeners' channel goes busy
  ArrivalEnd,     ///< payload = transmission id; listeners' channel may idle
  Attempt,        ///< subject station's DIFS + backoff countdown completes
  CtsTimeout,     ///< subject station gave up waiting for a CTS
  AckTimeout,     ///< subject station gave up waiting for an ACK
  ApWatchdog,     ///< subject AP gave up waiting for the granted DATA
  Bootstrap,      ///< initial packet arrival at subject station
  Custom,         ///< reserved for tests
};

/// One pending or dispatched event.
struct SimEvent {
  nanos_t time = 0;
  EventKind kind = EventKind::TimerExpiry;
  std::uint32_t subject = 0;   ///< node the event concerns
  EventTag tag = EventTag::None;
  std::int64_t payload = 0;    ///< tag-specific datum (e.g. transmission id)
};

/// One line of a recorded trace.
struct TraceRecord {
  nanos_t time = 0;
  EventKind kind = EventKind::TimerExpiry;
  std::uint32_t subject = 0;
  std::string detail;
};

/// Dispatched-event log for a run, in dispatch order.
struct EventTrace {
  std::vector<TraceRecord> records;

  /// Renders the canonical "time_ns,kind,subject,detail" line format.
  std::string serialize() const {
    std::string out;
    for (const TraceRecord& r : records) {
      out += std::to_string(r.time);
      out += ',';
      out += to_string(r.kind);
      out += ',';
      out += std::to_string(r.subject);
      out += ',';
      out += r.detail;
      out += '\n';
    }
    return out;
  }
};

}  // namespace mbcsma
