#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "mbcsma/engine.hpp"
#include "mbcsma/event.hpp"
#include "mbcsma/phy.hpp"
#include "mbcsma/time.hpp"
#include "mbcsma/topology.hpp"

namespace mbcsma {

/// A frame in flight.  Reception at every listener spans
/// [tx_start + prop, tx_end + prop) because propagation delay is a single
/// cell-wide constant.
struct Transmission {
  std::uint32_t id = 0;
  Frame frame;
  nanos_t tx_start = 0;
  nanos_t tx_end = 0;
  nanos_t arr_start = 0;
  nanos_t arr_end = 0;

  /// Per-listener corruption bits: set when another audible transmission
  /// overlapped this one on a shared band, or the listener itself was
  /// transmitting during the reception window.
  std::array<std::uint64_t, 4> corrupted{};
  /// Per-responder bits marking that this frame was already folded into a
  /// contention decision.  Kept per node: partially connected topologies can
  /// legitimately have two responders resolve the same RTS.
  std::array<std::uint64_t, 4> resolved{};

  bool corrupted_at(NodeId node) const {
    return (corrupted[node >> 6] >> (node & 63)) & 1;
  }
  void mark_corrupted(NodeId node) {
    corrupted[node >> 6] |= std::uint64_t{1} << (node & 63);
  }
  bool resolved_by(NodeId node) const {
    return (resolved[node >> 6] >> (node & 63)) & 1;
  }
  void mark_resolved_by(NodeId node) {
    resolved[node >> 6] |= std::uint64_t{1} << (node & 63);
  }
};

/// Receives medium notifications.  Implemented by the simulation layer, which
/// routes them to node state machines.
class MediumDelegate {
 public:
  virtual ~MediumDelegate() = default;
  /// The listener's channel transitioned idle -> busy.
  virtual void channel_busy(NodeId listener) = 0;
  /// The listener's channel transitioned busy -> idle.
  virtual void channel_idle(NodeId listener) = 0;
  /// A frame started arriving at an audible listener.
  virtual void arrival_begun(NodeId listener, const Transmission& tx) = 0;
  /// A frame finished arriving at an audible listener.
  virtual void arrival_complete(NodeId listener, const Transmission& tx) = 0;
  /// The source finished transmitting (antenna released).
  virtual void transmit_finished(const Transmission& tx) = 0;
};

/// Shared radio medium.  Tracks frames in flight, derives per-listener
/// busy/idle transitions, and marks collisions (overlapping same-band
/// receptions) as they become inevitable.
class Medium {
 public:
  Medium(Engine& engine, const Topology& topology, const PhyTiming& timing)
      : engine_(engine), topology_(topology), timing_(timing) {
    if (topology.size() > 256) {
      throw std::invalid_argument("Medium: at most 256 nodes supported");
    }
    listeners_.resize(topology.size());
  }

  /// Commits a frame to the air starting at t_start (>= now).  All four
  /// lifecycle events are scheduled; overlap corruption against every other
  /// committed frame is marked immediately, which is sound because intervals
  /// are fully determined at commit time.
  std::uint32_t transmit(const Frame& frame, nanos_t t_start) {
    if (t_start < engine_.now()) {
      throw std::logic_error("Medium::transmit: start time precedes the clock");
    }
    const std::uint32_t id = acquire_slot();
    Transmission& tx = pool_[id];
    tx.id = id;
    tx.frame = frame;
    tx.tx_start = t_start;
    tx.tx_end = t_start + frame.duration;
    tx.arr_start = tx.tx_start + timing_.prop;
    tx.arr_end = tx.tx_end + timing_.prop;
    tx.corrupted = {};
    tx.resolved = {};

    mark_overlaps(tx);
    active_.push_back(id);
    listeners_[frame.source].own_tx_until =
        std::max(listeners_[frame.source].own_tx_until, tx.tx_end);

    engine_.schedule({tx.tx_start, EventKind::TransmissionStart, frame.source,
                      EventTag::TxStart, id});
    engine_.schedule({tx.tx_end, EventKind::TransmissionEnd, frame.source,
                      EventTag::TxEnd, id});
    engine_.schedule({tx.arr_start, EventKind::TimerExpiry, frame.source,
                      EventTag::ArrivalStart, id});
    engine_.schedule({tx.arr_end, EventKind::TimerExpiry, frame.source,
                      EventTag::ArrivalEnd, id});
    return id;
  }

  void set_delegate(MediumDelegate* delegate) { delegate_ = delegate; }

  /// Event router; the simulation forwards medium-tagged events here.
  void handle(const SimEvent& event) {
    const auto id = static_cast<std::uint32_t>(event.payload);
    Transmission& tx = pool_[id];
    switch (event.tag) {
      case EventTag::TxStart:
        break;  // registration happened at commit time
      case EventTag::TxEnd:
        if (delegate_) delegate_->transmit_finished(tx);
        break;
      case EventTag::ArrivalStart:
        for_each_listener(tx, [&](NodeId listener) {
          ListenerState& ls = listeners_[listener];
          if (++ls.busy_count == 1 && delegate_) delegate_->channel_busy(listener);
          if (delegate_) delegate_->arrival_begun(listener, tx);
        });
        break;
      case EventTag::ArrivalEnd:
        for_each_listener(tx, [&](NodeId listener) {
          if (delegate_) delegate_->arrival_complete(listener, tx);
          ListenerState& ls = listeners_[listener];
          if (--ls.busy_count == 0) {
            ls.idle_since = event.time;
            if (delegate_) delegate_->channel_idle(listener);
          }
        });
        retire(id);
        break;
      default:
        throw std::logic_error("Medium::handle: not a medium event");
    }
  }

  /// Instantaneous physical carrier sense at `listener`.
  bool carrier_busy(NodeId listener, nanos_t t) const {
    for (std::uint32_t id : active_) {
      const Transmission& tx = pool_[id];
      if (!audible(listener, tx)) continue;
      if (tx.arr_start <= t && t < tx.arr_end) return true;
    }
    return false;
  }

  /// True if any audible signal occupied the instant just before t.  A frame
  /// whose reception starts exactly at t does not count: the station's
  /// decision to transmit at a slot boundary is based on the slot that just
  /// ended.
  bool busy_strictly_before(NodeId listener, nanos_t t) const {
    for (std::uint32_t id : active_) {
      const Transmission& tx = pool_[id];
      if (!audible(listener, tx)) continue;
      if (tx.arr_start < t && tx.arr_end >= t) return true;
    }
    return false;
  }

  /// Number of audible transmissions covering band `band` at `listener` that
  /// overlap the window [from, to).
  int band_occupancy(NodeId listener, std::uint32_t band, nanos_t from,
                     nanos_t to) const {
    int n = 0;
    for (std::uint32_t id : active_) {
      const Transmission& tx = pool_[id];
      if (!audible(listener, tx)) continue;
      if (!(tx.frame.bands & band_bit(band))) continue;
      if (tx.arr_start < to && tx.arr_end > from) ++n;
    }
    return n;
  }

  /// Audible RTS frames whose reception at `listener` completes exactly at t,
  /// in ascending source order so decisions do not depend on pool layout.
  std::vector<const Transmission*> rts_ending_at(NodeId listener,
                                                 nanos_t t) const {
    std::vector<const Transmission*> out;
    for (std::uint32_t id : active_) {
      const Transmission& tx = pool_[id];
      if (tx.frame.kind != FrameKind::Rts) continue;
      if (!audible(listener, tx)) continue;
      if (tx.arr_end == t) out.push_back(&tx);
    }
    std::sort(out.begin(), out.end(),
              [](const Transmission* a, const Transmission* b) {
                return a->frame.source < b->frame.source;
              });
    return out;
  }

  Transmission& transmission(std::uint32_t id) { return pool_[id]; }
  const Transmission& transmission(std::uint32_t id) const { return pool_[id]; }

  /// When the listener's current physical idle period began.  Meaningful only
  /// while the channel is idle.
  nanos_t idle_since(NodeId listener) const {
    return listeners_[listener].idle_since;
  }

  bool channel_is_busy(NodeId listener) const {
    return listeners_[listener].busy_count > 0;
  }

  nanos_t own_tx_until(NodeId node) const {
    return listeners_[node].own_tx_until;
  }

 private:
  struct ListenerState {
    int busy_count = 0;
    nanos_t idle_since = 0;
    nanos_t own_tx_until = 0;
  };

  bool audible(NodeId listener, const Transmission& tx) const {
    return listener != tx.frame.source &&
           topology_.hears(listener, tx.frame.source);
  }

  template <typename Fn>
  void for_each_listener(const Transmission& tx, Fn&& fn) {
    for (NodeId listener = 0; listener < topology_.size(); ++listener) {
      if (audible(listener, tx)) fn(listener);
    }
  }

  /// Marks reception corruption caused by `tx` against everything already
  /// committed, in both directions, plus half-duplex corruption at the
  /// transmitters themselves.
  void mark_overlaps(Transmission& tx) {
    for (std::uint32_t other_id : active_) {
      Transmission& other = pool_[other_id];
      const bool time_overlap =
          tx.arr_start < other.arr_end && other.arr_start < tx.arr_end;
      if (time_overlap && bands_overlap(tx.frame.bands, other.frame.bands)) {
        // Any listener that hears both sources can decode neither frame.
        for (NodeId n = 0; n < topology_.size(); ++n) {
          const bool hears_tx = audible(n, tx);
          const bool hears_other = audible(n, other);
          if (hears_tx && hears_other) {
            tx.mark_corrupted(n);
            other.mark_corrupted(n);
          }
        }
      }
      // Half-duplex: a node transmitting during (part of) a reception window
      // cannot decode that reception, irrespective of bands.
      if (audible(other.frame.source, tx) && tx.arr_start < other.tx_end &&
          other.tx_start < tx.arr_end) {
        tx.mark_corrupted(other.frame.source);
      }
      if (audible(tx.frame.source, other) && other.arr_start < tx.tx_end &&
          tx.tx_start < other.arr_end) {
        other.mark_corrupted(tx.frame.source);
      }
    }
  }

  std::uint32_t acquire_slot() {
    if (!free_.empty()) {
      const std::uint32_t id = free_.back();
      free_.pop_back();
      return id;
    }
    pool_.emplace_back();
    return static_cast<std::uint32_t>(pool_.size() - 1);
  }

  void retire(std::uint32_t id) {
    for (std::size_t i = 0; i < active_.size(); ++i) {
      if (active_[i] == id) {
        active_[i] = active_.back();
        active_.pop_back();
        break;
      }
    }
    free_.push_back(id);
  }

  Engine& engine_;
  const Topology& topology_;
  const PhyTiming& timing_;
  MediumDelegate* delegate_ = nullptr;
  /// Deque, not vector: delegate callbacks may commit new transmissions while
  /// handle() iterates listeners of an existing one, and growth at the back of
  /// a deque leaves references to existing elements valid.
  std::deque<Transmission> pool_;
  std::vector<std::uint32_t> free_;
  std::vector<std::uint32_t> active_;
  std::vector<ListenerState> listeners_;
};

}  // namespace mbcsma
