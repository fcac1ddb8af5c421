#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mbcsma/event.hpp"
#include "mbcsma/time.hpp"

namespace mbcsma {

/// Handle to a scheduled event, usable to cancel it before dispatch.
/// Handles are generation-checked: cancelling twice, or after dispatch, is a
/// harmless no-op.
struct EventHandle {
  std::uint32_t slot = 0;
  std::uint64_t generation = 0;
};

/// Single-threaded discrete-event loop.
///
/// Pending events are ordered by (time, insertion sequence): two events with
/// equal timestamps dispatch in the order they were scheduled, so a run is a
/// pure function of its inputs.  Cancellation is lazy — a cancelled entry
/// stays in the heap but is skipped on pop.
class Engine {
 public:
  using Sink = std::function<void(const SimEvent&)>;
  using DetailRenderer = std::function<std::string(const SimEvent&)>;

  nanos_t now() const { return clock_; }

  void set_sink(Sink sink) { sink_ = std::move(sink); }

  /// Enables trace recording.  The renderer produces the detail column; pass
  /// nullptr to record events with an empty detail.
  void enable_trace(DetailRenderer renderer = nullptr) {
    tracing_ = true;
    renderer_ = std::move(renderer);
  }

  EventHandle schedule(const SimEvent& event) {
    if (event.time < clock_) {
      throw std::logic_error("Engine::schedule: event time precedes the clock");
    }
    std::uint32_t slot;
    if (free_slots_.empty()) {
      slot = static_cast<std::uint32_t>(pool_.size());
      pool_.emplace_back();
    } else {
      slot = free_slots_.back();
      free_slots_.pop_back();
    }
    PoolEntry& entry = pool_[slot];
    entry.event = event;
    entry.alive = true;
    heap_.push_back(HeapItem{event.time, next_seq_++, slot, entry.generation});
    std::push_heap(heap_.begin(), heap_.end(), Later{});
    ++pending_;
    return EventHandle{slot, entry.generation};
  }

  /// Cancels a pending event.  Returns true if the event was still pending.
  bool cancel(EventHandle handle) {
    if (handle.slot >= pool_.size()) return false;
    PoolEntry& entry = pool_[handle.slot];
    if (!entry.alive || entry.generation != handle.generation) return false;
    entry.alive = false;
    --pending_;
    return true;
  }

  bool pending_empty() const { return pending_== 0; }

  /// Requests that the dispatch loop stop after the current event.
  void request_stop() { stop_requested_ = true; }

  /// Dispatches every event with time <= t_end in order.  On normal return
  /// the clock equals t_end; if stopped early via request_stop() the clock
  /// stays at the last dispatched event's time.
  void run_until(nanos_t t_end) {
    stop_requested_ = false;
    while (!heap_.empty()) {
      const HeapItem top = heap_.front();
      PoolEntry& entry = pool_[top.slot];
      const bool live = entry.alive && entry.generation == top.generation;
      if (live && top.time > t_end) break;
      std::pop_heap(heap_.begin(), heap_.end(), Later{});
      heap_.pop_back();
      if (!live) {
        // Cancelled (or superseded) entry: release the slot and move on.
        if (entry.generation == top.generation) release(top.slot);
        continue;
      }
      const SimEvent event = entry.event;
      release(top.slot);
      --pending_;
      clock_ = event.time;
      if (tracing_) {
        trace_.records.push_back(TraceRecord{
            event.time, event.kind, event.subject,
            renderer_ ? renderer_(event) : std::string{}});
      }
      if (sink_) sink_(event);
      if (stop_requested_) return;
    }
    if (t_end > clock_) clock_ = t_end;
  }

  const EventTrace& trace() const { return trace_; }

 private:
  struct PoolEntry {
    SimEvent event;
    std::uint64_t generation = 0;
    bool alive = false;
  };

  struct HeapItem {
    nanos_t time;
    std::uint64_t seq;
    std::uint32_t slot;
    std::uint64_t generation;
  };

  /// Max-heap comparator inverted to pop the earliest (time, seq) first.
  struct Later {
    bool operator()(const HeapItem& a, const HeapItem& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  void release(std::uint32_t slot) {
    pool_[slot].alive = false;
    ++pool_[slot].generation;
    free_slots_.push_back(slot);
  }

  nanos_t clock_ = 0;
  std::uint64_t next_seq_ = 0;
  std::size_t pending_ = 0;
  bool stop_requested_ = false;
  bool tracing_ = false;
  Sink sink_;
  DetailRenderer renderer_;
  EventTrace trace_;
  std::vector<PoolEntry> pool_;
  std::vector<std::uint32_t> free_slots_;
  std::vector<HeapItem> heap_;
};

}  // namespace mbcsma
