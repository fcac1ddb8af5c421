#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mbcsma/engine.hpp"
#include "mbcsma/medium.hpp"
#include "mbcsma/phy.hpp"
#include "mbcsma/rng.hpp"

namespace mbcsma {

/// Binary-exponential contention window.  The live window is always
/// cw_min * 2^k for some k >= 0, clamped at cw_max.
struct ContentionWindow {
  std::uint32_t cw_min = 16;
  std::uint32_t cw_max = 1024;
  std::uint32_t cw = 16;

  static ContentionWindow make(std::uint32_t cw_min, std::uint32_t cw_max) {
    if (cw_min < 1) throw std::invalid_argument("cw_min must be >= 1");
    std::uint32_t w = cw_min;
    while (w < cw_max) w *= 2;
    if (w != cw_max) {
      throw std::invalid_argument("cw_max must be cw_min times a power of two");
    }
    return ContentionWindow{cw_min, cw_max, cw_min};
  }

  void on_failure() { cw = std::min(cw * 2, cw_max); }
  void on_success() { cw = cw_min; }
};

/// Chooses the sub-bands for one RTS: a contiguous block of `span` bands with
/// uniformly random position.  With span == 1 this is a uniform single band.
inline BandSet select_rts_bands(Rng& rng, std::uint32_t n_bands,
                                std::uint32_t span) {
  if (span < 1 || span > n_bands) {
    throw std::invalid_argument("select_rts_bands: span out of range");
  }
  const auto first = static_cast<std::uint32_t>(
      rng.uniform_int(0, n_bands - span));
  return band_block(first, span);
}

enum class ApOutcome : std::uint8_t {
  NoRts,             ///< nothing arrived this round
  AllCollided,       ///< RTS present but none decodable
  Grant,             ///< one sender granted via CTS
  VirtualCollision,  ///< decodable RTS name two or more destinations
  NotAddressed,      ///< decodable RTS all name some other destination
};

inline const char* to_string(ApOutcome o) {
  switch (o) {
    case ApOutcome::NoRts: return "NoRts";
    case ApOutcome::AllCollided: return "AllCollided";
    case ApOutcome::Grant: return "Grant";
    case ApOutcome::VirtualCollision: return "VirtualCollision";
    case ApOutcome::NotAddressed: return "NotAddressed";
  }
  return "?";
}

/// One RTS as seen by a responder at the end of a reception window.
struct RtsCandidate {
  NodeId sender = kNoNode;
  NodeId destination = kNoNode;
  bool decodable = false;
};

struct ApDecision {
  ApOutcome outcome = ApOutcome::NoRts;
  NodeId winner = kNoNode;
  std::vector<NodeId> decoded_senders;
};

/// True if the decodable RTS of a round name at least two distinct
/// destinations, in which case no CTS may be sent.
inline bool virtual_collision_check(const std::vector<RtsCandidate>& decoded) {
  for (std::size_t i = 1; i < decoded.size(); ++i) {
    if (decoded[i].destination != decoded[0].destination) return true;
  }
  return false;
}

/// Resolves one contention round at responder `self`.  Decodable senders are
/// collected; if they all address `self`, one wins a uniform draw.
inline ApDecision ap_resolve_rts(const std::vector<RtsCandidate>& candidates,
                                 NodeId self, Rng& rng) {
  ApDecision decision;
  if (candidates.empty()) return decision;  // NoRts
  std::vector<RtsCandidate> decoded;
  for (const RtsCandidate& c : candidates) {
    if (c.decodable) decoded.push_back(c);
  }
  if (decoded.empty()) {
    decision.outcome = ApOutcome::AllCollided;
    return decision;
  }
  for (const RtsCandidate& c : decoded) {
    decision.decoded_senders.push_back(c.sender);
  }
  if (virtual_collision_check(decoded)) {
    decision.outcome = ApOutcome::VirtualCollision;
    return decision;
  }
  if (decoded[0].destination != self) {
    decision.outcome = ApOutcome::NotAddressed;
    return decision;
  }
  const auto pick =
      static_cast<std::size_t>(rng.uniform_int(0, decoded.size() - 1));
  decision.outcome = ApOutcome::Grant;
  decision.winner = decoded[pick].sender;
  return decision;
}

/// How one station's contention attempt ended.
enum class StationOutcome : std::uint8_t {
  RtsCollided,      ///< own RTS undecodable (a CTS named someone else)
  CtsTimeout,       ///< no CTS arrived at all
  AckTimeout,       ///< granted, sent DATA, but the ACK never came
  DecodedNotChosen, ///< RTS decoded, lost the uniform draw
  GrantedAndAcked,  ///< full exchange completed
};

inline const char* to_string(StationOutcome o) {
  switch (o) {
    case StationOutcome::RtsCollided: return "RtsCollided";
    case StationOutcome::CtsTimeout: return "CtsTimeout";
    case StationOutcome::AckTimeout: return "AckTimeout";
    case StationOutcome::DecodedNotChosen: return "DecodedNotChosen";
    case StationOutcome::GrantedAndAcked: return "GrantedAndAcked";
  }
  return "?";
}

/// Externally visible station phase.
enum class StationPhase : std::uint8_t {
  IdleWait,      ///< no packet to send
  Sensing,       ///< has a packet, waiting out DIFS before the countdown
  Backoff,       ///< counting down (or frozen mid-countdown)
  Deferring,     ///< idle medium but a NAV reservation holds us back
  RtsSent,       ///< RTS on the air
  AwaitCts,      ///< RTS done, waiting for the CTS
  Transmitting,  ///< granted; DATA scheduled or on the air
  AwaitAck,      ///< DATA done, waiting for the ACK
};

/// Hooks the simulation layer implements to collect metrics and logs.
class MacObserver {
 public:
  virtual ~MacObserver() = default;
  virtual void on_round_resolved(NodeId responder, int transmitters,
                                 const ApDecision& decision) = 0;
  virtual void on_station_outcome(NodeId station, StationOutcome outcome,
                                  std::uint32_t cw_after) = 0;
  virtual void on_exchange_completed(NodeId station, nanos_t delay) = 0;
};

/// Everything a node state machine needs to act on the world.
struct MacEnv {
  Engine& engine;
  Medium& medium;
  Rng& rng;
  const PhyTiming& timing;
  BandPlan plan;
  MacObserver* observer = nullptr;
  bool nav_enabled = true;
};

/// Transmitting side of the MAC: carrier sensing, DIFS deference, slotted
/// backoff with freeze/resume, the RTS handshake, and the
/// contention-window ladder.
///
/// The backoff countdown is event-compressed: instead of per-slot ticks the
/// station schedules a single attempt event at
///   anchor + counter * slot_time,
/// where `anchor` is the instant the countdown (re)starts, i.e. DIFS after
/// the later of physical idle, the end of its own transmission, and NAV
/// expiry.  When the channel goes busy mid-countdown the elapsed whole slots
/// are banked and the stale attempt event is left to invalidate itself.
class Station {
 public:
  Station(MacEnv& env, NodeId id, NodeId destination, std::uint32_t span,
          ContentionWindow cw, std::uint64_t packet_budget)
      : env_(env),
        id_(id),
        destination_(destination),
        span_(span),
        cw_(cw),
        packets_remaining_(packet_budget) {}

  NodeId id() const { return id_; }
  NodeId destination() const { return destination_; }
  std::uint32_t backoff_counter() const { return counter_now(env_.engine.now()); }
  std::uint32_t cw() const { return cw_.cw; }
  nanos_t nav_until() const { return nav_until_; }
  std::uint64_t packets_completed() const { return packets_completed_; }

  StationPhase phase() const {
    if (phase_ != StationPhase::Backoff) return phase_;
    if (nav_until_ > env_.engine.now()) return StationPhase::Deferring;
    return countdown_armed_ ? StationPhase::Backoff : StationPhase::Sensing;
  }

  /// First packet arrival.  With an idle channel the station may transmit
  /// after a bare DIFS; otherwise it draws a backoff like any deferral.
  void bootstrap(nanos_t now) {
    if (packets_remaining_ == 0) {
      phase_ = StationPhase::IdleWait;
      return;
    }
    hol_start_ = now;
    phase_ = StationPhase::Backoff;
    counter_ = env_.medium.channel_is_busy(id_)
                   ? draw_backoff()
                   : 0;
    if (!env_.medium.channel_is_busy(id_)) arm_attempt(now);
  }

  // -- medium notifications ------------------------------------------------

  void on_channel_busy(nanos_t now) {
    if (phase_ != StationPhase::Backoff) return;
    // An attempt firing at this very instant is a decision already taken at
    // the slot boundary; a signal arriving exactly now cannot retract it.
    if (attempt_pending_ && attempt_time_ == now) return;
    bank_elapsed_slots(now);
  }

  void on_channel_idle(nanos_t now) {
    if (phase_ == StationPhase::Backoff) arm_attempt(now);
  }

  void on_arrival_complete(const Transmission& tx, nanos_t now) {
    const Frame& f = tx.frame;
    if (tx.corrupted_at(id_)) return;
    switch (f.kind) {
      case FrameKind::Rts:
        if (f.destination != id_) apply_nav(tx.arr_end + f.nav_duration);
        break;
      case FrameKind::Cts:
        handle_cts(tx, now);
        break;
      case FrameKind::Data:
        break;
      case FrameKind::Ack:
        if (f.destination == id_ && phase_ == StationPhase::AwaitAck) {
          complete_exchange(now);
        }
        break;
    }
  }

  void on_transmit_finished(const Transmission& tx, nanos_t now) {
    if (tx.frame.kind == FrameKind::Rts && phase_ == StationPhase::RtsSent) {
      phase_ = StationPhase::AwaitCts;
      timeout_handle_ = env_.engine.schedule(
          {now + env_.timing.cts_timeout, EventKind::TimerExpiry, id_,
           EventTag::CtsTimeout, 0});
      timeout_pending_ = true;
    } else if (tx.frame.kind == FrameKind::Data &&
               phase_ == StationPhase::Transmitting) {
      phase_ = StationPhase::AwaitAck;
      timeout_handle_ = env_.engine.schedule(
          {now + env_.timing.ack_timeout, EventKind::TimerExpiry, id_,
           EventTag::AckTimeout, 0});
      timeout_pending_ = true;
    }
  }

  // -- timer events ----------------------------------------------------------

  void on_attempt(nanos_t now) {
    attempt_pending_ = false;
    if (phase_ != StationPhase::Backoff) return;
    // Validate against the live channel state: the event may be stale if the
    // channel went busy after it was scheduled.
    if (!countdown_armed_ || anchor_ + nanos_t(counter_) * env_.timing.slot != now) {
      if (!env_.medium.channel_is_busy(id_)) arm_attempt(now);
      return;
    }
    if (env_.medium.busy_strictly_before(id_, now)) {
      arm_attempt(now);
      return;
    }
    transmit_rts(now);
  }

  void on_cts_timeout(nanos_t now) {
    timeout_pending_ = false;
    if (phase_ != StationPhase::AwaitCts) return;
    fail_attempt(StationOutcome::CtsTimeout, now);
  }

  void on_ack_timeout(nanos_t now) {
    timeout_pending_ = false;
    if (phase_ != StationPhase::AwaitAck) return;
    fail_attempt(StationOutcome::AckTimeout, now);
  }

  /// Test hook: pins the backoff counter to a known value and restarts the
  /// countdown, so freeze/resume bookkeeping can be exercised without
  /// reverse-engineering the random stream.
  void force_backoff_state(std::uint32_t counter) {
    if (phase_ != StationPhase::Backoff) {
      throw std::logic_error("force_backoff_state: station is not contending");
    }
    counter_ = counter;
    countdown_armed_ = false;
    if (!env_.medium.channel_is_busy(id_)) arm_attempt(env_.engine.now());
  }

 private:
  void handle_cts(const Transmission& tx, nanos_t now) {
    const Frame& f = tx.frame;
    if (f.destination == id_) {
      if (phase_ != StationPhase::AwaitCts) return;  // stale grant
      cancel_timeout();
      phase_ = StationPhase::Transmitting;
      Frame data;
      data.kind = FrameKind::Data;
      data.source = id_;
      data.destination = destination_;
      data.bands = all_bands(env_.plan);
      data.duration = env_.timing.data;
      env_.medium.transmit(data, now + env_.timing.sifs);
      return;
    }
    // CTS for somebody else.
    if (env_.nav_enabled) apply_nav(tx.arr_end + f.nav_duration);
    if (phase_ == StationPhase::AwaitCts) {
      cancel_timeout();
      const auto& decoded = f.decoded_senders;
      const bool was_decoded =
          std::find(decoded.begin(), decoded.end(), id_) != decoded.end();
      if (was_decoded) {
        cw_.on_success();
        counter_ = draw_backoff();
        notify_outcome(StationOutcome::DecodedNotChosen);
      } else {
        cw_.on_failure();
        counter_ = draw_backoff();
        notify_outcome(StationOutcome::RtsCollided);
      }
      resume_contention(now);
    }
  }

  void fail_attempt(StationOutcome outcome, nanos_t now) {
    cw_.on_failure();
    counter_ = draw_backoff();
    notify_outcome(outcome);
    resume_contention(now);
  }

  void complete_exchange(nanos_t now) {
    cancel_timeout();
    cw_.on_success();
    notify_outcome(StationOutcome::GrantedAndAcked);
    ++packets_completed_;
    if (env_.observer) env_.observer->on_exchange_completed(id_, now - hol_start_);
    if (packets_remaining_ != kUnlimitedPackets) --packets_remaining_;
    if (packets_remaining_ == 0) {
      phase_ = StationPhase::IdleWait;
      return;
    }
    // Next packet reaches the head of the queue immediately; post-transmission
    // backoff applies before the next attempt.
    hol_start_ = now;
    counter_ = draw_backoff();
    resume_contention(now);
  }

  void resume_contention(nanos_t now) {
    phase_ = StationPhase::Backoff;
    countdown_armed_ = false;
    if (!env_.medium.channel_is_busy(id_)) arm_attempt(now);
  }

  /// (Re)starts the DIFS wait + countdown from the current idle period.
  void arm_attempt(nanos_t now) {
    const nanos_t idle_from =
        std::max({env_.medium.idle_since(id_), env_.medium.own_tx_until(id_),
                  env_.nav_enabled ? nav_until_ : nanos_t{0}});
    anchor_ = std::max(idle_from + env_.timing.difs, now);
    countdown_armed_ = true;
    const nanos_t fire = anchor_ + nanos_t(counter_) * env_.timing.slot;
    if (attempt_pending_ && attempt_time_ == fire) return;
    if (attempt_pending_) env_.engine.cancel(attempt_handle_);
    attempt_handle_ = env_.engine.schedule(
        {fire, EventKind::TimerExpiry, id_, EventTag::Attempt, 0});
    attempt_time_ = fire;
    attempt_pending_ = true;
  }

  /// Consumes the whole slots that elapsed before the channel went busy; the
  /// partial slot in progress is discarded, per slotted CSMA semantics.
  void bank_elapsed_slots(nanos_t busy_at) {
    if (!countdown_armed_) return;
    countdown_armed_ = false;
    if (busy_at <= anchor_) return;  // froze during DIFS: nothing elapsed
    const auto elapsed =
        static_cast<std::uint32_t>((busy_at - anchor_) / env_.timing.slot);
    counter_ -= std::min(counter_, elapsed);
  }

  std::uint32_t counter_now(nanos_t now) const {
    if (!countdown_armed_ || now <= anchor_) return counter_;
    const auto elapsed =
        static_cast<std::uint32_t>((now - anchor_) / env_.timing.slot);
    return counter_ - std::min(counter_, elapsed);
  }

  void transmit_rts(nanos_t now) {
    Frame rts;
    rts.kind = FrameKind::Rts;
    rts.source = id_;
    rts.destination = destination_;
    rts.bands = select_rts_bands(env_.rng, env_.plan.n_bands, span_);
    rts.duration = env_.timing.rts;
    rts.nav_duration = env_.timing.rts_nav;
    env_.medium.transmit(rts, now);
    phase_ = StationPhase::RtsSent;
    countdown_armed_ = false;
  }

  std::uint32_t draw_backoff() {
    return static_cast<std::uint32_t>(env_.rng.uniform_int(0, cw_.cw - 1));
  }

  void apply_nav(nanos_t until) {
    if (env_.nav_enabled) nav_until_ = std::max(nav_until_, until);
  }

  void cancel_timeout() {
    if (timeout_pending_) {
      env_.engine.cancel(timeout_handle_);
      timeout_pending_ = false;
    }
  }

  void notify_outcome(StationOutcome outcome) {
    if (env_.observer) env_.observer->on_station_outcome(id_, outcome, cw_.cw);
  }

  static constexpr std::uint64_t kUnlimitedPackets = ~std::uint64_t{0};

  MacEnv& env_;
  NodeId id_;
  NodeId destination_;
  std::uint32_t span_;
  ContentionWindow cw_;
  std::uint64_t packets_remaining_;
  std::uint64_t packets_completed_ = 0;

  StationPhase phase_ = StationPhase::IdleWait;
  nanos_t hol_start_ = 0;
  nanos_t nav_until_ = 0;

  std::uint32_t counter_ = 0;
  nanos_t anchor_ = 0;
  bool countdown_armed_ = false;

  bool attempt_pending_ = false;
  nanos_t attempt_time_ = 0;
  EventHandle attempt_handle_{};
  bool timeout_pending_ = false;
  EventHandle timeout_handle_{};
};

/// Receiving side of the MAC: decodes simultaneous RTS across bands, elects
/// a winner, broadcasts the CTS, and acknowledges clean DATA.
class AccessPoint {
 public:
  AccessPoint(MacEnv& env, NodeId id) : env_(env), id_(id) {}

  NodeId id() const { return id_; }

  enum class Phase : std::uint8_t { Listening, Responding, AwaitData, Acking };
  Phase phase() const { return phase_; }

  void on_arrival_begun(const Transmission& tx, nanos_t) {
    if (phase_ == Phase::AwaitData && tx.frame.kind == FrameKind::Data &&
        tx.frame.destination == id_ && tx.frame.source == granted_) {
      cancel_watchdog();
    }
  }

  void on_arrival_complete(const Transmission& tx, nanos_t now) {
    switch (tx.frame.kind) {
      case FrameKind::Rts:
        if (phase_ == Phase::Listening) resolve_round(tx, now);
        break;
      case FrameKind::Data:
        if (phase_ == Phase::AwaitData && tx.frame.destination == id_ &&
            tx.frame.source == granted_) {
          finish_data(tx, now);
        }
        break;
      default:
        break;
    }
  }

  void on_transmit_finished(const Transmission& tx, nanos_t now) {
    if (tx.frame.kind == FrameKind::Cts && phase_ == Phase::Responding) {
      phase_ = Phase::AwaitData;
      watchdog_handle_ = env_.engine.schedule(
          {now + env_.timing.ap_watchdog, EventKind::TimerExpiry, id_,
           EventTag::ApWatchdog, 0});
      watchdog_pending_ = true;
    } else if (tx.frame.kind == FrameKind::Ack && phase_ == Phase::Acking) {
      phase_ = Phase::Listening;
    }
  }

  void on_watchdog(nanos_t) {
    watchdog_pending_ = false;
    if (phase_ == Phase::AwaitData) phase_ = Phase::Listening;
  }

 private:
  /// Handles the instant at which one or more RTS receptions complete.  All
  /// simultaneous arrivals are folded into a single decision; the rest of the
  /// group is marked resolved for this responder so their own completion
  /// events do nothing.
  void resolve_round(const Transmission& trigger, nanos_t now) {
    if (trigger.resolved_by(id_)) return;
    std::vector<const Transmission*> group = env_.medium.rts_ending_at(id_, now);
    std::vector<RtsCandidate> candidates;
    candidates.reserve(group.size());
    for (const Transmission* tx : group) {
      env_.medium.transmission(tx->id).mark_resolved_by(id_);
      candidates.push_back(RtsCandidate{tx->frame.source, tx->frame.destination,
                                        !tx->corrupted_at(id_)});
    }
    ApDecision decision = ap_resolve_rts(candidates, id_, env_.rng);
    if (env_.observer) {
      env_.observer->on_round_resolved(id_, static_cast<int>(candidates.size()),
                                       decision);
    }
    if (decision.outcome != ApOutcome::Grant) return;
    granted_ = decision.winner;
    Frame cts;
    cts.kind = FrameKind::Cts;
    cts.source = id_;
    cts.destination = decision.winner;
    cts.bands = all_bands(env_.plan);
    cts.duration = env_.timing.cts;
    cts.nav_duration = env_.timing.cts_nav;
    cts.decoded_senders = std::move(decision.decoded_senders);
    env_.medium.transmit(cts, now + env_.timing.sifs);
    phase_ = Phase::Responding;
  }

  void finish_data(const Transmission& tx, nanos_t now) {
    cancel_watchdog();
    if (tx.corrupted_at(id_)) {
      phase_ = Phase::Listening;  // corrupted DATA: no ACK, sender times out
      return;
    }
    Frame ack;
    ack.kind = FrameKind::Ack;
    ack.source = id_;
    ack.destination = tx.frame.source;
    ack.bands = all_bands(env_.plan);
    ack.duration = env_.timing.ack;
    env_.medium.transmit(ack, now + env_.timing.sifs);
    phase_ = Phase::Acking;
  }

  void cancel_watchdog() {
    if (watchdog_pending_) {
      env_.engine.cancel(watchdog_handle_);
      watchdog_pending_ = false;
    }
  }

  MacEnv& env_;
  NodeId id_;
  Phase phase_ = Phase::Listening;
  NodeId granted_ = kNoNode;
  bool watchdog_pending_ = false;
  EventHandle watchdog_handle_{};
};

}  // namespace mbcsma
