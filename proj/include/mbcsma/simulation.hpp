#pragma once

#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbcsma/engine.hpp"
#include "mbcsma/mac.hpp"
#include "mbcsma/medium.hpp"
#include "mbcsma/metrics.hpp"
#include "mbcsma/rng.hpp"
#include "mbcsma/scenario.hpp"

namespace mbcsma {

/// One frame as it went over the air, recorded when its reception window
/// closed (by which point any overlap corruption is final).
struct FrameLogEntry {
  nanos_t tx_start = 0;
  nanos_t tx_end = 0;
  FrameKind kind = FrameKind::Rts;
  NodeId source = kNoNode;
  NodeId destination = kNoNode;
  BandSet bands = 0;
  bool corrupted_at_destination = false;
};

/// One contention outcome as a station experienced it.
struct OutcomeLogEntry {
  nanos_t time = 0;
  NodeId station = kNoNode;
  StationOutcome outcome = StationOutcome::RtsCollided;
  std::uint32_t cw_after = 0;
};

/// Owns one complete run: topology, medium, node state machines, clock, and
/// the metrics the run produces.
class Simulation : public MediumDelegate, public MacObserver {
 public:
  explicit Simulation(const ScenarioConfig& config)
      : config_(config),
        timing_(PhyTiming::from(config.phy)),
        built_(config.build()),
        rng_(config.seed),
        medium_(engine_, built_.topology, timing_),
        env_{engine_, medium_, rng_,    timing_,
             BandPlan{config.n_bands},  this,    config.nav_enabled} {
    const std::size_t n_nodes = built_.topology.size();
    station_at_.resize(n_nodes);
    ap_at_.resize(n_nodes);
    metrics_.completions_by_station.assign(n_nodes, 0);
    metrics_.rounds_by_k.assign(built_.flows.size() + 1, RoundStats{});

    const std::uint64_t budget =
        config.traffic == TrafficMode::SinglePacket
            ? 1
            : std::numeric_limits<std::uint64_t>::max();
    const ContentionWindow cw =
        ContentionWindow::make(config.cw_min, config.cw_max);
    for (const FlowSpec& flow : built_.flows) {
      if (built_.topology.role(flow.station) != NodeRole::Station) {
        throw std::invalid_argument("flow source must be a station");
      }
      station_at_[flow.station] = std::make_unique<Station>(
          env_, flow.station, flow.destination, flow.span, cw, budget);
    }
    for (NodeId id = 0; id < n_nodes; ++id) {
      if (built_.topology.role(id) == NodeRole::AccessPoint) {
        ap_at_[id] = std::make_unique<AccessPoint>(env_, id);
      }
    }
    warmed_up_ = config.warmup_exchanges == 0;
    medium_.set_delegate(this);
    engine_.set_sink([this](const SimEvent& e) { route(e); });
  }

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  void enable_frame_log() { frame_log_enabled_ = true; }
  void enable_outcome_log() { outcome_log_enabled_ = true; }

  /// Records a per-event trace with rendered frame details (tests only: the
  /// trace grows with the event count).
  void enable_trace() {
    engine_.enable_trace([this](const SimEvent& e) { return render_detail(e); });
  }

  /// Runs to completion: until the measured-exchange target is reached, the
  /// optional time limit expires, or no events remain (single-packet mode).
  const RunMetrics& run() {
    for (const FlowSpec& flow : built_.flows) {
      engine_.schedule({0, EventKind::TimerExpiry, flow.station,
                        EventTag::Bootstrap, 0});
    }
    const nanos_t t_end =
        config_.time_limit_seconds
            ? nanos_ceil_from_seconds(*config_.time_limit_seconds)
            : kFarFuture;
    engine_.run_until(t_end);
    metrics_.sim_duration =
        (warmed_up_ && last_exchange_time_ > measure_start_)
            ? last_exchange_time_ - measure_start_
            : 0;
    return metrics_;
  }

  const RunMetrics& metrics() const { return metrics_; }
  const std::vector<FrameLogEntry>& frame_log() const { return frame_log_; }
  const std::vector<OutcomeLogEntry>& outcome_log() const {
    return outcome_log_;
  }
  Engine& engine() { return engine_; }
  const Medium& medium() const { return medium_; }
  const Topology& topology() const { return built_.topology; }
  const std::vector<FlowSpec>& flows() const { return built_.flows; }
  const PhyTiming& timing() const { return timing_; }
  Station* station(NodeId id) { return station_at_[id].get(); }
  AccessPoint* access_point(NodeId id) { return ap_at_[id].get(); }

  // -- MediumDelegate --------------------------------------------------------

  void channel_busy(NodeId listener) override {
    if (Station* s = station_at_[listener].get()) {
      s->on_channel_busy(engine_.now());
    }
  }

  void channel_idle(NodeId listener) override {
    if (Station* s = station_at_[listener].get()) {
      s->on_channel_idle(engine_.now());
    }
  }

  void arrival_begun(NodeId listener, const Transmission& tx) override {
    if (AccessPoint* ap = ap_at_[listener].get()) {
      ap->on_arrival_begun(tx, engine_.now());
    }
  }

  void arrival_complete(NodeId listener, const Transmission& tx) override {
    account_arrival(listener, tx);
    if (Station* s = station_at_[listener].get()) {
      s->on_arrival_complete(tx, engine_.now());
    } else if (AccessPoint* ap = ap_at_[listener].get()) {
      ap->on_arrival_complete(tx, engine_.now());
    }
  }

  void transmit_finished(const Transmission& tx) override {
    const NodeId src = tx.frame.source;
    if (Station* s = station_at_[src].get()) {
      s->on_transmit_finished(tx, engine_.now());
    } else if (AccessPoint* ap = ap_at_[src].get()) {
      ap->on_transmit_finished(tx, engine_.now());
    }
  }

  // -- MacObserver -----------------------------------------------------------

  void on_round_resolved(NodeId, int transmitters,
                         const ApDecision& decision) override {
    switch (decision.outcome) {
      case ApOutcome::Grant: ++metrics_.grants; break;
      case ApOutcome::VirtualCollision: ++metrics_.virtual_collisions; break;
      default: break;
    }
    if (!warmed_up_) return;
    const auto k = static_cast<std::size_t>(transmitters);
    if (k >= metrics_.rounds_by_k.size()) {
      metrics_.rounds_by_k.resize(k + 1);
    }
    RoundStats& bucket = metrics_.rounds_by_k[k];
    ++bucket.rounds;
    bucket.attempts += k;
    bucket.collided += k - decision.decoded_senders.size();
    switch (decision.outcome) {
      case ApOutcome::Grant: ++bucket.grants; break;
      case ApOutcome::VirtualCollision: ++bucket.virtual_collisions; break;
      case ApOutcome::AllCollided: ++bucket.all_collided; break;
      default: break;
    }
  }

  void on_station_outcome(NodeId station, StationOutcome outcome,
                          std::uint32_t cw_after) override {
    if (outcome_log_enabled_) {
      outcome_log_.push_back(
          OutcomeLogEntry{engine_.now(), station, outcome, cw_after});
    }
  }

  void on_exchange_completed(NodeId station, nanos_t delay) override {
    ++metrics_.exchanges_total;
    ++metrics_.completions_by_station[station];
    if (!warmed_up_) {
      if (metrics_.exchanges_total >= config_.warmup_exchanges) {
        warmed_up_ = true;
        measure_start_ = engine_.now();
      }
      return;
    }
    ++metrics_.exchanges_completed;
    metrics_.acked_payload_bits += config_.phy.payload_bits;
    metrics_.delays.push_back(delay);
    last_exchange_time_ = engine_.now();
    if (metrics_.exchanges_completed >= config_.target_exchanges) {
      engine_.request_stop();
    }
  }

 private:
  static constexpr nanos_t kFarFuture = 1'000'000'000'000'000'000;

  void route(const SimEvent& event) {
    switch (event.tag) {
      case EventTag::TxStart:
      case EventTag::TxEnd:
      case EventTag::ArrivalStart:
        medium_.handle(event);
        break;
      case EventTag::ArrivalEnd:
        if (frame_log_enabled_) log_frame(event);
        medium_.handle(event);
        break;
      case EventTag::Attempt:
        station_at_[event.subject]->on_attempt(event.time);
        break;
      case EventTag::CtsTimeout:
        station_at_[event.subject]->on_cts_timeout(event.time);
        break;
      case EventTag::AckTimeout:
        station_at_[event.subject]->on_ack_timeout(event.time);
        break;
      case EventTag::ApWatchdog:
        ap_at_[event.subject]->on_watchdog(event.time);
        break;
      case EventTag::Bootstrap:
        station_at_[event.subject]->bootstrap(event.time);
        break;
      default:
        throw std::logic_error("Simulation::route: unexpected event tag");
    }
  }

  void account_arrival(NodeId listener, const Transmission& tx) {
    const Frame& f = tx.frame;
    const bool corrupt = tx.corrupted_at(listener);
    if (f.kind == FrameKind::Cts && corrupt) {
      ++metrics_.corrupted_cts_receptions;
    }
    if (listener != f.destination) return;
    if (f.kind == FrameKind::Rts && warmed_up_) {
      ++metrics_.rts_attempts;
      if (corrupt) ++metrics_.rts_collisions;
    }
    if (f.kind == FrameKind::Data && corrupt) {
      ++metrics_.corrupted_data_receptions;
    }
  }

  void log_frame(const SimEvent& event) {
    const Transmission& tx =
        medium_.transmission(static_cast<std::uint32_t>(event.payload));
    frame_log_.push_back(FrameLogEntry{
        tx.tx_start, tx.tx_end, tx.frame.kind, tx.frame.source,
        tx.frame.destination, tx.frame.bands,
        tx.corrupted_at(tx.frame.destination)});
  }

  std::string render_detail(const SimEvent& event) const {
    switch (event.tag) {
      case EventTag::TxStart:
      case EventTag::TxEnd:
      case EventTag::ArrivalStart:
      case EventTag::ArrivalEnd: {
        const Transmission& tx =
            medium_.transmission(static_cast<std::uint32_t>(event.payload));
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s %s %u->%u bands=0x%x",
                      tag_name(event.tag), to_string(tx.frame.kind),
                      tx.frame.source, tx.frame.destination, tx.frame.bands);
        return buf;
      }
      default:
        return tag_name(event.tag);
    }
  }

  static const char* tag_name(EventTag tag) {
    switch (tag) {
      case EventTag::None: return "none";
      case EventTag::TxStart: return "tx_start";
      case EventTag::TxEnd: return "tx_end";
      case EventTag::ArrivalStart: return "arr_start";
      case EventTag::ArrivalEnd: return "arr_end";
      case EventTag::Attempt: return "attempt";
      case EventTag::CtsTimeout: return "cts_timeout";
      case EventTag::AckTimeout: return "ack_timeout";
      case EventTag::ApWatchdog: return "ap_watchdog";
      case EventTag::Bootstrap: return "bootstrap";
      case EventTag::Custom: return "custom";
    }
    return "?";
  }

  ScenarioConfig config_;
  PhyTiming timing_;
  BuiltScenario built_;
  Engine engine_;
  Rng rng_;
  Medium medium_;
  MacEnv env_;
  std::vector<std::unique_ptr<Station>> station_at_;
  std::vector<std::unique_ptr<AccessPoint>> ap_at_;

  RunMetrics metrics_;
  bool warmed_up_ = false;
  nanos_t measure_start_ = 0;
  nanos_t last_exchange_time_ = 0;
  bool frame_log_enabled_ = false;
  bool outcome_log_enabled_ = false;
  std::vector<FrameLogEntry> frame_log_;
  std::vector<OutcomeLogEntry> outcome_log_;
};

}  // namespace mbcsma
