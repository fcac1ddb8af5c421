#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "mbcsma/mac.hpp"
#include "mbcsma/medium.hpp"

// Exercises the event-compressed backoff countdown in isolation: one station
// under test, one "noise" node whose transmissions are injected directly onto
// the medium at handpicked instants, and no responder, so nothing answers the
// RTS.  Run horizons stay short of the CTS timeout so each test observes
// exactly the first attempt.

using namespace mbcsma;

namespace {

struct TxRecord {
  nanos_t time = 0;
  NodeId source = kNoNode;
  FrameKind kind = FrameKind::Rts;
};

class FreezeBench : public MediumDelegate {
 public:
  static constexpr NodeId kStation = 0;
  static constexpr NodeId kNoise = 1;
  static constexpr NodeId kAp = 2;

  FreezeBench()
      : timing_(PhyTiming::from(PhyParams{})),
        topology_(make_topology()),
        medium_(engine_, topology_, timing_),
        env_{engine_, medium_, rng_, timing_, BandPlan{1}, nullptr, true},
        station_(env_, kStation, kAp, 1, ContentionWindow::make(16, 1024),
                 1000) {
    medium_.set_delegate(this);
    engine_.set_sink([this](const SimEvent& ev) { route(ev); });
  }

  // MediumDelegate: forward everything that concerns the station under test.
  void channel_busy(NodeId l) override {
    if (l == kStation) station_.on_channel_busy(engine_.now());
  }
  void channel_idle(NodeId l) override {
    if (l == kStation) station_.on_channel_idle(engine_.now());
  }
  void arrival_begun(NodeId, const Transmission&) override {}
  void arrival_complete(NodeId l, const Transmission& tx) override {
    if (l == kStation) station_.on_arrival_complete(tx, engine_.now());
  }
  void transmit_finished(const Transmission& tx) override {
    if (tx.frame.source == kStation) {
      station_.on_transmit_finished(tx, engine_.now());
    }
  }

  /// Injects a burst from the noise node.
  void noise(nanos_t tx_start, nanos_t duration) {
    Frame f;
    f.kind = FrameKind::Data;  // carries no reservation, ignored by the MAC
    f.source = kNoise;
    f.destination = kAp;
    f.bands = band_bit(0);
    f.duration = duration;
    medium_.transmit(f, tx_start);
  }

  std::vector<TxRecord> station_tx() const {
    std::vector<TxRecord> out;
    for (const TxRecord& r : tx_log_) {
      if (r.source == kStation) out.push_back(r);
    }
    return out;
  }

  Engine engine_;
  PhyTiming timing_;
  Topology topology_;
  Rng rng_{7};
  Medium medium_;
  MacEnv env_;
  Station station_;
  std::vector<TxRecord> tx_log_;

 private:
  static Topology make_topology() {
    Topology t;
    t.add_node(NodeRole::Station);
    t.add_node(NodeRole::Station);
    t.add_node(NodeRole::AccessPoint);
    t.make_complete();
    return t;
  }

  void route(const SimEvent& ev) {
    switch (ev.tag) {
      case EventTag::TxStart: {
        const auto& tx =
            medium_.transmission(static_cast<std::uint32_t>(ev.payload));
        tx_log_.push_back({ev.time, tx.frame.source, tx.frame.kind});
        medium_.handle(ev);
        break;
      }
      case EventTag::TxEnd:
      case EventTag::ArrivalStart:
      case EventTag::ArrivalEnd:
        medium_.handle(ev);
        break;
      case EventTag::Attempt:
        station_.on_attempt(ev.time);
        break;
      case EventTag::CtsTimeout:
        station_.on_cts_timeout(ev.time);
        break;
      case EventTag::AckTimeout:
        station_.on_ack_timeout(ev.time);
        break;
      default:
        break;
    }
  }
};

}  // namespace

TEST_CASE("an undisturbed countdown fires DIFS plus counter slots after boot",
          "[freeze]") {
  FreezeBench b;
  b.station_.bootstrap(0);
  b.station_.force_backoff_state(3);

  // Counter visibly decrements as whole slots elapse.
  b.engine_.run_until(46000);  // two slots past the 28000 ns anchor
  CHECK(b.station_.backoff_counter() == 1);

  b.engine_.run_until(60000);
  const auto tx = b.station_tx();
  REQUIRE(tx.size() == 1);
  CHECK(tx[0].kind == FrameKind::Rts);
  CHECK(tx[0].time == 28000 + 3 * 9000);  // 55000
}

TEST_CASE("mid-countdown busy banks whole slots and discards the partial one",
          "[freeze]") {
  FreezeBench b;
  b.station_.bootstrap(0);
  b.station_.force_backoff_state(3);  // would fire at 55000

  // Busy at the station from 50500 to 55500: 2.5 slots into the countdown.
  b.noise(49500, 5000);

  // Two whole slots banked, the half slot discarded, one slot remains.
  // Countdown restarts DIFS after idle: 55500 + 28000 + 1*9000 = 92500.
  b.engine_.run_until(100000);
  const auto tx = b.station_tx();
  REQUIRE(tx.size() == 1);
  CHECK(tx[0].kind == FrameKind::Rts);
  CHECK(tx[0].time == 92500);
}

TEST_CASE("the stale attempt event fires during busy and does nothing",
          "[freeze]") {
  FreezeBench b;
  b.station_.bootstrap(0);
  b.station_.force_backoff_state(3);

  // Busy covers the original 55000 fire instant entirely.
  b.noise(49500, 9000);  // arrival window [50500, 59500)

  b.engine_.run_until(55250);  // just past the stale attempt
  CHECK(b.station_tx().empty());
  // Frozen mid-countdown the station reads as Sensing (it will wait out a
  // fresh DIFS once the channel clears); two whole slots are already banked.
  CHECK(b.station_.phase() == StationPhase::Sensing);
  CHECK(b.station_.backoff_counter() == 1);

  // Idle at 59500, anchor 87500, one slot left: fire at 96500.
  b.engine_.run_until(100000);
  const auto tx = b.station_tx();
  REQUIRE(tx.size() == 1);
  CHECK(tx[0].time == 96500);
}

TEST_CASE("busy during DIFS banks nothing and restarts the full countdown",
          "[freeze]") {
  FreezeBench b;
  b.station_.bootstrap(0);
  b.station_.force_backoff_state(3);

  // Arrival window [20000, 29000) straddles the DIFS that ends at 28000; no
  // countdown slot had begun, so the counter must stay at 3.
  b.noise(19000, 9000);

  b.engine_.run_until(40000);
  CHECK(b.station_.backoff_counter() == 3);

  // Idle at 29000, anchor 57000, three slots: fire at 84000.
  b.engine_.run_until(90000);
  const auto tx = b.station_tx();
  REQUIRE(tx.size() == 1);
  CHECK(tx[0].time == 84000);
}

TEST_CASE("a signal arriving exactly at the fire instant cannot retract it",
          "[freeze]") {
  // The decision to transmit is taken at the slot boundary based on the slot
  // that just ended; energy arriving at that same instant must not matter.
  // Both dispatch orders of the two simultaneous events are exercised: the
  // engine breaks time ties by insertion order, so scheduling the noise burst
  // after or before the station's attempt event selects the order.
  SECTION("attempt event dispatched before the arrival") {
    FreezeBench b;
    b.station_.bootstrap(0);
    b.station_.force_backoff_state(3);  // attempt scheduled now, fires 55000
    b.noise(54000, 5000);               // arrival starts exactly at 55000
    b.engine_.run_until(60000);
    const auto tx = b.station_tx();
    REQUIRE(tx.size() == 1);
    CHECK(tx[0].time == 55000);
  }
  SECTION("arrival dispatched before the attempt event") {
    FreezeBench b;
    b.noise(54000, 5000);
    b.station_.bootstrap(0);
    b.station_.force_backoff_state(3);
    b.engine_.run_until(60000);
    const auto tx = b.station_tx();
    REQUIRE(tx.size() == 1);
    CHECK(tx[0].time == 55000);
  }
}

TEST_CASE("a signal arriving one tick before the fire instant does retract it",
          "[freeze]") {
  FreezeBench b;
  b.station_.bootstrap(0);
  b.station_.force_backoff_state(3);
  b.noise(53999, 5000);  // arrival window [54999, 59999): covers 55000
  // Two whole slots were banked by 54999; idle at 59999, anchor 87999,
  // one slot left: fire at 96999.
  b.engine_.run_until(100000);
  const auto tx = b.station_tx();
  REQUIRE(tx.size() == 1);
  CHECK(tx[0].time == 96999);
}

TEST_CASE("two separate busy periods bank slots cumulatively", "[freeze]") {
  FreezeBench b;
  b.station_.bootstrap(0);
  b.station_.force_backoff_state(8);  // would fire at 100000

  b.noise(49500, 5000);   // busy [50500, 55500): banks 2, leaves 6
  b.noise(100500, 5000);  // busy [101500, 106500)

  // After the first burst the countdown re-anchors at 83500 aiming for
  // 137500; the second burst lands 2 whole slots in, leaving 4.  Idle at
  // 106500, anchor 134500, fire 134500 + 4*9000 = 170500.
  b.engine_.run_until(175000);
  const auto tx = b.station_tx();
  REQUIRE(tx.size() == 1);
  CHECK(tx[0].time == 170500);
}

TEST_CASE("a freeze inside the final slot defers the last decrement",
          "[freeze]") {
  FreezeBench b;
  b.station_.bootstrap(0);
  b.station_.force_backoff_state(2);  // would fire at 46000

  // Busy lands inside the second slot at 45999: one whole slot elapsed, so
  // one slot remains after the freeze.
  b.noise(44999, 4000);  // arrival window [45999, 49999)
  // Idle 49999, anchor 77999, fire 86999.
  b.engine_.run_until(90000);
  const auto tx = b.station_tx();
  REQUIRE(tx.size() == 1);
  CHECK(tx[0].time == 86999);
}
