#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <set>

#include "mbcsma/mac.hpp"
#include "mbcsma/rng.hpp"

using namespace mbcsma;

TEST_CASE("contention window doubles on failure, capped at the maximum",
          "[mac]") {
  ContentionWindow cw = ContentionWindow::make(16, 1024);
  const std::array<std::uint32_t, 8> ladder = {32,   64,   128,  256,
                                               512,  1024, 1024, 1024};
  for (std::uint32_t expected : ladder) {
    cw.on_failure();
    REQUIRE(cw.cw == expected);
  }
  cw.on_success();
  REQUIRE(cw.cw == 16);
}

TEST_CASE("contention window construction is validated", "[mac]") {
  REQUIRE_THROWS_AS(ContentionWindow::make(0, 16), std::invalid_argument);
  REQUIRE_THROWS_AS(ContentionWindow::make(16, 24), std::invalid_argument);
  REQUIRE_THROWS_AS(ContentionWindow::make(32, 16), std::invalid_argument);
  REQUIRE_NOTHROW(ContentionWindow::make(16, 16));
  REQUIRE_NOTHROW(ContentionWindow::make(1, 1024));
}

TEST_CASE("RTS band selection yields a uniform contiguous block", "[mac]") {
  Rng rng(99);
  std::array<int, 4> first_band{};
  for (int i = 0; i < 4000; ++i) {
    const BandSet s = select_rts_bands(rng, 4, 1);
    REQUIRE(band_count(s) == 1);
    ++first_band[__builtin_ctz(s)];
  }
  for (int count : first_band) {
    REQUIRE(count > 800);  // expected 1000, sigma ~27
    REQUIRE(count < 1200);
  }

  for (int i = 0; i < 100; ++i) {
    const BandSet s = select_rts_bands(rng, 5, 3);
    REQUIRE(band_count(s) == 3);
    const int lo = __builtin_ctz(s);
    REQUIRE(s == band_block(lo, 3));  // contiguous
    REQUIRE(lo <= 2);                 // fits inside 5 bands
  }

  REQUIRE(select_rts_bands(rng, 3, 3) == 0b111u);
  REQUIRE_THROWS_AS(select_rts_bands(rng, 3, 4), std::invalid_argument);
  REQUIRE_THROWS_AS(select_rts_bands(rng, 3, 0), std::invalid_argument);
}

TEST_CASE("virtual collision means two distinct decoded destinations",
          "[mac]") {
  REQUIRE_FALSE(virtual_collision_check({}));
  REQUIRE_FALSE(virtual_collision_check({{0, 9, true}}));
  REQUIRE_FALSE(virtual_collision_check({{0, 9, true}, {1, 9, true}}));
  REQUIRE(virtual_collision_check({{0, 9, true}, {1, 8, true}}));
}

TEST_CASE("resolution with no RTS or none decodable", "[mac]") {
  Rng rng(1);
  REQUIRE(ap_resolve_rts({}, 9, rng).outcome == ApOutcome::NoRts);

  const ApDecision d =
      ap_resolve_rts({{0, 9, false}, {1, 9, false}}, 9, rng);
  REQUIRE(d.outcome == ApOutcome::AllCollided);
  REQUIRE(d.decoded_senders.empty());
  REQUIRE(d.winner == kNoNode);
}

TEST_CASE("a single decodable RTS addressed to the responder wins", "[mac]") {
  Rng rng(1);
  const ApDecision d =
      ap_resolve_rts({{4, 9, true}, {5, 9, false}}, 9, rng);
  REQUIRE(d.outcome == ApOutcome::Grant);
  REQUIRE(d.winner == 4);
  REQUIRE(d.decoded_senders == std::vector<NodeId>{4});
}

TEST_CASE("decodable RTS for different destinations silence the responder",
          "[mac]") {
  Rng rng(1);
  const ApDecision d =
      ap_resolve_rts({{4, 9, true}, {5, 8, true}}, 9, rng);
  REQUIRE(d.outcome == ApOutcome::VirtualCollision);
  REQUIRE(d.winner == kNoNode);
  REQUIRE(d.decoded_senders.size() == 2);
}

TEST_CASE("decodable RTS all for someone else are not answered", "[mac]") {
  Rng rng(1);
  const ApDecision d = ap_resolve_rts({{4, 8, true}}, 9, rng);
  REQUIRE(d.outcome == ApOutcome::NotAddressed);
  REQUIRE(d.winner == kNoNode);
}

TEST_CASE("ties between decodable RTS break uniformly", "[mac]") {
  Rng rng(123);
  std::array<int, 3> wins{};
  for (int i = 0; i < 3000; ++i) {
    const ApDecision d = ap_resolve_rts(
        {{0, 9, true}, {1, 9, true}, {2, 9, true}}, 9, rng);
    REQUIRE(d.outcome == ApOutcome::Grant);
    ++wins[d.winner];
  }
  for (int count : wins) {
    REQUIRE(count > 800);  // expected 1000
    REQUIRE(count < 1200);
  }
}

TEST_CASE("corrupted RTS never win even when decodable ones lose", "[mac]") {
  Rng rng(7);
  std::set<NodeId> winners;
  for (int i = 0; i < 200; ++i) {
    const ApDecision d = ap_resolve_rts(
        {{0, 9, false}, {1, 9, true}, {2, 9, true}}, 9, rng);
    REQUIRE(d.outcome == ApOutcome::Grant);
    winners.insert(d.winner);
  }
  REQUIRE(winners == std::set<NodeId>{1, 2});
}
