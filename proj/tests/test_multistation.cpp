#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstddef>

#include "mbcsma/simulation.hpp"
#include "support/checkers.hpp"

using namespace mbcsma;

namespace {

ScenarioConfig cell(std::uint32_t n_stations, std::uint32_t n_bands,
                    std::uint64_t seed, std::uint64_t warmup,
                    std::uint64_t target) {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::SaturatedCell;
  cfg.n_stations = n_stations;
  cfg.n_bands = n_bands;
  cfg.seed = seed;
  cfg.warmup_exchanges = warmup;
  cfg.target_exchanges = target;
  return cfg;
}

}  // namespace

TEST_CASE("per-round collision fractions match the independent-choice model",
          "[integration]") {
  // Five saturated stations on two bands.  Within a contention round every
  // transmitter picks a band independently and uniformly, so among rounds
  // with exactly k transmitters the fraction of undecodable RTS must match
  // 1 - ((B-1)/B)^(k-1).  Rounds are the independent sampling unit; within a
  // round outcomes are correlated, so the bound uses per-round variance.
  Simulation sim(cell(5, 2, 11, 500, 4000));
  const RunMetrics& m = sim.run();
  REQUIRE(m.exchanges_completed == 4000);

  std::size_t buckets_tested = 0;
  std::uint64_t attempts_sum = 0;
  std::uint64_t collided_sum = 0;
  for (std::size_t k = 1; k < m.rounds_by_k.size(); ++k) {
    const RoundStats& b = m.rounds_by_k[k];
    if (b.rounds == 0) continue;
    REQUIRE(b.attempts == k * b.rounds);
    // Single access point: every decodable round is a grant, never a
    // virtual (cross-destination) collision.
    REQUIRE(b.virtual_collisions == 0);
    REQUIRE(b.grants + b.all_collided == b.rounds);
    attempts_sum += b.attempts;
    collided_sum += b.collided;

    if (b.rounds < 300) continue;
    const double p = p_station_collision_closed_form(
        static_cast<std::uint32_t>(k), 2);
    const double observed = static_cast<double>(b.collided) /
                            static_cast<double>(b.attempts);
    const double sigma = std::sqrt(p * (1.0 - p) /
                                   static_cast<double>(b.rounds));
    INFO("k=" << k << " rounds=" << b.rounds << " observed=" << observed
              << " expected=" << p);
    CHECK(std::abs(observed - p) <= 4.0 * sigma + 0.005);
    ++buckets_tested;
  }
  REQUIRE(buckets_tested >= 2);

  // A lone transmitter can never collide.
  CHECK(m.rounds_by_k[1].collided == 0);

  // Round buckets and the per-arrival attempt counters are two views of the
  // same RTS stream and must agree exactly.
  CHECK(m.rts_attempts == attempts_sum);
  CHECK(m.rts_collisions == collided_sum);
}

TEST_CASE("a three-station cell obeys every protocol timing rule",
          "[integration]") {
  ScenarioConfig cfg = cell(3, 2, 5, 200, 1200);
  Simulation sim(cfg);
  sim.enable_frame_log();
  sim.enable_outcome_log();
  const RunMetrics& m = sim.run();
  REQUIRE(m.exchanges_completed == 1200);

  const auto report = mbcsma::testing::check_protocol_legality(
      sim.frame_log(), sim.outcome_log(), sim.topology(), sim.timing(), 16,
      1024);
  INFO(report.summary());
  REQUIRE(report.ok());
  CHECK(report.rts_checked > 1200);
  CHECK(report.outcomes_checked > 1200);

  // In a fully connected cell the CTS handshake serializes data transfers,
  // so CTS frames never overlap anywhere.
  CHECK(mbcsma::testing::count_cts_collisions(sim.frame_log(), sim.topology(),
                                              sim.timing())
        == 0);
  CHECK(m.corrupted_cts_receptions == 0);
  CHECK(m.corrupted_data_receptions == 0);
}

TEST_CASE("a lone saturated station's throughput equals payload over mean "
          "delay",
          "[integration]") {
  // With one station the inter-completion time equals the head-of-queue
  // delay, so over the measurement window the identity is exact.
  Simulation sim(cell(1, 1, 21, 100, 1000));
  const RunMetrics& m = sim.run();
  REQUIRE(m.exchanges_completed == 1000);

  const DelayCdf cdf(m.delays);
  const double mean = cdf.mean_seconds();
  const double throughput =
      saturation_throughput_bps(m.acked_payload_bits, m.sim_duration);
  REQUIRE(mean > 0.0);
  CHECK(throughput ==
        Catch::Approx(8184.0 / mean).epsilon(1e-9));
}

TEST_CASE("symmetric stations complete comparable shares of exchanges",
          "[integration]") {
  Simulation sim(cell(5, 3, 9, 0, 4000));
  const RunMetrics& m = sim.run();
  REQUIRE(m.exchanges_completed == 4000);
  REQUIRE(m.virtual_collisions == 0);

  std::uint64_t total = 0;
  for (const FlowSpec& flow : sim.flows()) {
    total += m.completions_by_station[flow.station];
  }
  REQUIRE(total >= 4000);
  for (const FlowSpec& flow : sim.flows()) {
    const auto share = m.completions_by_station[flow.station];
    INFO("station " << flow.station << " completed " << share << " of "
                    << total);
    CHECK(share >= total / 5 * 7 / 10);
    CHECK(share <= total / 5 * 13 / 10);
  }
  // The access point completes nothing; it only responds.
  CHECK(m.completions_by_station[sim.topology().access_points()[0]] == 0);
}

TEST_CASE("a ten-station single-band cell lands in the plausible DCF range",
          "[integration]") {
  Simulation sim(cell(10, 1, 2, 500, 3000));
  const RunMetrics& m = sim.run();
  REQUIRE(m.exchanges_completed == 3000);

  const double p = collision_probability(m.rts_attempts, m.rts_collisions);
  CHECK(p > 0.05);
  CHECK(p < 0.90);

  const double throughput =
      saturation_throughput_bps(m.acked_payload_bits, m.sim_duration);
  CHECK(throughput > 5e6);
  CHECK(throughput < 72.2e6);  // cannot beat the raw channel rate

  const DelayCdf cdf(m.delays);
  REQUIRE_FALSE(cdf.empty());
  // No exchange can finish faster than the uncontended handshake.
  CHECK(cdf.quantile_ns(0.0) >= 191531);
  CHECK(cdf.quantile_ns(0.5) <= cdf.quantile_ns(0.9));
  CHECK(cdf.quantile_ns(0.9) <= cdf.quantile_ns(0.99));
}
