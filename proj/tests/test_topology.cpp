#include <catch2/catch_amalgamated.hpp>

#include "mbcsma/scenario.hpp"
#include "mbcsma/topology.hpp"

using namespace mbcsma;

TEST_CASE("audibility is directed and self-hearing is rejected", "[topology]") {
  Topology t;
  const NodeId a = t.add_node(NodeRole::Station, "a");
  const NodeId b = t.add_node(NodeRole::AccessPoint, "b");
  REQUIRE_FALSE(t.hears(a, b));
  t.add_hears(a, b);
  REQUIRE(t.hears(a, b));
  REQUIRE_FALSE(t.hears(b, a));
  REQUIRE_THROWS_AS(t.add_hears(a, a), std::invalid_argument);
  REQUIRE(t.role(a) == NodeRole::Station);
  REQUIRE(t.role(b) == NodeRole::AccessPoint);
  REQUIRE(t.label(a) == "a");
  REQUIRE(t.edge_count() == 1);
}

TEST_CASE("complete graphs connect everyone", "[topology]") {
  Topology t;
  for (int i = 0; i < 4; ++i) t.add_node(NodeRole::Station);
  t.make_complete();
  REQUIRE(t.edge_count() == 12);
  REQUIRE(t.stations().size() == 4);
  REQUIRE(t.access_points().empty());
}

TEST_CASE("saturated cell builder", "[topology][scenario]") {
  const BuiltScenario s = build_saturated_cell(3);
  REQUIRE(s.topology.size() == 4);
  REQUIRE(s.topology.edge_count() == 12);  // complete graph on 4 nodes
  REQUIRE(s.topology.role(3) == NodeRole::AccessPoint);
  REQUIRE(s.flows.size() == 3);
  for (std::uint32_t i = 0; i < 3; ++i) {
    REQUIRE(s.flows[i].station == i);
    REQUIRE(s.flows[i].destination == 3);
  }
}

TEST_CASE("hidden-node builder has exactly four directed edges",
          "[topology][scenario]") {
  const BuiltScenario s = build_hidden_node();
  const NodeId x = 0, y = 1, r = 2;
  REQUIRE(s.topology.size() == 3);
  REQUIRE(s.topology.edge_count() == 4);
  REQUIRE(s.topology.hears(x, r));
  REQUIRE(s.topology.hears(r, x));
  REQUIRE(s.topology.hears(y, r));
  REQUIRE(s.topology.hears(r, y));
  REQUIRE_FALSE(s.topology.hears(x, y));
  REQUIRE_FALSE(s.topology.hears(y, x));
  REQUIRE(s.topology.role(r) == NodeRole::AccessPoint);
}

TEST_CASE("exposed-node builder isolates the receivers",
          "[topology][scenario]") {
  const BuiltScenario s = build_exposed_node();
  const NodeId sta = 0, sta_e = 1, d = 2, d_e = 3;
  REQUIRE(s.topology.edge_count() == 6);
  REQUIRE(s.topology.hears(sta, sta_e));  // senders share a collision domain
  REQUIRE(s.topology.hears(sta_e, sta));
  REQUIRE_FALSE(s.topology.hears(d, sta_e));  // but receivers are isolated
  REQUIRE_FALSE(s.topology.hears(d_e, sta));
  REQUIRE_FALSE(s.topology.hears(d, d_e));
  REQUIRE(s.flows[0].destination == d);
  REQUIRE(s.flows[1].destination == d_e);
}

TEST_CASE("pathologic builder gives the APs asymmetric hearing",
          "[topology][scenario]") {
  const BuiltScenario s = build_pathologic_pairs(false);
  const NodeId a = 0, c = 1, b = 2, d = 3;
  REQUIRE(s.topology.edge_count() == 6);
  REQUIRE(s.topology.hears(b, a));  // B hears both senders
  REQUIRE(s.topology.hears(b, c));
  REQUIRE(s.topology.hears(d, c));  // D hears only C
  REQUIRE_FALSE(s.topology.hears(d, a));
  REQUIRE_FALSE(s.topology.hears(d, b));
  REQUIRE(s.flows[0].station == a);
  REQUIRE(s.flows[0].destination == b);
  REQUIRE(s.flows[1].station == c);
  REQUIRE(s.flows[1].destination == d);

  const BuiltScenario full = build_pathologic_pairs(true);
  REQUIRE(full.topology.edge_count() == 12);
}

TEST_CASE("scenario validation rejects inconsistent settings", "[scenario]") {
  ScenarioConfig cfg;
  cfg.n_bands = 2;
  cfg.spans = {3};  // span exceeds the band count
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = ScenarioConfig{};
  cfg.cw_min = 16;
  cfg.cw_max = 48;  // not 16 * 2^k
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = ScenarioConfig{};
  cfg.traffic = TrafficMode::SinglePacket;
  cfg.warmup_exchanges = 10;  // nothing to warm up in single-packet mode
  REQUIRE_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = ScenarioConfig{};
  REQUIRE_NOTHROW(cfg.validate());
}

TEST_CASE("span lists broadcast or map one-to-one", "[scenario]") {
  ScenarioConfig cfg;
  cfg.kind = ScenarioKind::SaturatedCell;
  cfg.n_stations = 3;
  cfg.n_bands = 4;
  cfg.spans = {2};
  BuiltScenario s = cfg.build();
  for (const FlowSpec& f : s.flows) REQUIRE(f.span == 2);

  cfg.spans = {1, 2, 4};
  s = cfg.build();
  REQUIRE(s.flows[0].span == 1);
  REQUIRE(s.flows[1].span == 2);
  REQUIRE(s.flows[2].span == 4);

  cfg.spans = {1, 2};  // neither one value nor one per station
  REQUIRE_THROWS_AS(cfg.build(), std::invalid_argument);

  cfg.spans.clear();
  s = cfg.build();
  for (const FlowSpec& f : s.flows) REQUIRE(f.span == 1);
}
