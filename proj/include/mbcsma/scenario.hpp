#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbcsma/phy.hpp"
#include "mbcsma/topology.hpp"

namespace mbcsma {

enum class ScenarioKind : std::uint8_t {
  SaturatedCell,
  HiddenNode,
  ExposedNode,
  PathologicPairs,
};

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::SaturatedCell: return "saturated";
    case ScenarioKind::HiddenNode: return "hidden";
    case ScenarioKind::ExposedNode: return "exposed";
    case ScenarioKind::PathologicPairs: return "pathologic";
  }
  return "?";
}

inline std::optional<ScenarioKind> scenario_from_string(const std::string& s) {
  if (s == "saturated") return ScenarioKind::SaturatedCell;
  if (s == "hidden") return ScenarioKind::HiddenNode;
  if (s == "exposed") return ScenarioKind::ExposedNode;
  if (s == "pathologic") return ScenarioKind::PathologicPairs;
  return std::nullopt;
}

enum class TrafficMode : std::uint8_t {
  Saturation,    ///< every station always has a head-of-queue packet
  SinglePacket,  ///< every station sends exactly one packet, then stops
};

/// One uplink flow: a station, the node it addresses, and how many contiguous
/// bands its RTS occupies.
struct FlowSpec {
  NodeId station = kNoNode;
  NodeId destination = kNoNode;
  std::uint32_t span = 1;
};

struct BuiltScenario {
  Topology topology;
  std::vector<FlowSpec> flows;
};

/// One fully connected cell: stations 0..n-1 and a single access point with
/// id n.  Every frame is audible everywhere.
inline BuiltScenario build_saturated_cell(std::uint32_t n_stations) {
  if (n_stations == 0) {
    throw std::invalid_argument("build_saturated_cell: need at least 1 station");
  }
  BuiltScenario out;
  for (std::uint32_t i = 0; i < n_stations; ++i) {
    out.topology.add_node(NodeRole::Station, "sta" + std::to_string(i));
  }
  const NodeId ap = out.topology.add_node(NodeRole::AccessPoint, "ap");
  out.topology.make_complete();
  for (std::uint32_t i = 0; i < n_stations; ++i) {
    out.flows.push_back(FlowSpec{i, ap, 1});
  }
  return out;
}

/// Two stations that cannot hear each other, both talking to one access
/// point: X(0) <-> R(2) <-> Y(1), four directed edges in total.
inline BuiltScenario build_hidden_node() {
  BuiltScenario out;
  const NodeId x = out.topology.add_node(NodeRole::Station, "X");
  const NodeId y = out.topology.add_node(NodeRole::Station, "Y");
  const NodeId r = out.topology.add_node(NodeRole::AccessPoint, "R");
  out.topology.add_bidirectional(x, r);
  out.topology.add_bidirectional(y, r);
  out.flows.push_back(FlowSpec{x, r, 1});
  out.flows.push_back(FlowSpec{y, r, 1});
  return out;
}

/// Two parallel links whose senders hear each other but whose receivers are
/// out of each other's range: S(0)->D(2), S_E(1)->D_E(3), with S <-> S_E the
/// only cross edge.
inline BuiltScenario build_exposed_node() {
  BuiltScenario out;
  const NodeId s = out.topology.add_node(NodeRole::Station, "S");
  const NodeId se = out.topology.add_node(NodeRole::Station, "S_E");
  const NodeId d = out.topology.add_node(NodeRole::AccessPoint, "D");
  const NodeId de = out.topology.add_node(NodeRole::AccessPoint, "D_E");
  out.topology.add_bidirectional(s, d);
  out.topology.add_bidirectional(se, de);
  out.topology.add_bidirectional(s, se);
  out.flows.push_back(FlowSpec{s, d, 1});
  out.flows.push_back(FlowSpec{se, de, 1});
  return out;
}

/// Two flows with asymmetric hearing: A(0)->B(2) and C(1)->D(3), where B
/// hears both senders but D hears only C.  Simultaneous decodable RTS for
/// different destinations land at B, which must stay silent.  The fully
/// connected variant runs the same flows on a complete graph.
inline BuiltScenario build_pathologic_pairs(bool fully_connected) {
  BuiltScenario out;
  const NodeId a = out.topology.add_node(NodeRole::Station, "A");
  const NodeId c = out.topology.add_node(NodeRole::Station, "C");
  const NodeId b = out.topology.add_node(NodeRole::AccessPoint, "B");
  const NodeId d = out.topology.add_node(NodeRole::AccessPoint, "D");
  if (fully_connected) {
    out.topology.make_complete();
  } else {
    out.topology.add_bidirectional(a, b);
    out.topology.add_bidirectional(c, b);
    out.topology.add_bidirectional(c, d);
  }
  out.flows.push_back(FlowSpec{a, b, 1});
  out.flows.push_back(FlowSpec{c, d, 1});
  return out;
}

/// Complete description of one run.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::SaturatedCell;
  std::uint32_t n_stations = 10;  ///< saturated cell only; others are fixed
  std::uint32_t n_bands = 1;
  std::vector<std::uint32_t> spans;  ///< empty: all 1; size 1: broadcast
  PhyParams phy;
  std::uint32_t cw_min = 16;
  std::uint32_t cw_max = 1024;
  TrafficMode traffic = TrafficMode::Saturation;
  bool nav_enabled = true;
  bool fully_connected = false;  ///< pathologic variant switch
  std::uint64_t seed = 1;
  std::uint64_t warmup_exchanges = 1000;
  std::uint64_t target_exchanges = 100000;  ///< measured, after warmup
  std::optional<double> time_limit_seconds;

  BuiltScenario build() const {
    validate();
    BuiltScenario built;
    switch (kind) {
      case ScenarioKind::SaturatedCell:
        built = build_saturated_cell(n_stations);
        break;
      case ScenarioKind::HiddenNode:
        built = build_hidden_node();
        break;
      case ScenarioKind::ExposedNode:
        built = build_exposed_node();
        break;
      case ScenarioKind::PathologicPairs:
        built = build_pathologic_pairs(fully_connected);
        break;
    }
    apply_spans(built);
    return built;
  }

  void validate() const {
    phy.validate();
    BandPlan{n_bands}.validate();
    if (cw_min < 1) throw std::invalid_argument("cw_min must be >= 1");
    std::uint32_t w = cw_min;
    while (w < cw_max) w *= 2;
    if (w != cw_max) {
      throw std::invalid_argument("cw_max must be cw_min times a power of two");
    }
    for (std::uint32_t s : spans) {
      if (s < 1 || s > n_bands) {
        throw std::invalid_argument("span must be in [1, n_bands]");
      }
    }
    if (traffic == TrafficMode::SinglePacket && warmup_exchanges != 0) {
      throw std::invalid_argument(
          "single-packet runs cannot discard a warmup period");
    }
    if (traffic == TrafficMode::Saturation && target_exchanges == 0 &&
        !time_limit_seconds) {
      throw std::invalid_argument(
          "a saturation run needs an exchange target or a time limit");
    }
    if (kind == ScenarioKind::SaturatedCell && n_stations == 0) {
      throw std::invalid_argument("need at least one station");
    }
  }

 private:
  void apply_spans(BuiltScenario& built) const {
    if (spans.empty()) return;
    if (spans.size() == 1) {
      for (FlowSpec& f : built.flows) f.span = spans[0];
      return;
    }
    if (spans.size() != built.flows.size()) {
      throw std::invalid_argument(
          "spans must have one entry, or one per station");
    }
    for (std::size_t i = 0; i < spans.size(); ++i) {
      built.flows[i].span = spans[i];
    }
  }
};

}  // namespace mbcsma
