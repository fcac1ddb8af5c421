#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbcsma/phy.hpp"

namespace mbcsma {

enum class NodeRole : std::uint8_t { Station, AccessPoint };

/// Directed audibility graph: hears(a, b) means node a receives energy that
/// node b transmits.  Kept separate from traffic flows so hidden- and
/// exposed-terminal geometries can be expressed directly.
class Topology {
 public:
  NodeId add_node(NodeRole role, std::string label = {}) {
    const NodeId id = static_cast<NodeId>(roles_.size());
    roles_.push_back(role);
    labels_.push_back(label.empty() ? default_label(role, id) : std::move(label));
    for (auto& row : hears_) row.push_back(false);
    hears_.emplace_back(roles_.size(), false);
    return id;
  }

  /// Declares that `listener` hears `speaker` (one direction only).
  void add_hears(NodeId listener, NodeId speaker) {
    check(listener);
    check(speaker);
    if (listener == speaker) {
      throw std::invalid_argument("Topology: a node does not hear itself");
    }
    hears_[listener][speaker] = true;
  }

  void add_bidirectional(NodeId a, NodeId b) {
    add_hears(a, b);
    add_hears(b, a);
  }

  /// Every node hears every other node (single-cell geometry).
  void make_complete() {
    for (NodeId a = 0; a < size(); ++a)
      for (NodeId b = 0; b < size(); ++b)
        if (a != b) hears_[a][b] = true;
  }

  bool hears(NodeId listener, NodeId speaker) const {
    check(listener);
    check(speaker);
    return hears_[listener][speaker];
  }

  NodeRole role(NodeId id) const {
    check(id);
    return roles_[id];
  }

  const std::string& label(NodeId id) const {
    check(id);
    return labels_[id];
  }

  NodeId size() const { return static_cast<NodeId>(roles_.size()); }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& row : hears_)
      for (bool h : row) n += h ? 1 : 0;
    return n;
  }

  std::vector<NodeId> stations() const { return with_role(NodeRole::Station); }
  std::vector<NodeId> access_points() const {
    return with_role(NodeRole::AccessPoint);
  }

 private:
  std::vector<NodeId> with_role(NodeRole role) const {
    std::vector<NodeId> out;
    for (NodeId id = 0; id < size(); ++id)
      if (roles_[id] == role) out.push_back(id);
    return out;
  }

  static std::string default_label(NodeRole role, NodeId id) {
    return (role == NodeRole::Station ? "STA" : "AP") + std::to_string(id);
  }

  void check(NodeId id) const {
    if (id >= roles_.size()) throw std::out_of_range("Topology: bad node id");
  }

  std::vector<NodeRole> roles_;
  std::vector<std::string> labels_;
  std::vector<std::vector<bool>> hears_;
};

}  // namespace mbcsma
