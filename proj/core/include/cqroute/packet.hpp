#pragma once

#include <vector>

#include "cqroute/types.hpp"

namespace cqroute {

struct Packet {
  PacketId id = 0;
  int flow = 0;
  NodeId source = 0;
  NodeId destination = 0;
  SlotIndex created_slot = 0;
  /// Nodes that have held this copy, source first. Never repeats a node.
  std::vector<NodeId> path_trace;

  int hop_count() const { return static_cast<int>(path_trace.size()) - 1; }
  bool visited(NodeId n) const;
};

}  // namespace cqroute
