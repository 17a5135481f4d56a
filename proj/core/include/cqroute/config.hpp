#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cqroute/channel.hpp"
#include "cqroute/cq_table.hpp"
#include "cqroute/mobility.hpp"
#include "cqroute/policy.hpp"
#include "cqroute/reward.hpp"
#include "cqroute/types.hpp"

namespace cqroute {

struct FlowSpec {
  NodeId source = 0;
  NodeId destination = 1;
  /// Integer part is generated every slot; the fraction is a Bernoulli draw.
  double packets_per_slot = 1.0;
};

struct EngineOptions {
  /// Visit nodes in a fresh random order each slot instead of ascending id.
  bool shuffle_node_order = false;
  /// ACK arrivals of packets this node already forwarded.
  bool ack_forwarded_duplicates = true;
  /// Hop budget is ttl_factor * node_count.
  int ttl_factor = 4;
};

struct SimConfig {
  int node_count = 12;
  Area area;
  /// One slot is one packet duration.
  double slot_seconds = 0.05;
  int traffic_slots = 3000;
  /// Extra slots allowed for queues to drain; unset means 10 * node_count.
  std::optional<int> drain_slot_cap;
  std::vector<FlowSpec> flows{FlowSpec{0, 11, 1.0}};
  /// Optional fixed start positions (x, y), one per node; placement is
  /// random inside each node's region when empty.
  std::vector<std::pair<double, double>> initial_positions;
  MobilityConfig mobility;
  ChannelConfig channel;
  CqConfig cq;
  PolicySpec policy;
  RewardConfig reward;
  EngineOptions engine;
  std::uint64_t seed = 1;
  int k_neighbors = 4;
  double h_cap = 32.0;

  double radio_range_m() const { return channel.range_m; }
  int effective_drain_cap() const {
    return drain_slot_cap.value_or(10 * node_count);
  }
  double mobility_dt() const {
    return mobility.update_seconds > 0.0 ? mobility.update_seconds : slot_seconds;
  }
};

/// Empty iff every invariant holds.
std::vector<std::string> validate_config(const SimConfig& cfg);

/// 12 nodes on 800 m x 300 m, 150 m range, 3000 traffic slots, K = 4, one
/// flow from node 0 to node 11.
SimConfig benchmark_config();

/// `count` flows; flow i runs from node i to node n-1-i.
std::vector<FlowSpec> make_flows(int node_count, int count,
                                 double packets_per_slot);

/// Sets node_count and rebuilds the flows with the same count and the first
/// flow's rate.
void resize_network(SimConfig& cfg, int node_count);
/// Scales mean speed and speed sigma.
void scale_dynamics(SimConfig& cfg, double scale);

}  // namespace cqroute
