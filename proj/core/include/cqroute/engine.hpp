#pragma once

#include <deque>
#include <functional>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cqroute/config.hpp"
#include "cqroute/cq_table.hpp"
#include "cqroute/metrics.hpp"
#include "cqroute/mobility.hpp"
#include "cqroute/packet.hpp"
#include "cqroute/policy.hpp"
#include "cqroute/rng.hpp"

namespace cqroute {

struct QueuedPacket {
  Packet packet;
  /// 0 unicast, 1 broadcast, -1 generated locally.
  int arrival_mode = kLocallyGenerated;
};

struct NodeState {
  NodeId id = 0;
  NodeKinematics kinematics;
  std::deque<QueuedPacket> queue;
  std::unordered_set<PacketId> in_queue;
  /// Every packet id ever enqueued here.
  std::unordered_set<PacketId> seen;
  CqTable table;
  /// Effective previous action per destination, kNoAction before the first.
  std::vector<int> last_action;
  double pending_reward = 0.0;
  double total_reward = 0.0;
};

/// One node that holds a packet at the start of a slot and must choose a
/// transmission mode for it.
struct DecisionRequest {
  NodeId node = 0;
  NodeId destination = 0;
  PacketId packet = 0;
  /// Best known next hop, kNoNode if the node knows none.
  NodeId next_hop = kNoNode;
  /// Confidence of next_hop (c_init when there is none).
  double c_best = 0.0;
  Observation observation;
  std::vector<double> features;
};

struct DecisionRecord {
  NodeId node = 0;
  TxMode requested = TxMode::kUnicast;
  /// Unicast without a known next hop is sent as a broadcast.
  TxMode effective = TxMode::kUnicast;
  double c_best = 0.0;
  int acks = 0;
};

struct SlotReport {
  SlotIndex slot = 0;
  std::vector<DecisionRecord> decisions;
  /// Rewards paid out this slot: every acting node, plus every node with an
  /// outstanding balance once the episode ends. Ascending node id.
  std::vector<std::pair<NodeId, double>> rewards;
  bool done = false;
};

struct Transition {
  SlotIndex slot = 0;
  NodeId node = 0;
  std::vector<double> observation;
  int action = 0;
  double reward = 0.0;
  bool done = false;
};

enum class ReceiveAction { kDeliver, kEnqueue, kDropAck, kDropSilent };

struct ReceiveOutcome {
  ReceiveAction action = ReceiveAction::kDropSilent;
  bool ack = false;
  AckValues ack_values;
  bool duplicate_delivery = false;
};

/// Slot-synchronous episode simulation. Each slot runs in two halves:
/// prepare_slot() moves the nodes, injects traffic and pops one packet from
/// every non-empty queue, producing a decision request per node;
/// commit_slot() then executes the chosen transmissions in node order,
/// resolves receptions and ACKs, updates the CQ tables and pays rewards.
class Engine {
 public:
  /// Throws ConfigError when validate_config reports violations.
  explicit Engine(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  int node_count() const { return cfg_.node_count; }
  /// Last committed slot; 0 before the first.
  SlotIndex slot() const { return slot_; }
  bool finished() const { return finished_; }
  bool slot_pending() const { return prepared_; }
  /// Requests of the prepared slot; empty when no slot is pending.
  const std::vector<DecisionRequest>& pending_requests() const { return requests_; }

  const std::vector<DecisionRequest>& prepare_slot();
  /// `actions[i]` answers `requests[i]` of the preceding prepare_slot().
  SlotReport commit_slot(std::span<const TxMode> actions);

  /// Decisions of the configured built-in policy for `requests`, drawing from
  /// the policy stream in request order.
  std::vector<TxMode> decide(const std::vector<DecisionRequest>& requests);

  /// Runs the remaining slots with the built-in policy.
  const EpisodeMetrics& run();

  /// Handles a successfully received data packet at `node`.
  ReceiveOutcome on_receive(NodeId node, const Packet& packet, NodeId sender,
                            TxMode mode);

  const EpisodeMetrics& metrics() const { return metrics_; }
  const NodeState& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  CqTable& table(NodeId id) { return nodes_.at(static_cast<std::size_t>(id)).table; }
  const std::vector<Region>& regions() const { return regions_; }
  /// Sum of all rewards paid to `id` so far.
  double reward_total(NodeId id) const { return node(id).total_reward; }

  void set_transition_sink(std::function<void(const Transition&)> sink) {
    transition_sink_ = std::move(sink);
  }
  /// Receives "slot,node,x,y,speed" rows after every mobility tick.
  void set_trajectory_stream(std::ostream* os) { trajectory_ = os; }

 private:
  NodeState& mutable_node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
  void tick_mobility();
  void generate_traffic();
  void enqueue(NodeId node, QueuedPacket qp);
  void release_copy(PacketId id);
  void finish_episode(SlotReport& report);
  void pay(NodeId node, double amount, SlotReport& report);
  void emit_transition(NodeId node);

  SimConfig cfg_;
  std::vector<Region> regions_;
  std::vector<NodeState> nodes_;
  Rng mobility_rng_;
  Rng traffic_rng_;
  Rng channel_rng_;
  Rng policy_rng_;
  Rng order_rng_;
  EpisodeMetrics metrics_;
  SlotIndex slot_ = 0;
  bool prepared_ = false;
  bool finished_ = false;
  PacketId next_packet_id_ = 0;
  int ttl_ = 0;

  std::vector<DecisionRequest> requests_;
  std::vector<QueuedPacket> in_flight_;
  std::unordered_map<PacketId, int> live_copies_;
  std::unordered_set<PacketId> delivered_ids_;
  std::vector<char> delivery_credit_;

  std::function<void(const Transition&)> transition_sink_;
  std::vector<std::optional<Transition>> buffered_;
  std::ostream* trajectory_ = nullptr;
};

/// Builds an engine, runs it to completion and returns the metrics.
EpisodeMetrics run_episode(const SimConfig& cfg);

}  // namespace cqroute
