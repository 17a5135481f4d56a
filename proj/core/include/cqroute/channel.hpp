#pragma once

#include <span>
#include <vector>

#include "cqroute/mobility.hpp"
#include "cqroute/rng.hpp"
#include "cqroute/types.hpp"

namespace cqroute {

struct ChannelConfig {
  double range_m = 150.0;
  /// Decay length of the success probability beyond range_m.
  double falloff_m = 15.0;
  bool ack_lossless = false;
};

struct TxOutcome {
  TxMode mode = TxMode::kUnicast;
  std::vector<NodeId> receivers;  // ascending
  std::vector<NodeId> acks;       // ascending, subset of receivers
};

/// 1 within range, exp(-(d - R) / falloff) beyond.
double link_success_prob(double distance, const ChannelConfig& cfg);

double distance(const NodeKinematics& a, const NodeKinematics& b);

/// Resolves one data transmission and the ACKs of its receivers. Every
/// candidate receiver (only `target` for unicast, every other node for
/// broadcast) succeeds independently; each receiver's ACK crosses the reverse
/// link with the same probability unless acks are lossless. Loop filtering of
/// ACKs is the caller's job.
TxOutcome transmit(NodeId sender, TxMode mode, NodeId target,
                   std::span<const NodeKinematics> positions,
                   const ChannelConfig& cfg, Rng& rng);

}  // namespace cqroute
