#pragma once

#include "cqroute/types.hpp"

namespace cqroute {

enum class RewardKind { kReward1, kReward2 };

struct RewardConfig {
  RewardKind kind = RewardKind::kReward2;
  /// Discount used by the trainer; carried here so logs record it.
  double gamma = 0.99;
  double w1 = 1.0;  // delivery credit
  double w2 = 0.2;  // transmission that drew no ACK
  double w3 = 0.5;  // ACKs received, normalised by network size
};

/// What happened to one node during one slot.
struct RewardEvents {
  /// A packet whose path trace contains this node was delivered.
  bool delivery_credit = false;
  bool transmitted = false;
  int acks_received = 0;
};

/// Broadcast earns 1 - c(1-eps), unicast earns c(1-eps).
double compute_reward1(TxMode action, double c_best, double epsilon);

double compute_reward2(const RewardEvents& ev, const RewardConfig& cfg,
                       int node_count);

}  // namespace cqroute
