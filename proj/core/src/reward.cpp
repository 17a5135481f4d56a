#include "cqroute/reward.hpp"

namespace cqroute {

double compute_reward1(TxMode action, double c_best, double epsilon) {
  const double unicast_value = c_best * (1.0 - epsilon);
  return action == TxMode::kBroadcast ? 1.0 - unicast_value : unicast_value;
}

double compute_reward2(const RewardEvents& ev, const RewardConfig& cfg,
                       int node_count) {
  double r = 0.0;
  if (ev.delivery_credit) r += cfg.w1;
  if (ev.transmitted && ev.acks_received == 0) r -= cfg.w2;
  r -= cfg.w3 * static_cast<double>(ev.acks_received) /
       static_cast<double>(node_count);
  return r;
}

}  // namespace cqroute
