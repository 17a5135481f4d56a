#include "cqroute/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace cqroute {

namespace {

bool draw(double p, Rng& rng) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return rng.uniform() < p;
}

}  // namespace

double link_success_prob(double distance, const ChannelConfig& cfg) {
  if (distance <= cfg.range_m) return 1.0;
  return std::exp(-(distance - cfg.range_m) / cfg.falloff_m);
}

double distance(const NodeKinematics& a, const NodeKinematics& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

TxOutcome transmit(NodeId sender, TxMode mode, NodeId target,
                   std::span<const NodeKinematics> positions,
                   const ChannelConfig& cfg, Rng& rng) {
  const auto n = static_cast<NodeId>(positions.size());
  if (sender < 0 || sender >= n)
    throw std::out_of_range("transmit: sender out of range");
  TxOutcome out;
  out.mode = mode;
  std::vector<double> probs;
  auto consider = [&](NodeId r) {
    const double p = link_success_prob(
        distance(positions[static_cast<std::size_t>(sender)],
                 positions[static_cast<std::size_t>(r)]),
        cfg);
    if (draw(p, rng)) {
      out.receivers.push_back(r);
      probs.push_back(p);
    }
  };
  if (mode == TxMode::kUnicast) {
    if (target < 0 || target >= n || target == sender)
      throw std::invalid_argument("transmit: invalid unicast target");
    consider(target);
  } else {
    for (NodeId r = 0; r < n; ++r) {
      if (r != sender) consider(r);
    }
  }
  for (std::size_t i = 0; i < out.receivers.size(); ++i) {
    if (cfg.ack_lossless || draw(probs[i], rng))
      out.acks.push_back(out.receivers[i]);
  }
  return out;
}

}  // namespace cqroute
