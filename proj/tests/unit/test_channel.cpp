#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cqroute/channel.hpp"

using namespace cqroute;

namespace {

std::vector<NodeKinematics> at(std::initializer_list<std::pair<double, double>> xy) {
  std::vector<NodeKinematics> out;
  for (auto [x, y] : xy) {
    NodeKinematics k;
    k.x = x;
    k.y = y;
    out.push_back(k);
  }
  return out;
}

}  // namespace

TEST(Link, ProbabilityShape) {
  const ChannelConfig cfg;
  EXPECT_EQ(link_success_prob(0.0, cfg), 1.0);
  EXPECT_EQ(link_success_prob(150.0, cfg), 1.0);
  EXPECT_NEAR(link_success_prob(165.0, cfg), std::exp(-1.0), 1e-15);
  EXPECT_LT(link_success_prob(300.0, cfg), 1e-4);
}

TEST(Transmit, LosslessUnicastInRange) {
  ChannelConfig cfg;
  cfg.ack_lossless = true;
  const auto pos = at({{0, 0}, {100, 0}});
  Rng rng(1);
  const auto out = transmit(0, TxMode::kUnicast, 1, pos, cfg, rng);
  EXPECT_EQ(out.receivers, std::vector<NodeId>{1});
  EXPECT_EQ(out.acks, std::vector<NodeId>{1});
}

TEST(Transmit, BroadcastReachesEveryoneInRange) {
  const ChannelConfig cfg;
  const auto pos = at({{0, 0}, {50, 0}, {0, 60}, {100, 100}});
  Rng rng(1);
  const auto out = transmit(0, TxMode::kBroadcast, kNoNode, pos, cfg, rng);
  EXPECT_EQ(out.receivers, (std::vector<NodeId>{1, 2, 3}));
  EXPECT_EQ(out.acks, (std::vector<NodeId>{1, 2, 3}));
}

TEST(Transmit, UnicastAtOneFalloffLengthMatchesProbability) {
  ChannelConfig cfg;
  cfg.ack_lossless = true;
  const auto pos = at({{0, 0}, {165, 0}});
  Rng rng(2024);
  const int trials = 100000;
  int ok = 0;
  for (int i = 0; i < trials; ++i)
    ok += transmit(0, TxMode::kUnicast, 1, pos, cfg, rng).receivers.size();
  EXPECT_NEAR(static_cast<double>(ok) / trials, std::exp(-1.0), 0.02);
}

TEST(TransmitProperty, AcksAreSubsetOfReceivers) {
  const ChannelConfig cfg;
  Rng place(5);
  Rng rng(6);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<NodeKinematics> pos(8);
    for (auto& k : pos) {
      k.x = place.uniform(0, 400);
      k.y = place.uniform(0, 300);
    }
    const auto mode = trial % 2 ? TxMode::kBroadcast : TxMode::kUnicast;
    const auto out = transmit(0, mode, 3, pos, cfg, rng);
    ASSERT_TRUE(std::is_sorted(out.receivers.begin(), out.receivers.end()));
    ASSERT_TRUE(std::includes(out.receivers.begin(), out.receivers.end(), out.acks.begin(),
                              out.acks.end()));
    ASSERT_EQ(std::count(out.receivers.begin(), out.receivers.end(), 0), 0);
    if (mode == TxMode::kUnicast) ASSERT_LE(out.receivers.size(), 1u);
  }
}

TEST(TransmitProperty, FullyConnectedLosslessBroadcastReachesAll) {
  ChannelConfig cfg;
  cfg.ack_lossless = true;
  Rng place(8);
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<NodeKinematics> pos(6);
    for (auto& k : pos) {
      k.x = place.uniform(0, 100);
      k.y = place.uniform(0, 100);
    }
    const auto out = transmit(2, TxMode::kBroadcast, kNoNode, pos, cfg, rng);
    ASSERT_EQ(out.receivers, (std::vector<NodeId>{0, 1, 3, 4, 5}));
    ASSERT_EQ(out.acks, out.receivers);
  }
}
