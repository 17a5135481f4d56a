#include <gtest/gtest.h>

#include "cqroute/metrics.hpp"
#include "cqroute/reward.hpp"

using namespace cqroute;

TEST(Reward1, Extremes) {
  EXPECT_DOUBLE_EQ(compute_reward1(TxMode::kBroadcast, 1.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(compute_reward1(TxMode::kUnicast, 1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(compute_reward1(TxMode::kBroadcast, 0.0, 0.05), 1.0);
}

TEST(Reward1, HalfConfidence) {
  EXPECT_NEAR(compute_reward1(TxMode::kBroadcast, 0.5, 0.05), 0.525, 1e-15);
  EXPECT_NEAR(compute_reward1(TxMode::kUnicast, 0.5, 0.05), 0.475, 1e-15);
}

TEST(Reward2, DeliveryOnly) {
  const RewardConfig cfg;
  EXPECT_DOUBLE_EQ(compute_reward2({true, false, 0}, cfg, 12), cfg.w1);
}

TEST(Reward2, UnansweredTransmission) {
  const RewardConfig cfg;
  EXPECT_DOUBLE_EQ(compute_reward2({false, true, 0}, cfg, 12), -cfg.w2);
}

TEST(Reward2, AckTerm) {
  RewardConfig cfg;
  cfg.w3 = 0.1;
  EXPECT_NEAR(compute_reward2({false, true, 3}, cfg, 12), -0.025, 1e-15);
}

TEST(Reward2, IdleNodeEarnsNothing) {
  EXPECT_EQ(compute_reward2({}, RewardConfig{}, 12), 0.0);
}

TEST(Summary, OverheadExample) {
  EpisodeMetrics m;
  m.generated = 60;
  m.delivered = 50;
  m.transmissions = 200;
  const auto s = summarize(m, 10);
  ASSERT_TRUE(s.normalized_overhead.has_value());
  EXPECT_DOUBLE_EQ(*s.normalized_overhead, 0.4);
  EXPECT_DOUBLE_EQ(s.goodput, 50.0 / 60.0);
}

TEST(Summary, NothingDelivered) {
  EpisodeMetrics m;
  m.generated = 10;
  m.transmissions = 30;
  const auto s = summarize(m, 5);
  EXPECT_FALSE(s.normalized_overhead.has_value());
  EXPECT_EQ(s.goodput, 0.0);
}

TEST(Summary, AllUnicast) {
  EpisodeMetrics m;
  m.generated = 4;
  m.delivered = 4;
  m.transmissions = m.unicasts = 8;
  m.delays = {1, 2, 3, 6};
  m.hops = {2, 2, 3, 3};
  const auto s = summarize(m, 4);
  EXPECT_EQ(s.broadcast_rate, 0.0);
  EXPECT_DOUBLE_EQ(s.mean_delay_slots, 3.0);
  EXPECT_DOUBLE_EQ(s.mean_hops, 2.5);
}
