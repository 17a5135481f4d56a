#include <gtest/gtest.h>

#include <sstream>
#include <vector>

#include "cqroute/cq_table.hpp"
#include "cqroute/rng.hpp"
#include "oracles.hpp"

using namespace cqroute;

namespace {

CqTable make_table(int n = 10, double lambda = 0.1) {
  return CqTable(0, n, CqConfig{lambda, 0.0}, 32.0);
}

}  // namespace

TEST(CqTable, UnknownEntriesReportInitValues) {
  const auto t = make_table();
  EXPECT_DOUBLE_EQ(t.c(3, 4), 0.0);
  EXPECT_DOUBLE_EQ(t.h(3, 4), 32.0);
  EXPECT_FALSE(t.known(3, 4));
}

TEST(CqTable, OwnerKeysAreRejected) {
  auto t = make_table();
  EXPECT_THROW(t.c(0, 3), std::invalid_argument);
  EXPECT_THROW(t.update_on_failure(3, 0), std::invalid_argument);
  EXPECT_THROW(t.c(3, 10), std::out_of_range);
}

TEST(CqTable, BestNextHopByKey) {
  auto t = make_table();
  t.set_entry(2, 9, 0.9, 3.0);
  t.set_entry(5, 9, 0.5, 2.0);
  const std::vector<NodeId> cand{2, 5};
  EXPECT_EQ(t.best_next_hop(9, cand), 2);
}

TEST(CqTable, BestNextHopSingleton) {
  auto t = make_table();
  const std::vector<NodeId> cand{4};
  EXPECT_EQ(t.best_next_hop(9, cand), 4);
}

TEST(CqTable, BestNextHopTieGoesToLowestId) {
  const auto t = make_table();
  const std::vector<NodeId> cand{7, 3, 5};
  EXPECT_EQ(t.best_next_hop(9, cand), 3);
  EXPECT_FALSE(t.best_next_hop(9, std::vector<NodeId>{}).has_value());
}

TEST(CqTable, AckFromDestination) {
  const auto t = make_table();
  const auto a = t.make_ack(9, true);
  EXPECT_DOUBLE_EQ(a.c_ack, 1.0);
  EXPECT_DOUBLE_EQ(a.h_ack, 1.0);
}

TEST(CqTable, AckFromBestHop) {
  auto t = make_table();
  t.set_entry(4, 9, 0.5, 2.0);
  const auto a = t.make_ack(9, false);
  EXPECT_DOUBLE_EQ(a.c_ack, 0.5);
  EXPECT_DOUBLE_EQ(a.h_ack, 3.0);
}

TEST(CqTable, AckWithoutCandidatesFallsBackToInit) {
  const auto t = make_table();
  const auto a = t.make_ack(9, false);
  EXPECT_DOUBLE_EQ(a.c_ack, 0.0);
  EXPECT_DOUBLE_EQ(a.h_ack, 33.0);
}

TEST(CqTable, FullConfidenceAckReplacesH) {
  auto t = make_table();
  t.set_entry(3, 9, 0.0, 17.0);
  t.update_on_ack(3, 9, {1.0, 4.0});
  EXPECT_EQ(t.h(3, 9), 4.0);
}

TEST(CqTable, AckUpdateWorkedExample) {
  auto t = make_table();
  t.set_entry(3, 9, 0.5, 5.0);
  t.update_on_ack(3, 9, {0.2, 3.0});
  EXPECT_NEAR(t.h(3, 9), 4.0, 1e-15);
  EXPECT_NEAR(t.c(3, 9), 0.47, 1e-15);
}

TEST(CqTable, RepeatedFullAcksRaiseConfidenceMonotonically) {
  auto t = make_table();
  double prev = t.c(3, 9);
  for (int i = 0; i < 300; ++i) {
    t.update_on_ack(3, 9, {1.0, 1.0});
    ASSERT_GT(t.c(3, 9), prev);
    ASSERT_LT(t.c(3, 9), 1.0);
    prev = t.c(3, 9);
  }
  EXPECT_GT(prev, 0.999);
}

TEST(CqTable, FailureWorkedExamples) {
  auto t = make_table();
  t.set_entry(3, 9, 0.5, 7.0);
  t.update_on_failure(3, 9);
  EXPECT_NEAR(t.c(3, 9), 0.45, 1e-15);
  EXPECT_EQ(t.h(3, 9), 7.0);
  t.set_entry(4, 9, 0.0, 7.0);
  t.update_on_failure(4, 9);
  EXPECT_EQ(t.c(4, 9), 0.0);
}

TEST(CqTable, FailureMarksEntryKnown) {
  auto t = make_table();
  t.update_on_failure(3, 9);
  EXPECT_TRUE(t.known(3, 9));
  EXPECT_EQ(t.known_next_hops(9), std::vector<NodeId>{3});
}

TEST(CqTable, TopKOrderByKey) {
  auto t = make_table();
  t.set_entry(2, 9, 0.9, 3.0);
  t.set_entry(5, 9, 0.5, 2.0);
  t.set_entry(7, 9, 0.99, 10.0);
  const auto rows = t.top_k(9, 3);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].next_hop, 7);
  EXPECT_EQ(rows[1].next_hop, 2);
  EXPECT_EQ(rows[2].next_hop, 5);
}

TEST(CqTable, TopKPadsMissingRows) {
  auto t = make_table();
  t.set_entry(6, 9, 0.4, 2.0);
  const auto rows = t.top_k(9, 4);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].next_hop, 6);
  for (int i = 1; i < 4; ++i) {
    EXPECT_EQ(rows[i].next_hop, kNoNode);
    EXPECT_EQ(rows[i].c, 0.0);
    EXPECT_EQ(rows[i].h, 32.0);
  }
}

TEST(CqTable, TopKTiesByAscendingId) {
  auto t = make_table();
  for (NodeId j : {8, 2, 5}) t.set_entry(j, 9, 0.5, 2.0);
  const auto rows = t.top_k(9, 3);
  EXPECT_EQ(rows[0].next_hop, 2);
  EXPECT_EQ(rows[1].next_hop, 5);
  EXPECT_EQ(rows[2].next_hop, 8);
}

TEST(CqTable, CsvDumpShape) {
  auto t = make_table(4);
  t.set_entry(1, 2, 0.25, 3.0);
  std::ostringstream c_csv;
  t.write_c_csv(c_csv);
  int lines = 0;
  std::string line;
  std::istringstream in(c_csv.str());
  while (std::getline(in, line)) ++lines;
  EXPECT_GE(lines, 4);
  EXPECT_NE(c_csv.str().find("0.25"), std::string::npos);
}

// Random update sequences: results track the oracle, stay in range and never
// need clamping.
TEST(CqTableProperty, RandomSequencesMatchOracleAndStayInRange) {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const double lambda = rng.uniform(0.01, 0.99);
    const int n = 8;
    CqTable t(0, n, CqConfig{lambda, 0.0}, 32.0);
    std::vector<oracle::CH> ref(static_cast<std::size_t>(n * n), oracle::CH{0.0, 32.0});
    for (int step = 0; step < 400; ++step) {
      const NodeId j = 1 + static_cast<NodeId>(rng.below(n - 1));
      const NodeId d = 1 + static_cast<NodeId>(rng.below(n - 1));
      auto& r = ref[static_cast<std::size_t>(j * n + d)];
      if (rng.bernoulli(0.3)) {
        t.update_on_failure(j, d);
        r = oracle::failure_update(r.c, r.h, lambda);
      } else {
        const double c_ack = rng.uniform();
        const double h_ack = 1.0 + rng.uniform(0.0, 40.0);
        t.update_on_ack(j, d, {c_ack, h_ack});
        r = oracle::ack_update(r.c, r.h, c_ack, h_ack, lambda);
      }
      ASSERT_NEAR(t.c(j, d), r.c, 1e-12);
      ASSERT_NEAR(t.h(j, d), r.h, 1e-12);
      ASSERT_GE(t.c(j, d), 0.0);
      ASSERT_LE(t.c(j, d), 1.0);
      ASSERT_GE(t.h(j, d), 1.0);
    }
    EXPECT_EQ(t.clamp_events(), 0);
  }
}

TEST(CqTableProperty, ArgminInvariantUnderHScaling) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = make_table();
    auto b = make_table();
    const double scale = rng.uniform(1.0, 50.0);
    std::vector<NodeId> cand;
    for (NodeId j = 1; j < 10; ++j) {
      if (j == 5) continue;
      const double c = rng.uniform();
      const double h = rng.uniform(1.0, 20.0);
      a.set_entry(j, 5, c, h);
      b.set_entry(j, 5, c, h * scale);
      cand.push_back(j);
    }
    ASSERT_EQ(a.best_next_hop(5, cand), b.best_next_hop(5, cand));
  }
}

TEST(CqTableProperty, TopKHeadIsBestNextHop) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = make_table();
    for (NodeId j = 1; j < 10; ++j) {
      if (j == 6 || rng.bernoulli(0.3)) continue;
      t.set_entry(j, 6, rng.uniform(), rng.uniform(1.0, 10.0));
    }
    const auto known = t.known_next_hops(6);
    if (known.empty()) continue;
    const auto rows = t.top_k(6, t.node_count() - 1);
    ASSERT_EQ(rows.front().next_hop, *t.best_next_hop(6, known));
    const auto short_rows = t.top_k(6, 2);
    for (std::size_t i = 0; i < short_rows.size(); ++i)
      ASSERT_EQ(short_rows[i].next_hop, rows[i].next_hop);
  }
}

TEST(CqTableProperty, FailureIsMonotoneAndLeavesH) {
  Rng rng(9);
  auto t = make_table();
  for (int i = 0; i < 1000; ++i) {
    const double c = rng.uniform();
    const double h = rng.uniform(1.0, 30.0);
    t.set_entry(2, 3, c, h);
    t.update_on_failure(2, 3);
    ASSERT_LE(t.c(2, 3), c);
    ASSERT_EQ(t.h(2, 3), h);
  }
}
