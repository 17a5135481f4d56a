#include <gtest/gtest.h>

#include <sstream>

#include "cqroute/experiment.hpp"

using namespace cqroute;

namespace {

SimConfig quick_base() {
  auto cfg = benchmark_config();
  cfg.traffic_slots = 200;
  return cfg;
}

CellSpec cell(int nodes, int flows, double dyn, PolicyKind kind) {
  CellSpec c;
  c.nodes = nodes;
  c.flows = flows;
  c.dynamic_scale = dyn;
  c.policy.kind = kind;
  c.policy_name = to_string(kind);
  return c;
}

std::string csv_of(const CellResult& r) {
  std::ostringstream os;
  write_csv_header(os);
  for (const auto& e : r.episodes) write_episode_row(os, r.cell, e);
  write_aggregate_row(os, r);
  return os.str();
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST(Experiment, EpisodeSeedIgnoresPolicyButNotAxes) {
  const auto s = episode_seed(1, 12, 1, 1.0, 0);
  EXPECT_EQ(s, episode_seed(1, 12, 1, 1.0, 0));
  EXPECT_NE(s, episode_seed(1, 12, 1, 1.0, 1));
  EXPECT_NE(s, episode_seed(1, 13, 1, 1.0, 0));
  EXPECT_NE(s, episode_seed(1, 12, 2, 1.0, 0));
  EXPECT_NE(s, episode_seed(1, 12, 1, 2.0, 0));
  EXPECT_NE(s, episode_seed(2, 12, 1, 1.0, 0));
}

TEST(Experiment, CellConfigKeepsCustomFlowsWhenShapeMatches) {
  auto base = quick_base();
  base.flows = {{2, 7, 0.5}};
  const auto same = cell_config(base, cell(12, 1, 1.0, PolicyKind::kCqPlus), 5);
  EXPECT_EQ(same.flows[0].source, 2);
  const auto resized = cell_config(base, cell(20, 2, 2.0, PolicyKind::kCqPlus), 5);
  EXPECT_EQ(resized.node_count, 20);
  ASSERT_EQ(resized.flows.size(), 2u);
  EXPECT_EQ(resized.flows[1].destination, 18);
  EXPECT_DOUBLE_EQ(resized.flows[1].packets_per_slot, 0.5);
  EXPECT_DOUBLE_EQ(resized.mobility.mean_speed_mps, 2.0 * base.mobility.mean_speed_mps);
  EXPECT_EQ(resized.seed, 5u);
}

TEST(Experiment, RunProducesRowPerEpisodePlusAggregate) {
  RunOptions opts;
  opts.episodes = 5;
  const auto r = run_cell(quick_base(), cell(12, 1, 1.0, PolicyKind::kCqPlus), opts);
  ASSERT_EQ(r.episodes.size(), 5u);
  EXPECT_EQ(count_lines(csv_of(r)), 1 + 5 + 1);
  EXPECT_EQ(r.aggregate.goodput.count, 5);
}

TEST(Experiment, ParallelJobsMatchSerial) {
  RunOptions serial;
  serial.episodes = 6;
  RunOptions parallel = serial;
  parallel.jobs = 3;
  std::ostringstream log_a, log_b;
  serial.transitions = &log_a;
  parallel.transitions = &log_b;
  const auto c = cell(12, 1, 1.0, PolicyKind::kCqPlus);
  EXPECT_EQ(csv_of(run_cell(quick_base(), c, serial)), csv_of(run_cell(quick_base(), c, parallel)));
  EXPECT_EQ(log_a.str(), log_b.str());
  EXPECT_FALSE(log_a.str().empty());
}

TEST(Experiment, SweepCellEqualsIndependentRun) {
  SweepAxes axes;
  axes.nodes = {10, 15};
  axes.flows = {1, 2};
  RunOptions opts;
  opts.episodes = 2;
  opts.base_seed = 77;
  const std::vector<CellSpec> policies{cell(0, 0, 1.0, PolicyKind::kCqPlus),
                                       cell(0, 0, 1.0, PolicyKind::kCqPlusHard)};
  const auto results = run_sweep(quick_base(), axes, policies, opts);
  ASSERT_EQ(results.size(), 8u);
  const auto& target = results[5];  // nodes 15, flows 1, hard rule
  EXPECT_EQ(target.cell.nodes, 15);
  EXPECT_EQ(target.cell.flows, 1);
  EXPECT_EQ(target.cell.policy.kind, PolicyKind::kCqPlusHard);
  const auto alone = run_cell(quick_base(), cell(15, 1, 1.0, PolicyKind::kCqPlusHard), opts);
  EXPECT_EQ(csv_of(target), csv_of(alone));
}

TEST(Experiment, PoliciesShareNetworkRealisations) {
  RunOptions opts;
  opts.episodes = 3;
  const auto a = run_cell(quick_base(), cell(12, 1, 1.0, PolicyKind::kCqPlus), opts);
  const auto b = run_cell(quick_base(), cell(12, 1, 1.0, PolicyKind::kCqPlusHard), opts);
  for (int e = 0; e < 3; ++e) {
    EXPECT_EQ(a.episodes[e].seed, b.episodes[e].seed);
    EXPECT_EQ(a.episodes[e].metrics.generated, b.episodes[e].metrics.generated);
  }
}

TEST(Experiment, FlowSweepGivesCellPerFlowCount) {
  SweepAxes axes;
  axes.flows = {1, 2, 3, 4};
  RunOptions opts;
  const auto results = run_sweep(quick_base(), axes, {cell(0, 0, 1.0, PolicyKind::kCqPlus)}, opts);
  ASSERT_EQ(results.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(results[i].cell.flows, i + 1);
}

TEST(Experiment, AggregateStatistics) {
  std::vector<EpisodeResult> eps(3);
  const double g[3] = {0.2, 0.4, 0.9};
  for (int i = 0; i < 3; ++i) {
    eps[i].summary.goodput = g[i];
    if (i != 1) eps[i].summary.normalized_overhead = 1.0 + i;
  }
  const auto a = aggregate(eps);
  EXPECT_NEAR(a.goodput.mean, 0.5, 1e-15);
  EXPECT_NEAR(a.goodput.std, std::sqrt((0.09 + 0.01 + 0.16) / 2.0), 1e-15);
  EXPECT_EQ(a.normalized_overhead.count, 2);
  EXPECT_DOUBLE_EQ(a.normalized_overhead.mean, 2.0);
}
