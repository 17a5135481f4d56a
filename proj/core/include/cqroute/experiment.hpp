#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cqroute/config.hpp"
#include "cqroute/metrics.hpp"

namespace cqroute {

/// One point of an experiment grid. Episode seeds depend on the axis values
/// only, not on the policy.
struct CellSpec {
  int nodes = 12;
  int flows = 1;
  double dynamic_scale = 1.0;
  std::string policy_name = "cq+";
  PolicySpec policy;
};

struct EpisodeResult {
  int episode = 0;
  std::uint64_t seed = 0;
  EpisodeMetrics metrics;
  MetricsSummary summary;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};

struct CellAggregate {
  MeanStd goodput;
  MeanStd normalized_overhead;  // over episodes that delivered something
  MeanStd broadcast_rate;
  MeanStd mean_delay_slots;
  MeanStd mean_hops;
};

struct CellResult {
  CellSpec cell;
  std::vector<EpisodeResult> episodes;
  CellAggregate aggregate;
};

std::uint64_t episode_seed(std::uint64_t base_seed, int nodes, int flows,
                           double dynamic_scale, int episode);

/// `base` with the cell's network size and flow count (flows regenerated only
/// when either differs from the base), dynamics scaled,
/// policy replaced and seed set.
SimConfig cell_config(const SimConfig& base, const CellSpec& cell,
                      std::uint64_t seed);

struct RunOptions {
  int episodes = 1;
  std::uint64_t base_seed = 1;
  /// Worker threads; results are ordered by episode regardless.
  int jobs = 1;
  /// When set, receives the JSON-lines transition log of every episode.
  std::ostream* transitions = nullptr;
};

CellResult run_cell(const SimConfig& base, const CellSpec& cell,
                    const RunOptions& opts);

CellAggregate aggregate(const std::vector<EpisodeResult>& episodes);

struct SweepAxes {
  std::vector<int> nodes;
  std::vector<int> flows;
  std::vector<double> dynamic_scales;
};

/// Cross product nodes x flows x dynamic_scales x policies, iterated in that
/// nesting order. Unset axes take the base configuration's value.
std::vector<CellResult> run_sweep(const SimConfig& base, const SweepAxes& axes,
                                  const std::vector<CellSpec>& policies,
                                  const RunOptions& opts);

void write_csv_header(std::ostream& os);
void write_episode_row(std::ostream& os, const CellSpec& cell,
                       const EpisodeResult& ep);
void write_aggregate_row(std::ostream& os, const CellResult& result);

}  // namespace cqroute
