#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "cqroute/config.hpp"

namespace fixtures {

/// Static nodes at fixed positions, one region covering the area, links
/// perfect within range and effectively dead beyond it, lossless ACKs.
inline cqroute::SimConfig static_lossless(std::vector<std::pair<double, double>> positions,
                                          int traffic_slots) {
  cqroute::SimConfig cfg = cqroute::benchmark_config();
  cfg.node_count = static_cast<int>(positions.size());
  cfg.initial_positions = std::move(positions);
  cfg.mobility.model = cqroute::MobilityModel::kStatic;
  cfg.mobility.region_layout = cqroute::RegionLayout::kUniform;
  cfg.channel.falloff_m = 1e-3;
  cfg.channel.ack_lossless = true;
  cfg.traffic_slots = traffic_slots;
  cfg.flows = {{0, cfg.node_count - 1, 1.0}};
  return cfg;
}

inline std::filesystem::path data_dir() { return CQROUTE_TEST_DATA_DIR; }

}  // namespace fixtures
