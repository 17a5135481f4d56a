#include "cqroute/config.hpp"

#include <cmath>
#include <string>

namespace cqroute {

std::vector<std::string> validate_config(const SimConfig& cfg) {
  std::vector<std::string> v;
  auto require = [&](bool ok, std::string msg) {
    if (!ok) v.push_back(std::move(msg));
  };
  require(cfg.node_count >= 2, "node_count >= 2");
  require(cfg.area.width > 0 && cfg.area.height > 0, "area dimensions > 0");
  require(cfg.channel.range_m > 0, "radio_range_m > 0");
  require(cfg.channel.falloff_m > 0, "falloff_m > 0");
  require(cfg.slot_seconds > 0, "slot_seconds > 0");
  require(cfg.traffic_slots >= 1, "traffic_slots >= 1");
  require(cfg.effective_drain_cap() >= 0, "drain_slot_cap >= 0");
  require(cfg.k_neighbors >= 1, "k_neighbors >= 1");
  require(cfg.h_cap >= 1, "h_cap >= 1");
  require(cfg.engine.ttl_factor >= 1, "ttl_factor >= 1");
  for (std::size_t i = 0; i < cfg.flows.size(); ++i) {
    const auto& f = cfg.flows[i];
    const std::string tag = "flow " + std::to_string(i) + ": ";
    const bool src_ok = f.source >= 0 && f.source < cfg.node_count;
    const bool dst_ok = f.destination >= 0 && f.destination < cfg.node_count;
    require(src_ok, tag + "source is not a valid node id");
    require(dst_ok, tag + "destination is not a valid node id");
    require(f.source != f.destination, tag + "source != destination");
    require(f.packets_per_slot >= 0 && std::isfinite(f.packets_per_slot),
            tag + "packets_per_slot >= 0");
  }
  if (!cfg.initial_positions.empty()) {
    require(cfg.initial_positions.size() == static_cast<std::size_t>(cfg.node_count),
            "initial_positions has one entry per node");
    for (const auto& [x, y] : cfg.initial_positions)
      require(x >= 0 && x <= cfg.area.width && y >= 0 && y <= cfg.area.height,
              "initial_positions inside the area");
  }
  const auto& m = cfg.mobility;
  require(m.mu >= 0 && m.mu <= 1, "0 <= mu <= 1");
  require(m.mean_speed_mps >= 0, "mean_speed_mps >= 0");
  require(m.speed_sigma >= 0 && m.angle_sigma >= 0, "mobility sigmas >= 0");
  require(m.region_overlap_frac >= 0 && m.region_overlap_frac < 0.5,
          "0 <= region_overlap_frac < 0.5");
  if (m.region_layout == RegionLayout::kBenchmark5)
    require(cfg.node_count >= 5, "benchmark_5 layout needs node_count >= 5");
  require(cfg.cq.lambda > 0 && cfg.cq.lambda < 1, "0 < lambda < 1");
  require(cfg.cq.c_init >= 0 && cfg.cq.c_init <= 1, "0 <= c_init <= 1");
  require(cfg.policy.epsilon >= 0 && cfg.policy.epsilon <= 1, "0 <= epsilon <= 1");
  if (cfg.policy.kind == PolicyKind::kNeural) {
    require(cfg.policy.weights != nullptr, "neural policy requires weights");
    if (cfg.policy.weights)
      require(cfg.policy.weights->k_neighbors == cfg.k_neighbors,
              "weights k_neighbors matches k_neighbors");
  }
  const auto& r = cfg.reward;
  require(r.gamma >= 0 && r.gamma < 1, "0 <= gamma < 1");
  require(r.w1 >= 0 && r.w2 >= 0 && r.w3 >= 0 && std::isfinite(r.w1) &&
              std::isfinite(r.w2) && std::isfinite(r.w3),
          "reward weights finite and >= 0");
  return v;
}

SimConfig benchmark_config() {
  SimConfig cfg;
  cfg.node_count = 12;
  cfg.area = {800.0, 300.0};
  cfg.channel.range_m = 150.0;
  cfg.traffic_slots = 3000;
  cfg.k_neighbors = 4;
  cfg.flows = make_flows(12, 1, 1.0);
  return cfg;
}

std::vector<FlowSpec> make_flows(int node_count, int count,
                                 double packets_per_slot) {
  if (count < 0 || 2 * count > node_count)
    throw ConfigError("cannot place " + std::to_string(count) +
                      " disjoint flows on " + std::to_string(node_count) +
                      " nodes");
  std::vector<FlowSpec> flows;
  for (int i = 0; i < count; ++i)
    flows.push_back({i, node_count - 1 - i, packets_per_slot});
  return flows;
}

void resize_network(SimConfig& cfg, int node_count) {
  const double rate = cfg.flows.empty() ? 1.0 : cfg.flows.front().packets_per_slot;
  const int count = static_cast<int>(cfg.flows.size());
  cfg.node_count = node_count;
  cfg.flows = make_flows(node_count, count, rate);
}

void scale_dynamics(SimConfig& cfg, double scale) {
  cfg.mobility.mean_speed_mps *= scale;
  cfg.mobility.speed_sigma *= scale;
}

}  // namespace cqroute
