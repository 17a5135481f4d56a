#include "cqroute/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace cqroute {

namespace {

constexpr double kBandVariance[5] = {0.5, 1.0, 2.0, 1.0, 0.5};

double nearest_branch(double angle, double reference) {
  const double two_pi = 2.0 * std::numbers::pi;
  return angle + two_pi * std::round((reference - angle) / two_pi);
}

double draw_rwp_speed(const MobilityConfig& cfg, Rng& rng) {
  // Uniform on [v/2, 3v/2].
  return cfg.mean_speed_mps * rng.uniform(0.5, 1.5);
}

}  // namespace

std::vector<Region> make_regions(RegionLayout layout, const Area& area,
                                 double overlap_frac) {
  if (layout == RegionLayout::kUniform)
    return {Region{0.0, area.width, 0.0, area.height, 1.0}};
  const double band = area.width / (5.0 - 4.0 * overlap_frac);
  const double stride = band * (1.0 - overlap_frac);
  std::vector<Region> regions;
  for (int b = 0; b < 5; ++b) {
    const double left = b * stride;
    const double right = b == 4 ? area.width : std::min(area.width, left + band);
    regions.push_back({left, right, 0.0, area.height, kBandVariance[b]});
  }
  return regions;
}

RegionAssignment assign_regions(RegionLayout layout, const Area& area,
                                double overlap_frac, int node_count,
                                const std::vector<NodeId>& sources,
                                const std::vector<NodeId>& destinations) {
  RegionAssignment out;
  out.regions = make_regions(layout, area, overlap_frac);
  out.node_region.assign(static_cast<std::size_t>(node_count), -1);
  if (layout == RegionLayout::kUniform) {
    std::fill(out.node_region.begin(), out.node_region.end(), 0);
    return out;
  }
  if (node_count < 5)
    throw ConfigError("benchmark_5 layout requires node_count >= 5");
  std::vector<int> population(out.regions.size(), 0);
  auto place = [&](NodeId n, int band) {
    if (n < 0 || n >= node_count) return;
    auto& slot = out.node_region[static_cast<std::size_t>(n)];
    if (slot != -1) return;
    slot = band;
    ++population[static_cast<std::size_t>(band)];
  };
  for (NodeId s : sources) place(s, 0);
  for (NodeId d : destinations) place(d, 4);
  for (NodeId n = 0; n < node_count; ++n) {
    if (out.node_region[static_cast<std::size_t>(n)] != -1) continue;
    const auto it = std::min_element(population.begin(), population.end());
    place(n, static_cast<int>(it - population.begin()));
  }
  return out;
}

NodeKinematics reflect_at_edges(NodeKinematics k, const Region& region) {
  bool clamped = false;
  if (k.x < region.left) {
    k.x = region.left;
    clamped = true;
  } else if (k.x > region.right) {
    k.x = region.right;
    clamped = true;
  }
  if (k.y < region.bottom) {
    k.y = region.bottom;
    clamped = true;
  } else if (k.y > region.top) {
    k.y = region.top;
    clamped = true;
  }
  if (clamped) {
    const double inward =
        std::atan2(region.center_y() - k.y, region.center_x() - k.x);
    k.mean_heading = nearest_branch(inward, k.heading);
  }
  return k;
}

NodeKinematics gm_step(NodeKinematics k, const MobilityConfig& cfg,
                       const Region& region, double dt, Rng& rng) {
  const double mu = cfg.mu;
  const double innovation = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  const double speed_sigma = cfg.speed_sigma * std::sqrt(region.variance_scale);
  const double g_v = speed_sigma > 0.0 ? rng.normal(0.0, speed_sigma) : 0.0;
  const double g_phi =
      cfg.angle_sigma > 0.0 ? rng.normal(0.0, cfg.angle_sigma) : 0.0;
  k.speed = mu * k.speed + (1.0 - mu) * cfg.mean_speed_mps + innovation * g_v;
  k.speed = std::max(0.0, k.speed);
  k.heading = mu * k.heading + (1.0 - mu) * k.mean_heading + innovation * g_phi;
  k.x += k.speed * dt * std::cos(k.heading);
  k.y += k.speed * dt * std::sin(k.heading);
  return reflect_at_edges(k, region);
}

NodeKinematics rwp_step(NodeKinematics k, const MobilityConfig& cfg,
                        const Region& region, double dt, Rng& rng) {
  auto new_leg = [&] {
    k.waypoint_x = rng.uniform(region.left, region.right);
    k.waypoint_y = rng.uniform(region.bottom, region.top);
    k.has_waypoint = true;
    k.speed = draw_rwp_speed(cfg, rng);
  };
  if (!k.has_waypoint ||
      (k.x == k.waypoint_x && k.y == k.waypoint_y)) {
    new_leg();
  }
  const double dx = k.waypoint_x - k.x;
  const double dy = k.waypoint_y - k.y;
  const double dist = std::hypot(dx, dy);
  const double travel = k.speed * dt;
  if (dist <= travel) {
    k.x = k.waypoint_x;
    k.y = k.waypoint_y;
  } else if (dist > 0.0) {
    k.x += dx / dist * travel;
    k.y += dy / dist * travel;
    k.heading = std::atan2(dy, dx);
  }
  // Waypoints live inside the region, so this only guards rounding.
  k.x = std::clamp(k.x, region.left, region.right);
  k.y = std::clamp(k.y, region.bottom, region.top);
  return k;
}

NodeKinematics initial_kinematics(const MobilityConfig& cfg,
                                  const Region& region, int region_index,
                                  Rng& rng) {
  NodeKinematics k;
  k.region = region_index;
  k.x = rng.uniform(region.left, region.right);
  k.y = rng.uniform(region.bottom, region.top);
  k.heading = rng.uniform(-std::numbers::pi, std::numbers::pi);
  k.mean_heading = k.heading;
  k.speed = cfg.model == MobilityModel::kStatic ? 0.0 : cfg.mean_speed_mps;
  return k;
}

NodeKinematics mobility_step(NodeKinematics k, const MobilityConfig& cfg,
                             const Region& region, double dt, Rng& rng) {
  switch (cfg.model) {
    case MobilityModel::kGaussMarkov:
      return gm_step(k, cfg, region, dt, rng);
    case MobilityModel::kRandomWaypoint:
      return rwp_step(k, cfg, region, dt, rng);
    case MobilityModel::kStatic:
      return k;
  }
  return k;
}

void write_trajectory_rows(std::ostream& os, SlotIndex slot,
                           const std::vector<NodeKinematics>& nodes) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    os << slot << ',' << i << ',' << nodes[i].x << ',' << nodes[i].y << ','
       << nodes[i].speed << '\n';
  }
}

}  // namespace cqroute
