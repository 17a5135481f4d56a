#pragma once

#include <iosfwd>
#include <vector>

#include "cqroute/rng.hpp"
#include "cqroute/types.hpp"

namespace cqroute {

enum class MobilityModel { kGaussMarkov, kRandomWaypoint, kStatic };
enum class RegionLayout { kBenchmark5, kUniform };

struct MobilityConfig {
  MobilityModel model = MobilityModel::kGaussMarkov;
  /// Memory of the Gauss-Markov process; 1 keeps the previous value, 0 draws
  /// fresh around the mean every tick.
  double mu = 0.85;
  double mean_speed_mps = 10.0;
  double speed_sigma = 5.0;
  double angle_sigma = 0.7853981633974483;  // pi/4
  RegionLayout region_layout = RegionLayout::kBenchmark5;
  double region_overlap_frac = 0.10;
  /// Seconds per mobility tick; <= 0 means one tick per slot.
  double update_seconds = 0.0;
};

struct Area {
  double width = 800.0;
  double height = 300.0;
};

/// Axis-aligned box a node is confined to, with the speed-variance multiplier
/// applied to speed_sigma^2 for nodes in it.
struct Region {
  double left = 0.0;
  double right = 0.0;
  double bottom = 0.0;
  double top = 0.0;
  double variance_scale = 1.0;

  double center_x() const { return 0.5 * (left + right); }
  double center_y() const { return 0.5 * (bottom + top); }
  bool contains(double x, double y) const {
    return x >= left && x <= right && y >= bottom && y <= top;
  }
};

struct NodeKinematics {
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  double heading = 0.0;
  double mean_heading = 0.0;
  int region = 0;
  // Random-waypoint target.
  double waypoint_x = 0.0;
  double waypoint_y = 0.0;
  bool has_waypoint = false;
};

struct RegionAssignment {
  std::vector<Region> regions;
  std::vector<int> node_region;
};

/// Regions for `layout`. The benchmark layout has five vertical bands of equal
/// width spanning the area, adjacent bands overlapping by `overlap_frac` of a
/// band width, with variance scales {0.5, 1, 2, 1, 0.5}.
std::vector<Region> make_regions(RegionLayout layout, const Area& area,
                                 double overlap_frac);

/// Places flow sources in the leftmost band and destinations in the
/// rightmost, then spreads the remaining nodes so band populations stay
/// balanced (lowest band wins ties). Throws ConfigError for the benchmark
/// layout with fewer than five nodes.
RegionAssignment assign_regions(RegionLayout layout, const Area& area,
                                double overlap_frac, int node_count,
                                const std::vector<NodeId>& sources,
                                const std::vector<NodeId>& destinations);

/// Clamps a proposed position into `region`. When a coordinate was clamped the
/// mean heading is re-aimed at the region centre, choosing the branch of the
/// angle nearest the current heading so the AR(1) heading turns the short way.
NodeKinematics reflect_at_edges(NodeKinematics k, const Region& region);

/// One Gauss-Markov tick followed by reflect_at_edges.
NodeKinematics gm_step(NodeKinematics k, const MobilityConfig& cfg,
                       const Region& region, double dt, Rng& rng);

/// One random-waypoint tick: straight-line motion toward the waypoint; on
/// arrival a new waypoint inside the region and a new speed are drawn.
NodeKinematics rwp_step(NodeKinematics k, const MobilityConfig& cfg,
                        const Region& region, double dt, Rng& rng);

/// Uniform position inside the region and initial speed/heading draws.
NodeKinematics initial_kinematics(const MobilityConfig& cfg,
                                  const Region& region, int region_index,
                                  Rng& rng);

NodeKinematics mobility_step(NodeKinematics k, const MobilityConfig& cfg,
                             const Region& region, double dt, Rng& rng);

/// Appends "slot,node,x,y,speed" rows.
void write_trajectory_rows(std::ostream& os, SlotIndex slot,
                           const std::vector<NodeKinematics>& nodes);

}  // namespace cqroute
