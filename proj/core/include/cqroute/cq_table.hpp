#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "cqroute/types.hpp"

namespace cqroute {

struct CqConfig {
  /// Weight of a fresh c_ack in the confidence moving average.
  double lambda = 0.1;
  double c_init = 0.0;
};

struct AckValues {
  double c_ack = 0.0;
  double h_ack = 1.0;
};

struct RouteEntry {
  NodeId next_hop = kNoNode;  // kNoNode marks a padding row
  double c = 0.0;
  double h = 1.0;

  double uncertainty_key() const { return h * (1.0 - c); }
};

/// The top-K rows observed at a node's previous decision toward one
/// destination; feeds the delta features of the next observation.
struct TopKSnapshot {
  std::vector<double> c;
  std::vector<double> h;
};

/// Confidence (C) and hop-estimate (H) levels held by one node, indexed by
/// (next hop, destination). Storage is dense; an entry counts as known once it
/// has been touched by an ACK or a failure, and unknown entries report the
/// initialisation values.
class CqTable {
 public:
  CqTable(NodeId owner, int node_count, const CqConfig& cfg, double h_init);

  NodeId owner() const { return owner_; }
  int node_count() const { return node_count_; }
  double lambda() const { return lambda_; }
  double c_init() const { return c_init_; }
  double h_init() const { return h_init_; }

  double c(NodeId next_hop, NodeId dest) const;
  double h(NodeId next_hop, NodeId dest) const;
  bool known(NodeId next_hop, NodeId dest) const;
  /// Known next hops toward `dest`, ascending id.
  std::vector<NodeId> known_next_hops(NodeId dest) const;

  /// Test and tooling hook: writes an entry directly and marks it known.
  void set_entry(NodeId next_hop, NodeId dest, double c, double h);

  /// Argmin of h*(1-c) over `candidates`, lowest id on ties.
  std::optional<NodeId> best_next_hop(NodeId dest,
                                      std::span<const NodeId> candidates) const;

  /// ACK payload this node returns for a packet toward `dest`.
  AckValues make_ack(NodeId dest, std::span<const NodeId> candidates,
                     bool is_destination) const;
  /// make_ack over this node's known next hops.
  AckValues make_ack(NodeId dest, bool is_destination) const;

  void update_on_ack(NodeId next_hop, NodeId dest, const AckValues& ack);
  void update_on_failure(NodeId next_hop, NodeId dest);

  /// Exactly k rows for `dest`, sorted by h*(1-c) then id, padded with
  /// (kNoNode, c_init, h_init).
  std::vector<RouteEntry> top_k(NodeId dest, int k) const;

  const std::optional<TopKSnapshot>& snapshot(NodeId dest) const;
  void set_snapshot(NodeId dest, TopKSnapshot snap);

  /// Number of times a post-update clamp changed a value. Stays zero for valid
  /// inputs under exact arithmetic.
  long clamp_events() const { return clamp_events_; }

  /// CSV with one row per next hop and one column per destination.
  void write_c_csv(std::ostream& os) const;
  void write_h_csv(std::ostream& os) const;

 private:
  std::size_t index(NodeId next_hop, NodeId dest) const;
  void check_key(NodeId next_hop, NodeId dest) const;
  void write_csv(std::ostream& os, const std::vector<double>& values) const;

  NodeId owner_;
  int node_count_;
  double lambda_;
  double c_init_;
  double h_init_;
  std::vector<double> c_;
  std::vector<double> h_;
  std::vector<char> known_;
  std::vector<std::optional<TopKSnapshot>> snapshots_;
  long clamp_events_ = 0;
};

}  // namespace cqroute
