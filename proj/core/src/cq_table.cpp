#include "cqroute/cq_table.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace cqroute {

CqTable::CqTable(NodeId owner, int node_count, const CqConfig& cfg,
                 double h_init)
    : owner_(owner),
      node_count_(node_count),
      lambda_(cfg.lambda),
      c_init_(cfg.c_init),
      h_init_(h_init),
      c_(static_cast<std::size_t>(node_count) * node_count, cfg.c_init),
      h_(static_cast<std::size_t>(node_count) * node_count, h_init),
      known_(static_cast<std::size_t>(node_count) * node_count, 0),
      snapshots_(static_cast<std::size_t>(node_count)) {
  if (node_count < 2) throw ConfigError("CqTable: node_count must be >= 2");
  if (owner < 0 || owner >= node_count)
    throw ConfigError("CqTable: owner out of range");
  if (!(lambda_ > 0.0 && lambda_ < 1.0))
    throw ConfigError("CqTable: lambda must lie in (0, 1)");
  if (!(c_init_ >= 0.0 && c_init_ <= 1.0))
    throw ConfigError("CqTable: c_init must lie in [0, 1]");
  if (!(h_init_ >= 1.0)) throw ConfigError("CqTable: h_init must be >= 1");
}

void CqTable::check_key(NodeId next_hop, NodeId dest) const {
  if (next_hop < 0 || next_hop >= node_count_ || dest < 0 ||
      dest >= node_count_)
    throw std::out_of_range("CqTable: node id out of range");
  if (next_hop == owner_ || dest == owner_)
    throw std::invalid_argument("CqTable: entry keyed by the owner node");
}

std::size_t CqTable::index(NodeId next_hop, NodeId dest) const {
  check_key(next_hop, dest);
  return static_cast<std::size_t>(next_hop) * node_count_ + dest;
}

double CqTable::c(NodeId next_hop, NodeId dest) const {
  return c_[index(next_hop, dest)];
}

double CqTable::h(NodeId next_hop, NodeId dest) const {
  return h_[index(next_hop, dest)];
}

bool CqTable::known(NodeId next_hop, NodeId dest) const {
  return known_[index(next_hop, dest)] != 0;
}

std::vector<NodeId> CqTable::known_next_hops(NodeId dest) const {
  std::vector<NodeId> out;
  if (dest == owner_) return out;
  for (NodeId j = 0; j < node_count_; ++j) {
    if (j == owner_) continue;
    if (known_[index(j, dest)]) out.push_back(j);
  }
  return out;
}

void CqTable::set_entry(NodeId next_hop, NodeId dest, double c, double h) {
  const auto i = index(next_hop, dest);
  c_[i] = c;
  h_[i] = h;
  known_[i] = 1;
}

std::optional<NodeId> CqTable::best_next_hop(
    NodeId dest, std::span<const NodeId> candidates) const {
  std::optional<NodeId> best;
  double best_key = 0.0;
  for (NodeId j : candidates) {
    const auto i = index(j, dest);
    const double key = h_[i] * (1.0 - c_[i]);
    if (!best || key < best_key || (key == best_key && j < *best)) {
      best = j;
      best_key = key;
    }
  }
  return best;
}

AckValues CqTable::make_ack(NodeId dest, std::span<const NodeId> candidates,
                            bool is_destination) const {
  if (is_destination) return {1.0, 1.0};
  const auto k = best_next_hop(dest, candidates);
  if (!k) return {c_init_, 1.0 + h_init_};
  const auto i = index(*k, dest);
  return {c_[i], 1.0 + h_[i]};
}

AckValues CqTable::make_ack(NodeId dest, bool is_destination) const {
  if (is_destination) return {1.0, 1.0};
  const auto known = known_next_hops(dest);
  return make_ack(dest, known, false);
}

void CqTable::update_on_ack(NodeId next_hop, NodeId dest,
                            const AckValues& ack) {
  const auto i = index(next_hop, dest);
  const double c_t = c_[i];
  const double alpha = std::max(ack.c_ack, 1.0 - c_t);
  double h_next = (1.0 - alpha) * h_[i] + alpha * ack.h_ack;
  double c_next = (1.0 - lambda_) * c_t + lambda_ * ack.c_ack;
  if (h_next < 1.0) {
    h_next = 1.0;
    ++clamp_events_;
  }
  if (c_next < 0.0 || c_next > 1.0) {
    c_next = std::clamp(c_next, 0.0, 1.0);
    ++clamp_events_;
  }
  h_[i] = h_next;
  c_[i] = c_next;
  known_[i] = 1;
}

void CqTable::update_on_failure(NodeId next_hop, NodeId dest) {
  const auto i = index(next_hop, dest);
  double c_next = (1.0 - lambda_) * c_[i];
  if (c_next < 0.0) {
    c_next = 0.0;
    ++clamp_events_;
  }
  c_[i] = c_next;
  known_[i] = 1;
}

std::vector<RouteEntry> CqTable::top_k(NodeId dest, int k) const {
  if (k < 1) throw std::invalid_argument("top_k: k must be >= 1");
  std::vector<RouteEntry> rows;
  for (NodeId j : known_next_hops(dest)) {
    const auto i = index(j, dest);
    rows.push_back({j, c_[i], h_[i]});
  }
  std::sort(rows.begin(), rows.end(),
            [](const RouteEntry& a, const RouteEntry& b) {
              const double ka = a.uncertainty_key();
              const double kb = b.uncertainty_key();
              if (ka != kb) return ka < kb;
              return a.next_hop < b.next_hop;
            });
  rows.resize(static_cast<std::size_t>(k),
              RouteEntry{kNoNode, c_init_, h_init_});
  return rows;
}

const std::optional<TopKSnapshot>& CqTable::snapshot(NodeId dest) const {
  return snapshots_.at(static_cast<std::size_t>(dest));
}

void CqTable::set_snapshot(NodeId dest, TopKSnapshot snap) {
  snapshots_.at(static_cast<std::size_t>(dest)) = std::move(snap);
}

void CqTable::write_c_csv(std::ostream& os) const { write_csv(os, c_); }
void CqTable::write_h_csv(std::ostream& os) const { write_csv(os, h_); }

void CqTable::write_csv(std::ostream& os,
                        const std::vector<double>& values) const {
  os << "next_hop";
  for (NodeId d = 0; d < node_count_; ++d) {
    if (d != owner_) os << ",d" << d;
  }
  os << '\n';
  for (NodeId j = 0; j < node_count_; ++j) {
    if (j == owner_) continue;
    os << j;
    for (NodeId d = 0; d < node_count_; ++d) {
      if (d == owner_) continue;
      os << ',' << values[static_cast<std::size_t>(j) * node_count_ + d];
    }
    os << '\n';
  }
}

}  // namespace cqroute
