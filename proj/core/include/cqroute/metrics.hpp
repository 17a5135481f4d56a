#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace cqroute {

struct EpisodeMetrics {
  std::int64_t generated = 0;
  std::int64_t delivered = 0;
  std::int64_t duplicates_at_destination = 0;
  /// Packets whose last live copy vanished without a delivery.
  std::int64_t dropped = 0;
  /// Undelivered packets still queued somewhere when the episode stopped.
  std::int64_t residual = 0;
  std::int64_t transmissions = 0;
  std::int64_t broadcasts = 0;
  std::int64_t unicasts = 0;
  std::int64_t acks_returned = 0;
  std::int64_t loop_drops = 0;
  std::int64_t ttl_drops = 0;
  std::int64_t slots = 0;
  std::vector<std::int64_t> delays;  // slots, per delivered packet
  std::vector<std::int64_t> hops;    // per delivered packet

  bool operator==(const EpisodeMetrics&) const = default;
};

struct MetricsSummary {
  double goodput = 0.0;
  /// Transmissions per delivery divided by network size; empty when nothing
  /// was delivered.
  std::optional<double> normalized_overhead;
  double broadcast_rate = 0.0;
  double mean_delay_slots = 0.0;
  double mean_hops = 0.0;
};

MetricsSummary summarize(const EpisodeMetrics& m, int node_count);

}  // namespace cqroute
