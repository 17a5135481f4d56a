#include "cqroute/metrics.hpp"

#include <numeric>

namespace cqroute {

namespace {

double mean(const std::vector<std::int64_t>& v) {
  if (v.empty()) return 0.0;
  const auto sum = std::accumulate(v.begin(), v.end(), std::int64_t{0});
  return static_cast<double>(sum) / static_cast<double>(v.size());
}

}  // namespace

MetricsSummary summarize(const EpisodeMetrics& m, int node_count) {
  MetricsSummary s;
  if (m.generated > 0)
    s.goodput = static_cast<double>(m.delivered) / static_cast<double>(m.generated);
  if (m.delivered > 0)
    s.normalized_overhead = static_cast<double>(m.transmissions) /
                            (static_cast<double>(node_count) *
                             static_cast<double>(m.delivered));
  const auto decisions = m.broadcasts + m.unicasts;
  if (decisions > 0)
    s.broadcast_rate = static_cast<double>(m.broadcasts) / static_cast<double>(decisions);
  s.mean_delay_slots = mean(m.delays);
  s.mean_hops = mean(m.hops);
  return s;
}

}  // namespace cqroute
