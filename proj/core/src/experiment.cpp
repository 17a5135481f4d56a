#include "cqroute/experiment.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "cqroute/engine.hpp"
#include "cqroute/rng.hpp"

namespace cqroute {

namespace {

std::string num(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  out.count = static_cast<int>(xs.size());
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

std::string transition_line(int episode, const Transition& t) {
  nlohmann::json j = {{"episode", episode}, {"slot", t.slot},   {"node", t.node},
                      {"observation", t.observation},            {"action", t.action},
                      {"reward", t.reward},                      {"done", t.done}};
  return j.dump() + "\n";
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t base_seed, int nodes, int flows,
                           double dynamic_scale, int episode) {
  std::uint64_t h = hash_combine(base_seed, static_cast<std::uint64_t>(nodes));
  h = hash_combine(h, static_cast<std::uint64_t>(flows));
  h = hash_combine(h, std::bit_cast<std::uint64_t>(dynamic_scale));
  return hash_combine(h, static_cast<std::uint64_t>(episode));
}

SimConfig cell_config(const SimConfig& base, const CellSpec& cell,
                      std::uint64_t seed) {
  SimConfig cfg = base;
  if (cell.nodes != base.node_count ||
      cell.flows != static_cast<int>(base.flows.size())) {
    const double rate = base.flows.empty() ? 1.0 : base.flows.front().packets_per_slot;
    cfg.node_count = cell.nodes;
    cfg.flows = make_flows(cell.nodes, cell.flows, rate);
  }
  scale_dynamics(cfg, cell.dynamic_scale);
  cfg.policy = cell.policy;
  cfg.seed = seed;
  return cfg;
}

CellAggregate aggregate(const std::vector<EpisodeResult>& episodes) {
  std::vector<double> goodput, overhead, bcast, delay, hops;
  for (const auto& e : episodes) {
    goodput.push_back(e.summary.goodput);
    if (e.summary.normalized_overhead) overhead.push_back(*e.summary.normalized_overhead);
    bcast.push_back(e.summary.broadcast_rate);
    delay.push_back(e.summary.mean_delay_slots);
    hops.push_back(e.summary.mean_hops);
  }
  return {mean_std(goodput), mean_std(overhead), mean_std(bcast), mean_std(delay),
          mean_std(hops)};
}

CellResult run_cell(const SimConfig& base, const CellSpec& cell,
                    const RunOptions& opts) {
  CellResult result;
  result.cell = cell;
  result.episodes.resize(static_cast<std::size_t>(opts.episodes));
  std::vector<std::string> logs(static_cast<std::size_t>(opts.episodes));

  // Validate once up front so config errors surface on the calling thread.
  {
    const auto cfg = cell_config(base, cell, opts.base_seed);
    const auto violations = validate_config(cfg);
    if (!violations.empty()) throw ConfigError("invalid config: " + violations.front());
  }

  auto run_one = [&](int e) {
    const auto seed = episode_seed(opts.base_seed, cell.nodes, cell.flows,
                                   cell.dynamic_scale, e);
    Engine engine(cell_config(base, cell, seed));
    std::string& log = logs[static_cast<std::size_t>(e)];
    if (opts.transitions)
      engine.set_transition_sink([&log, e](const Transition& t) { log += transition_line(e, t); });
    engine.run();
    auto& out = result.episodes[static_cast<std::size_t>(e)];
    out.episode = e;
    out.seed = seed;
    out.metrics = engine.metrics();
    out.summary = summarize(out.metrics, cell.nodes);
  };

  const int jobs = std::max(1, std::min(opts.jobs, opts.episodes));
  if (jobs == 1) {
    for (int e = 0; e < opts.episodes; ++e) run_one(e);
  } else {
    std::mutex mu;
    int next = 0;
    std::exception_ptr failure;
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          int e;
          {
            std::lock_guard lock(mu);
            if (next >= opts.episodes || failure) return;
            e = next++;
          }
          try {
            run_one(e);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
  }
  if (opts.transitions) {
    for (const auto& l : logs) *opts.transitions << l;
  }
  result.aggregate = aggregate(result.episodes);
  return result;
}

std::vector<CellResult> run_sweep(const SimConfig& base, const SweepAxes& axes,
                                  const std::vector<CellSpec>& policies,
                                  const RunOptions& opts) {
  const auto nodes = axes.nodes.empty() ? std::vector<int>{base.node_count} : axes.nodes;
  const auto flows = axes.flows.empty()
                         ? std::vector<int>{static_cast<int>(base.flows.size())}
                         : axes.flows;
  const auto scales =
      axes.dynamic_scales.empty() ? std::vector<double>{1.0} : axes.dynamic_scales;
  std::vector<CellResult> out;
  for (int n : nodes) {
    for (int f : flows) {
      for (double s : scales) {
        for (const auto& p : policies) {
          CellSpec cell = p;
          cell.nodes = n;
          cell.flows = f;
          cell.dynamic_scale = s;
          out.push_back(run_cell(base, cell, opts));
        }
      }
    }
  }
  return out;
}

void write_csv_header(std::ostream& os) {
  os << "row,policy,nodes,flows,dynamic_scale,episode,seed,generated,delivered,"
        "dropped,residual,transmissions,broadcasts,unicasts,acks,goodput,"
        "normalized_overhead,broadcast_rate,mean_delay_slots,mean_hops,"
        "goodput_std,normalized_overhead_std,broadcast_rate_std,"
        "mean_delay_slots_std,mean_hops_std,episodes\n";
}

void write_episode_row(std::ostream& os, const CellSpec& cell,
                       const EpisodeResult& ep) {
  const auto& m = ep.metrics;
  const auto& s = ep.summary;
  os << "episode," << cell.policy_name << ',' << cell.nodes << ',' << cell.flows << ','
     << num(cell.dynamic_scale) << ',' << ep.episode << ',' << ep.seed << ','
     << m.generated << ',' << m.delivered << ',' << m.dropped << ',' << m.residual << ','
     << m.transmissions << ',' << m.broadcasts << ',' << m.unicasts << ','
     << m.acks_returned << ',' << num(s.goodput) << ','
     << (s.normalized_overhead ? num(*s.normalized_overhead) : std::string()) << ','
     << num(s.broadcast_rate) << ',' << num(s.mean_delay_slots) << ','
     << num(s.mean_hops) << ",,,,,,1\n";
}

void write_aggregate_row(std::ostream& os, const CellResult& r) {
  const auto& a = r.aggregate;
  std::int64_t generated = 0, delivered = 0, dropped = 0, residual = 0, tx = 0,
               bc = 0, uc = 0, acks = 0;
  for (const auto& e : r.episodes) {
    generated += e.metrics.generated;
    delivered += e.metrics.delivered;
    dropped += e.metrics.dropped;
    residual += e.metrics.residual;
    tx += e.metrics.transmissions;
    bc += e.metrics.broadcasts;
    uc += e.metrics.unicasts;
    acks += e.metrics.acks_returned;
  }
  const auto opt = [](const MeanStd& m, double v) {
    return m.count > 0 ? num(v) : std::string();
  };
  os << "aggregate," << r.cell.policy_name << ',' << r.cell.nodes << ','
     << r.cell.flows << ',' << num(r.cell.dynamic_scale) << ",,," << generated << ','
     << delivered << ',' << dropped << ',' << residual << ',' << tx << ',' << bc << ','
     << uc << ',' << acks << ',' << num(a.goodput.mean) << ','
     << opt(a.normalized_overhead, a.normalized_overhead.mean) << ','
     << num(a.broadcast_rate.mean) << ',' << num(a.mean_delay_slots.mean) << ','
     << num(a.mean_hops.mean) << ',' << num(a.goodput.std) << ','
     << opt(a.normalized_overhead, a.normalized_overhead.std) << ','
     << num(a.broadcast_rate.std) << ',' << num(a.mean_delay_slots.std) << ','
     << num(a.mean_hops.std) << ',' << r.episodes.size() << '\n';
}

}  // namespace cqroute
