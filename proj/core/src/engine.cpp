#include "cqroute/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cqroute/channel.hpp"
#include "cqroute/reward.hpp"

namespace cqroute {

bool Packet::visited(NodeId n) const {
  return std::find(path_trace.begin(), path_trace.end(), n) != path_trace.end();
}

namespace {

SimConfig checked(SimConfig cfg) {
  const auto violations = validate_config(cfg);
  if (!violations.empty()) {
    std::string msg = "invalid config:";
    for (const auto& v : violations) msg += " [" + v + "]";
    throw ConfigError(msg);
  }
  return cfg;
}

}  // namespace

Engine::Engine(SimConfig cfg)
    : cfg_(checked(std::move(cfg))),
      mobility_rng_(Rng(cfg_.seed).fork("mobility")),
      traffic_rng_(Rng(cfg_.seed).fork("traffic")),
      channel_rng_(Rng(cfg_.seed).fork("channel")),
      policy_rng_(Rng(cfg_.seed).fork("policy")),
      order_rng_(Rng(cfg_.seed).fork("order")),
      ttl_(cfg_.engine.ttl_factor * cfg_.node_count) {
  std::vector<NodeId> sources;
  std::vector<NodeId> destinations;
  for (const auto& f : cfg_.flows) {
    sources.push_back(f.source);
    destinations.push_back(f.destination);
  }
  const auto assignment =
      assign_regions(cfg_.mobility.region_layout, cfg_.area,
                     cfg_.mobility.region_overlap_frac, cfg_.node_count,
                     sources, destinations);
  regions_ = assignment.regions;
  Rng placement = Rng(cfg_.seed).fork("placement");
  nodes_.reserve(static_cast<std::size_t>(cfg_.node_count));
  for (NodeId i = 0; i < cfg_.node_count; ++i) {
    const int r = assignment.node_region[static_cast<std::size_t>(i)];
    nodes_.push_back(NodeState{
        i,
        initial_kinematics(cfg_.mobility, regions_[static_cast<std::size_t>(r)],
                           r, placement),
        {},
        {},
        {},
        CqTable(i, cfg_.node_count, cfg_.cq, cfg_.h_cap),
        std::vector<int>(static_cast<std::size_t>(cfg_.node_count), kNoAction),
        0.0,
        0.0});
  }
  for (std::size_t i = 0; i < cfg_.initial_positions.size(); ++i) {
    nodes_[i].kinematics.x = cfg_.initial_positions[i].first;
    nodes_[i].kinematics.y = cfg_.initial_positions[i].second;
  }
  delivery_credit_.assign(nodes_.size(), 0);
  buffered_.resize(nodes_.size());
}

void Engine::tick_mobility() {
  if (cfg_.mobility.model != MobilityModel::kStatic) {
    const double dt = cfg_.mobility_dt();
    for (auto& n : nodes_) {
      n.kinematics = mobility_step(
          n.kinematics, cfg_.mobility,
          regions_[static_cast<std::size_t>(n.kinematics.region)], dt,
          mobility_rng_);
    }
  }
  if (trajectory_) {
    std::vector<NodeKinematics> ks;
    ks.reserve(nodes_.size());
    for (const auto& n : nodes_) ks.push_back(n.kinematics);
    write_trajectory_rows(*trajectory_, slot_ + 1, ks);
  }
}

void Engine::enqueue(NodeId node, QueuedPacket qp) {
  auto& n = mutable_node(node);
  const PacketId id = qp.packet.id;
  n.seen.insert(id);
  n.in_queue.insert(id);
  n.queue.push_back(std::move(qp));
  ++live_copies_[id];
}

void Engine::release_copy(PacketId id) {
  auto it = live_copies_.find(id);
  if (it == live_copies_.end()) return;
  if (--it->second == 0) {
    live_copies_.erase(it);
    if (!delivered_ids_.contains(id)) ++metrics_.dropped;
  }
}

void Engine::generate_traffic() {
  const SlotIndex t = slot_ + 1;
  if (t > cfg_.traffic_slots) return;
  for (std::size_t f = 0; f < cfg_.flows.size(); ++f) {
    const auto& flow = cfg_.flows[f];
    const double whole = std::floor(flow.packets_per_slot);
    const double frac = flow.packets_per_slot - whole;
    auto count = static_cast<std::int64_t>(whole);
    if (frac > 0.0 && traffic_rng_.bernoulli(frac)) ++count;
    for (std::int64_t c = 0; c < count; ++c) {
      Packet p;
      p.id = next_packet_id_++;
      p.flow = static_cast<int>(f);
      p.source = flow.source;
      p.destination = flow.destination;
      p.created_slot = t;
      p.path_trace = {flow.source};
      ++metrics_.generated;
      enqueue(flow.source, QueuedPacket{std::move(p), kLocallyGenerated});
    }
  }
}

const std::vector<DecisionRequest>& Engine::prepare_slot() {
  if (finished_) throw std::logic_error("prepare_slot: episode finished");
  if (prepared_) return requests_;
  tick_mobility();
  generate_traffic();

  std::vector<NodeId> order(nodes_.size());
  std::iota(order.begin(), order.end(), 0);
  if (cfg_.engine.shuffle_node_order) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[order_rng_.below(i)]);
  }

  requests_.clear();
  in_flight_.clear();
  for (NodeId id : order) {
    auto& n = mutable_node(id);
    if (n.queue.empty()) continue;
    QueuedPacket qp = std::move(n.queue.front());
    n.queue.pop_front();
    n.in_queue.erase(qp.packet.id);

    DecisionRequest req;
    req.node = id;
    req.destination = qp.packet.destination;
    req.packet = qp.packet.id;
    const auto rows = n.table.top_k(req.destination, cfg_.k_neighbors);
    req.next_hop = rows.front().next_hop;
    req.c_best = rows.front().c;
    const int prev =
        cfg_.policy.prev_action_feature == PrevActionFeature::kSelf
            ? n.last_action[static_cast<std::size_t>(req.destination)]
            : qp.arrival_mode;
    req.observation = build_observation_from_rows(
        n.table, req.destination, rows, cfg_.h_cap, prev, qp.arrival_mode);
    req.features = req.observation.flatten();
    requests_.push_back(std::move(req));
    in_flight_.push_back(std::move(qp));
  }
  prepared_ = true;
  return requests_;
}

std::vector<TxMode> Engine::decide(const std::vector<DecisionRequest>& requests) {
  std::vector<TxMode> actions;
  actions.reserve(requests.size());
  const auto& p = cfg_.policy;
  for (const auto& r : requests) {
    switch (p.kind) {
      case PolicyKind::kCqPlus:
        actions.push_back(decide_cq_plus(r.c_best, p.epsilon, policy_rng_));
        break;
      case PolicyKind::kCqPlusHard:
        actions.push_back(decide_cq_plus_hard(r.c_best, p.epsilon));
        break;
      case PolicyKind::kNeural:
        actions.push_back(decide_neural(p, r.features, policy_rng_));
        break;
      case PolicyKind::kExternal:
        throw std::logic_error("external policy: actions come from the driver");
    }
  }
  return actions;
}

ReceiveOutcome Engine::on_receive(NodeId node, const Packet& packet,
                                  NodeId /*sender*/, TxMode mode) {
  ReceiveOutcome out;
  auto& n = mutable_node(node);
  if (packet.visited(node)) {
    ++metrics_.loop_drops;
    out.action = ReceiveAction::kDropSilent;
    return out;
  }
  if (node == packet.destination) {
    out.action = ReceiveAction::kDeliver;
    out.ack = true;
    out.ack_values = n.table.make_ack(packet.destination, true);
    if (delivered_ids_.contains(packet.id)) {
      out.duplicate_delivery = true;
      ++metrics_.duplicates_at_destination;
      return out;
    }
    delivered_ids_.insert(packet.id);
    ++metrics_.delivered;
    metrics_.delays.push_back((slot_ + 1) - packet.created_slot);
    metrics_.hops.push_back(static_cast<std::int64_t>(packet.path_trace.size()));
    for (NodeId v : packet.path_trace)
      delivery_credit_[static_cast<std::size_t>(v)] = 1;
    return out;
  }
  if (n.in_queue.contains(packet.id)) {
    out.action = ReceiveAction::kDropAck;
    out.ack = true;
    out.ack_values = n.table.make_ack(packet.destination, false);
    return out;
  }
  if (n.seen.contains(packet.id)) {
    out.action = cfg_.engine.ack_forwarded_duplicates ? ReceiveAction::kDropAck
                                                      : ReceiveAction::kDropSilent;
    out.ack = cfg_.engine.ack_forwarded_duplicates;
    if (out.ack) out.ack_values = n.table.make_ack(packet.destination, false);
    return out;
  }
  if (static_cast<int>(packet.path_trace.size()) > ttl_) {
    ++metrics_.ttl_drops;
    out.action = ReceiveAction::kDropSilent;
    return out;
  }
  QueuedPacket qp{packet, to_int(mode)};
  qp.packet.path_trace.push_back(node);
  enqueue(node, std::move(qp));
  out.action = ReceiveAction::kEnqueue;
  out.ack = true;
  out.ack_values = n.table.make_ack(packet.destination, false);
  return out;
}

void Engine::pay(NodeId node, double amount, SlotReport& report) {
  auto& n = mutable_node(node);
  n.total_reward += amount;
  auto it = std::find_if(report.rewards.begin(), report.rewards.end(),
                         [&](const auto& e) { return e.first == node; });
  if (it == report.rewards.end()) {
    report.rewards.emplace_back(node, amount);
  } else {
    it->second += amount;
  }
  if (buffered_[static_cast<std::size_t>(node)])
    buffered_[static_cast<std::size_t>(node)]->reward += amount;
}

void Engine::emit_transition(NodeId node) {
  auto& slot = buffered_[static_cast<std::size_t>(node)];
  if (slot && transition_sink_) transition_sink_(*slot);
  slot.reset();
}

SlotReport Engine::commit_slot(std::span<const TxMode> actions) {
  if (!prepared_) throw std::logic_error("commit_slot: call prepare_slot first");
  if (actions.size() != requests_.size())
    throw std::invalid_argument("commit_slot: one action per request required");
  const SlotIndex t = slot_ + 1;
  const auto n_nodes = static_cast<std::size_t>(cfg_.node_count);
  SlotReport report;
  report.slot = t;
  std::vector<RewardEvents> events(n_nodes);
  std::vector<double> action_reward(n_nodes, 0.0);
  std::fill(delivery_credit_.begin(), delivery_credit_.end(), 0);

  std::vector<NodeKinematics> positions;
  positions.reserve(n_nodes);
  for (const auto& n : nodes_) positions.push_back(n.kinematics);

  for (std::size_t i = 0; i < requests_.size(); ++i) {
    const auto& req = requests_[i];
    const Packet& packet = in_flight_[i].packet;
    const NodeId d = req.destination;
    TxMode mode = actions[i];
    if (mode == TxMode::kUnicast && req.next_hop == kNoNode) mode = TxMode::kBroadcast;

    ++metrics_.transmissions;
    if (mode == TxMode::kBroadcast) {
      ++metrics_.broadcasts;
    } else {
      ++metrics_.unicasts;
    }
    const auto outcome =
        transmit(req.node, mode, req.next_hop, positions, cfg_.channel, channel_rng_);

    std::vector<std::pair<NodeId, AckValues>> acks;
    for (NodeId r : outcome.receivers) {
      const auto res = on_receive(r, packet, req.node, mode);
      const bool ack_crossed =
          std::binary_search(outcome.acks.begin(), outcome.acks.end(), r);
      if (res.ack && ack_crossed) acks.emplace_back(r, res.ack_values);
    }

    auto& table = mutable_node(req.node).table;
    if (!acks.empty()) {
      for (const auto& [r, ack] : acks) table.update_on_ack(r, d, ack);
    } else if (mode == TxMode::kUnicast) {
      table.update_on_failure(req.next_hop, d);
    } else {
      for (NodeId j : table.known_next_hops(d)) table.update_on_failure(j, d);
    }
    metrics_.acks_returned += static_cast<std::int64_t>(acks.size());
    release_copy(packet.id);

    auto& sender = mutable_node(req.node);
    sender.last_action[static_cast<std::size_t>(d)] = to_int(mode);
    auto& ev = events[static_cast<std::size_t>(req.node)];
    ev.transmitted = true;
    ev.acks_received += static_cast<int>(acks.size());
    action_reward[static_cast<std::size_t>(req.node)] +=
        compute_reward1(mode, req.c_best, cfg_.policy.epsilon);
    report.decisions.push_back(
        {req.node, actions[i], mode, req.c_best, static_cast<int>(acks.size())});
  }

  for (std::size_t v = 0; v < n_nodes; ++v) {
    events[v].delivery_credit = delivery_credit_[v] != 0;
    auto& n = nodes_[v];
    if (cfg_.reward.kind == RewardKind::kReward1) {
      n.pending_reward += action_reward[v];
    } else {
      n.pending_reward += compute_reward2(events[v], cfg_.reward, cfg_.node_count);
    }
  }

  for (std::size_t i = 0; i < requests_.size(); ++i) {
    const NodeId id = requests_[i].node;
    emit_transition(id);
    buffered_[static_cast<std::size_t>(id)] =
        Transition{t, id, requests_[i].features, to_int(report.decisions[i].effective),
                   0.0, false};
  }
  std::vector<NodeId> acting;
  for (const auto& d : report.decisions) acting.push_back(d.node);
  std::sort(acting.begin(), acting.end());
  for (NodeId id : acting) {
    auto& n = mutable_node(id);
    const double amount = n.pending_reward;
    n.pending_reward = 0.0;
    pay(id, amount, report);
  }

  slot_ = t;
  metrics_.slots = t;
  prepared_ = false;
  requests_.clear();
  in_flight_.clear();

  const bool queues_empty = std::all_of(nodes_.begin(), nodes_.end(),
                                        [](const NodeState& n) { return n.queue.empty(); });
  if ((t >= cfg_.traffic_slots && queues_empty) ||
      t >= static_cast<SlotIndex>(cfg_.traffic_slots) + cfg_.effective_drain_cap()) {
    finish_episode(report);
  }
  std::sort(report.rewards.begin(), report.rewards.end());
  return report;
}

void Engine::finish_episode(SlotReport& report) {
  finished_ = true;
  report.done = true;
  metrics_.residual = 0;
  for (const auto& [id, copies] : live_copies_) {
    if (copies > 0 && !delivered_ids_.contains(id)) ++metrics_.residual;
  }
  for (auto& n : nodes_) {
    if (n.pending_reward != 0.0) {
      const double amount = n.pending_reward;
      n.pending_reward = 0.0;
      pay(n.id, amount, report);
    }
  }
  for (NodeId id = 0; id < cfg_.node_count; ++id) {
    auto& b = buffered_[static_cast<std::size_t>(id)];
    if (b) b->done = true;
    emit_transition(id);
  }
}

const EpisodeMetrics& Engine::run() {
  while (!finished_) {
    const auto& requests = prepare_slot();
    const auto actions = decide(requests);
    commit_slot(actions);
  }
  return metrics_;
}

EpisodeMetrics run_episode(const SimConfig& cfg) {
  Engine engine(cfg);
  return engine.run();
}

}  // namespace cqroute
