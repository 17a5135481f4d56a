#include "cqroute/serialization.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

namespace cqroute {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

MobilityModel parse_model(const std::string& s) {
  if (s == "gauss_markov") return MobilityModel::kGaussMarkov;
  if (s == "random_waypoint") return MobilityModel::kRandomWaypoint;
  if (s == "static") return MobilityModel::kStatic;
  throw ConfigError("unknown mobility model '" + s + "'");
}

std::string model_name(MobilityModel m) {
  switch (m) {
    case MobilityModel::kGaussMarkov: return "gauss_markov";
    case MobilityModel::kRandomWaypoint: return "random_waypoint";
    case MobilityModel::kStatic: return "static";
  }
  return "static";
}

RegionLayout parse_layout(const std::string& s) {
  if (s == "benchmark_5") return RegionLayout::kBenchmark5;
  if (s == "uniform") return RegionLayout::kUniform;
  throw ConfigError("unknown region layout '" + s + "'");
}

void parse_mobility(const json& j, MobilityConfig& m) {
  reject_unknown(j, "mobility",
                 {"model", "mu", "mean_speed_mps", "speed_sigma", "angle_sigma",
                  "region_layout", "region_overlap_frac", "update_seconds"});
  std::string model = model_name(m.model);
  read(j, "model", model);
  m.model = parse_model(model);
  read(j, "mu", m.mu);
  read(j, "mean_speed_mps", m.mean_speed_mps);
  read(j, "speed_sigma", m.speed_sigma);
  read(j, "angle_sigma", m.angle_sigma);
  std::string layout =
      m.region_layout == RegionLayout::kBenchmark5 ? "benchmark_5" : "uniform";
  read(j, "region_layout", layout);
  m.region_layout = parse_layout(layout);
  read(j, "region_overlap_frac", m.region_overlap_frac);
  read(j, "update_seconds", m.update_seconds);
}

void parse_policy(const json& j, PolicySpec& p,
                  const std::filesystem::path& base_dir) {
  reject_unknown(j, "policy", {"kind", "epsilon", "weights", "prev_action_feature"});
  std::string kind = to_string(p.kind);
  read(j, "kind", kind);
  p.kind = policy_kind_from_string(kind);
  read(j, "epsilon", p.epsilon);
  std::string feature =
      p.prev_action_feature == PrevActionFeature::kSelf ? "self" : "upstream";
  read(j, "prev_action_feature", feature);
  if (feature == "self") {
    p.prev_action_feature = PrevActionFeature::kSelf;
  } else if (feature == "upstream") {
    p.prev_action_feature = PrevActionFeature::kUpstream;
  } else {
    throw ConfigError("prev_action_feature must be \"self\" or \"upstream\"");
  }
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    if (w.is_string()) {
      std::filesystem::path path = w.get<std::string>();
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      p.weights = std::make_shared<const PolicyWeights>(load_weights_file(path));
      p.weights_path = path.string();
    } else if (w.is_object()) {
      p.weights = std::make_shared<const PolicyWeights>(load_weights(w));
      p.weights_path.clear();
    } else if (w.is_null()) {
      p.weights.reset();
      p.weights_path.clear();
    } else {
      throw ConfigError("policy.weights must be a path or an object");
    }
  }
}

}  // namespace

SimConfig config_from_json(const json& doc,
                           const std::filesystem::path& base_dir) {
  SimConfig cfg;
  reject_unknown(doc, "config",
                 {"node_count", "area_width_m", "area_height_m", "radio_range_m",
                  "slot_seconds", "traffic_slots", "drain_slot_cap", "flows",
                  "mobility", "channel", "cq", "policy", "reward", "engine",
                  "seed", "k_neighbors", "h_cap", "initial_positions"});
  read(doc, "node_count", cfg.node_count);
  read(doc, "area_width_m", cfg.area.width);
  read(doc, "area_height_m", cfg.area.height);
  read(doc, "radio_range_m", cfg.channel.range_m);
  read(doc, "slot_seconds", cfg.slot_seconds);
  read(doc, "traffic_slots", cfg.traffic_slots);
  if (doc.contains("drain_slot_cap") && !doc.at("drain_slot_cap").is_null()) {
    int cap = 0;
    read(doc, "drain_slot_cap", cap);
    cfg.drain_slot_cap = cap;
  }
  read(doc, "seed", cfg.seed);
  read(doc, "k_neighbors", cfg.k_neighbors);
  read(doc, "h_cap", cfg.h_cap);
  if (doc.contains("initial_positions")) {
    try {
      cfg.initial_positions =
          doc.at("initial_positions").get<std::vector<std::pair<double, double>>>();
    } catch (const json::exception&) {
      throw ConfigError("initial_positions must be a list of [x, y] pairs");
    }
  }
  if (doc.contains("flows")) {
    const auto& flows = doc.at("flows");
    if (!flows.is_array()) throw ConfigError("flows must be an array");
    cfg.flows.clear();
    for (const auto& f : flows) {
      reject_unknown(f, "flow", {"source", "destination", "packets_per_slot"});
      FlowSpec spec;
      read(f, "source", spec.source);
      read(f, "destination", spec.destination);
      read(f, "packets_per_slot", spec.packets_per_slot);
      cfg.flows.push_back(spec);
    }
  }
  if (doc.contains("mobility")) parse_mobility(doc.at("mobility"), cfg.mobility);
  if (doc.contains("channel")) {
    const auto& c = doc.at("channel");
    reject_unknown(c, "channel", {"range_m", "falloff_m", "ack_lossless"});
    read(c, "range_m", cfg.channel.range_m);
    read(c, "falloff_m", cfg.channel.falloff_m);
    read(c, "ack_lossless", cfg.channel.ack_lossless);
  }
  if (doc.contains("cq")) {
    const auto& c = doc.at("cq");
    reject_unknown(c, "cq", {"lambda", "c_init"});
    read(c, "lambda", cfg.cq.lambda);
    read(c, "c_init", cfg.cq.c_init);
  }
  if (doc.contains("policy")) parse_policy(doc.at("policy"), cfg.policy, base_dir);
  if (doc.contains("reward")) {
    const auto& r = doc.at("reward");
    reject_unknown(r, "reward", {"kind", "gamma", "w1", "w2", "w3"});
    std::string kind = cfg.reward.kind == RewardKind::kReward1 ? "reward1" : "reward2";
    read(r, "kind", kind);
    if (kind == "reward1") {
      cfg.reward.kind = RewardKind::kReward1;
    } else if (kind == "reward2") {
      cfg.reward.kind = RewardKind::kReward2;
    } else {
      throw ConfigError("reward.kind must be reward1 or reward2");
    }
    read(r, "gamma", cfg.reward.gamma);
    read(r, "w1", cfg.reward.w1);
    read(r, "w2", cfg.reward.w2);
    read(r, "w3", cfg.reward.w3);
  }
  if (doc.contains("engine")) {
    const auto& e = doc.at("engine");
    reject_unknown(e, "engine",
                   {"shuffle_node_order", "ack_forwarded_duplicates", "ttl_factor"});
    read(e, "shuffle_node_order", cfg.engine.shuffle_node_order);
    read(e, "ack_forwarded_duplicates", cfg.engine.ack_forwarded_duplicates);
    read(e, "ttl_factor", cfg.engine.ttl_factor);
  }
  return cfg;
}

json config_to_json(const SimConfig& cfg) {
  json flows = json::array();
  for (const auto& f : cfg.flows)
    flows.push_back({{"source", f.source},
                     {"destination", f.destination},
                     {"packets_per_slot", f.packets_per_slot}});
  json policy = {{"kind", to_string(cfg.policy.kind)},
                 {"epsilon", cfg.policy.epsilon},
                 {"prev_action_feature",
                  cfg.policy.prev_action_feature == PrevActionFeature::kSelf
                      ? "self"
                      : "upstream"}};
  if (!cfg.policy.weights_path.empty()) {
    policy["weights"] = cfg.policy.weights_path;
  } else if (cfg.policy.weights) {
    policy["weights"] = weights_to_json(*cfg.policy.weights);
  }
  const auto& m = cfg.mobility;
  json doc = {
      {"node_count", cfg.node_count},
      {"area_width_m", cfg.area.width},
      {"area_height_m", cfg.area.height},
      {"radio_range_m", cfg.channel.range_m},
      {"slot_seconds", cfg.slot_seconds},
      {"traffic_slots", cfg.traffic_slots},
      {"seed", cfg.seed},
      {"k_neighbors", cfg.k_neighbors},
      {"h_cap", cfg.h_cap},
      {"flows", flows},
      {"initial_positions", cfg.initial_positions},
      {"mobility",
       {{"model", model_name(m.model)},
        {"mu", m.mu},
        {"mean_speed_mps", m.mean_speed_mps},
        {"speed_sigma", m.speed_sigma},
        {"angle_sigma", m.angle_sigma},
        {"region_layout",
         m.region_layout == RegionLayout::kBenchmark5 ? "benchmark_5" : "uniform"},
        {"region_overlap_frac", m.region_overlap_frac},
        {"update_seconds", m.update_seconds}}},
      {"channel",
       {{"falloff_m", cfg.channel.falloff_m},
        {"ack_lossless", cfg.channel.ack_lossless}}},
      {"cq", {{"lambda", cfg.cq.lambda}, {"c_init", cfg.cq.c_init}}},
      {"policy", policy},
      {"reward",
       {{"kind", cfg.reward.kind == RewardKind::kReward1 ? "reward1" : "reward2"},
        {"gamma", cfg.reward.gamma},
        {"w1", cfg.reward.w1},
        {"w2", cfg.reward.w2},
        {"w3", cfg.reward.w3}}},
      {"engine",
       {{"shuffle_node_order", cfg.engine.shuffle_node_order},
        {"ack_forwarded_duplicates", cfg.engine.ack_forwarded_duplicates},
        {"ttl_factor", cfg.engine.ttl_factor}}}};
  if (cfg.drain_slot_cap) doc["drain_slot_cap"] = *cfg.drain_slot_cap;
  return doc;
}

SimConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(doc, path.parent_path());
}

}  // namespace cqroute

#include "cqroute/metrics.hpp"

namespace cqroute {

nlohmann::json metrics_to_json(const EpisodeMetrics& m, int node_count,
                               bool with_samples) {
  const auto s = summarize(m, node_count);
  nlohmann::json j = {
      {"generated", m.generated},
      {"delivered", m.delivered},
      {"duplicates_at_destination", m.duplicates_at_destination},
      {"dropped", m.dropped},
      {"residual", m.residual},
      {"transmissions", m.transmissions},
      {"broadcasts", m.broadcasts},
      {"unicasts", m.unicasts},
      {"acks_returned", m.acks_returned},
      {"loop_drops", m.loop_drops},
      {"ttl_drops", m.ttl_drops},
      {"slots", m.slots},
      {"goodput", s.goodput},
      {"normalized_overhead",
       s.normalized_overhead ? nlohmann::json(*s.normalized_overhead) : nlohmann::json()},
      {"broadcast_rate", s.broadcast_rate},
      {"mean_delay_slots", s.mean_delay_slots},
      {"mean_hops", s.mean_hops}};
  if (with_samples) {
    j["delays"] = m.delays;
    j["hops"] = m.hops;
  }
  return j;
}

EpisodeMetrics metrics_from_json(const nlohmann::json& j) {
  EpisodeMetrics m;
  m.generated = j.at("generated").get<std::int64_t>();
  m.delivered = j.at("delivered").get<std::int64_t>();
  m.duplicates_at_destination = j.at("duplicates_at_destination").get<std::int64_t>();
  m.dropped = j.at("dropped").get<std::int64_t>();
  m.residual = j.at("residual").get<std::int64_t>();
  m.transmissions = j.at("transmissions").get<std::int64_t>();
  m.broadcasts = j.at("broadcasts").get<std::int64_t>();
  m.unicasts = j.at("unicasts").get<std::int64_t>();
  m.acks_returned = j.at("acks_returned").get<std::int64_t>();
  m.loop_drops = j.at("loop_drops").get<std::int64_t>();
  m.ttl_drops = j.at("ttl_drops").get<std::int64_t>();
  m.slots = j.at("slots").get<std::int64_t>();
  if (j.contains("delays")) m.delays = j.at("delays").get<std::vector<std::int64_t>>();
  if (j.contains("hops")) m.hops = j.at("hops").get<std::vector<std::int64_t>>();
  return m;
}

}  // namespace cqroute
