#include "cqroute/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace cqroute {

std::vector<double> Observation::flatten() const {
  std::vector<double> v;
  v.reserve(width());
  v.insert(v.end(), c_top.begin(), c_top.end());
  v.insert(v.end(), h_top.begin(), h_top.end());
  v.insert(v.end(), dc_top.begin(), dc_top.end());
  v.insert(v.end(), dh_top.begin(), dh_top.end());
  v.push_back(prev_action);
  v.push_back(arrival_mode);
  return v;
}

Observation build_observation_from_rows(CqTable& table, NodeId dest,
                                        std::span<const RouteEntry> rows,
                                        double h_cap, int prev_action,
                                        int arrival_mode) {
  Observation obs;
  obs.prev_action = prev_action;
  obs.arrival_mode = arrival_mode;
  for (const auto& r : rows) {
    obs.c_top.push_back(r.c);
    obs.h_top.push_back(std::clamp(r.h, 1.0, h_cap) / h_cap);
  }
  const auto& prev = table.snapshot(dest);
  if (prev && prev->c.size() == rows.size()) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      obs.dc_top.push_back(obs.c_top[i] - prev->c[i]);
      obs.dh_top.push_back(obs.h_top[i] - prev->h[i]);
    }
  } else {
    obs.dc_top.assign(rows.size(), 0.0);
    obs.dh_top.assign(rows.size(), 0.0);
  }
  table.set_snapshot(dest, TopKSnapshot{obs.c_top, obs.h_top});
  return obs;
}

Observation build_observation(CqTable& table, NodeId dest, int k, double h_cap,
                              int prev_action, int arrival_mode) {
  const auto rows = table.top_k(dest, k);
  return build_observation_from_rows(table, dest, rows, h_cap, prev_action,
                                     arrival_mode);
}

void validate_weights(const PolicyWeights& w) {
  using K = WeightsError::Kind;
  if (w.k_neighbors < 1) throw WeightsError(K::kSchema, "k_neighbors must be >= 1");
  if (w.layer_sizes.size() < 2)
    throw WeightsError(K::kDimension, "layer_sizes needs at least two entries");
  if (w.layers.size() + 1 != w.layer_sizes.size())
    throw WeightsError(K::kDimension, "layer count does not match layer_sizes");
  if (w.layer_sizes.front() != static_cast<int>(Observation::width_for(w.k_neighbors)))
    throw WeightsError(K::kDimension, "input width must equal 4*k_neighbors+2");
  if (w.layer_sizes.back() != 2)
    throw WeightsError(K::kDimension, "output layer must have 2 units");
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    const auto& layer = w.layers[l];
    const std::string where = "layer " + std::to_string(l) + ": ";
    if (layer.inputs != w.layer_sizes[l] || layer.outputs != w.layer_sizes[l + 1])
      throw WeightsError(K::kDimension, where + "shape breaks the dimension chain");
    if (layer.weights.size() !=
        static_cast<std::size_t>(layer.inputs) * layer.outputs)
      throw WeightsError(K::kDimension, where + "weight matrix size mismatch");
    if (layer.bias.size() != static_cast<std::size_t>(layer.outputs))
      throw WeightsError(K::kDimension, where + "bias length mismatch");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
        !std::all_of(layer.bias.begin(), layer.bias.end(), finite))
      throw WeightsError(K::kNonFinite, where + "non-finite parameter");
  }
}

namespace {

Activation parse_activation(const nlohmann::json& j) {
  const auto s = j.get<std::string>();
  if (s == "tanh") return Activation::kTanh;
  if (s == "linear") return Activation::kLinear;
  throw WeightsError(WeightsError::Kind::kSchema, "unknown activation '" + s + "'");
}

double parse_real(const nlohmann::json& v) {
  // NaN/Inf cannot be spelled in strict JSON; accept the common string and
  // null encodings so they are reported as non-finite rather than malformed.
  if (v.is_number()) return v.get<double>();
  if (v.is_null()) return std::nan("");
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "NaN" || s == "nan") return std::nan("");
    if (s == "Infinity" || s == "inf") return INFINITY;
    if (s == "-Infinity" || s == "-inf") return -INFINITY;
  }
  throw WeightsError(WeightsError::Kind::kSchema, "expected a real number");
}

}  // namespace

PolicyWeights load_weights(const nlohmann::json& doc) {
  using K = WeightsError::Kind;
  PolicyWeights w;
  try {
    if (!doc.is_object()) throw WeightsError(K::kSchema, "weights document must be an object");
    for (const char* key : {"k_neighbors", "layer_sizes", "layers"}) {
      if (!doc.contains(key))
        throw WeightsError(K::kSchema, std::string("missing key '") + key + "'");
    }
    if (doc.contains("output") && doc.at("output") != "softmax-2")
      throw WeightsError(K::kSchema, "output must be \"softmax-2\"");
    w.k_neighbors = doc.at("k_neighbors").get<int>();
    w.layer_sizes = doc.at("layer_sizes").get<std::vector<int>>();
    const auto& layers = doc.at("layers");
    if (!layers.is_array()) throw WeightsError(K::kSchema, "layers must be an array");
    for (const auto& lj : layers) {
      DenseLayer layer;
      const auto& rows = lj.at("w");
      if (!rows.is_array()) throw WeightsError(K::kSchema, "w must be an array of rows");
      layer.outputs = static_cast<int>(rows.size());
      layer.inputs = rows.empty() ? 0 : static_cast<int>(rows.front().size());
      for (const auto& row : rows) {
        if (!row.is_array()) throw WeightsError(K::kSchema, "w rows must be arrays");
        if (static_cast<int>(row.size()) != layer.inputs)
          throw WeightsError(K::kDimension, "ragged weight matrix");
        for (const auto& v : row) layer.weights.push_back(parse_real(v));
      }
      for (const auto& v : lj.at("b")) layer.bias.push_back(parse_real(v));
      layer.activation = lj.contains("activation")
                             ? parse_activation(lj.at("activation"))
                             : Activation::kTanh;
      w.layers.push_back(std::move(layer));
    }
  } catch (const nlohmann::json::exception& e) {
    throw WeightsError(K::kSchema, std::string("malformed weights: ") + e.what());
  }
  validate_weights(w);
  return w;
}

PolicyWeights load_weights_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw WeightsError(WeightsError::Kind::kNotFound,
                       "weights not found: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw WeightsError(WeightsError::Kind::kSchema,
                       "weights file is not valid JSON: " + std::string(e.what()));
  }
  return load_weights(doc);
}

nlohmann::json weights_to_json(const PolicyWeights& w) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : w.layers) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < layer.outputs; ++r) {
      const auto first = layer.weights.begin() + static_cast<std::ptrdiff_t>(r) * layer.inputs;
      rows.push_back(std::vector<double>(first, first + layer.inputs));
    }
    layers.push_back({{"w", rows},
                      {"b", layer.bias},
                      {"activation",
                       layer.activation == Activation::kTanh ? "tanh" : "linear"}});
  }
  return {{"k_neighbors", w.k_neighbors},
          {"layer_sizes", w.layer_sizes},
          {"layers", layers},
          {"output", "softmax-2"}};
}

ActionProbs forward(const PolicyWeights& w, std::span<const double> input) {
  if (w.layers.empty() || input.size() != static_cast<std::size_t>(w.layers.front().inputs))
    throw WeightsError(WeightsError::Kind::kDimension,
                       "observation width does not match the input layer");
  std::vector<double> x(input.begin(), input.end());
  std::vector<double> y;
  for (const auto& layer : w.layers) {
    y.assign(static_cast<std::size_t>(layer.outputs), 0.0);
    for (int r = 0; r < layer.outputs; ++r) {
      double acc = layer.bias[static_cast<std::size_t>(r)];
      const double* row = layer.weights.data() + static_cast<std::size_t>(r) * layer.inputs;
      for (int c = 0; c < layer.inputs; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
      y[static_cast<std::size_t>(r)] =
          layer.activation == Activation::kTanh ? std::tanh(acc) : acc;
    }
    x.swap(y);
  }
  // Two-way softmax written as a logistic of the logit gap.
  const double gap = x[1] - x[0];
  ActionProbs p;
  if (gap >= 0.0) {
    const double e = std::exp(-gap);
    p.broadcast = 1.0 / (1.0 + e);
    p.unicast = e / (1.0 + e);
  } else {
    const double e = std::exp(gap);
    p.unicast = 1.0 / (1.0 + e);
    p.broadcast = e / (1.0 + e);
  }
  return p;
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kCqPlus: return "cq+";
    case PolicyKind::kCqPlusHard: return "hard-cq+";
    case PolicyKind::kNeural: return "neural";
    case PolicyKind::kExternal: return "external";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "cq+" || name == "cq_plus") return PolicyKind::kCqPlus;
  if (name == "hard-cq+" || name == "cq_plus_hard") return PolicyKind::kCqPlusHard;
  if (name == "neural") return PolicyKind::kNeural;
  if (name == "external") return PolicyKind::kExternal;
  throw ConfigError("unknown policy '" + name + "'");
}

double cq_plus_broadcast_probability(double c_best, double epsilon) {
  return 1.0 - c_best * (1.0 - epsilon);
}

TxMode decide_cq_plus(double c_best, double epsilon, Rng& rng) {
  return rng.uniform() < cq_plus_broadcast_probability(c_best, epsilon)
             ? TxMode::kBroadcast
             : TxMode::kUnicast;
}

TxMode decide_cq_plus_hard(double c_best, double epsilon) {
  return c_best * (1.0 - epsilon) < 0.5 ? TxMode::kBroadcast : TxMode::kUnicast;
}

TxMode decide_neural(const PolicySpec& spec, std::span<const double> input,
                     Rng& rng) {
  if (!spec.weights)
    throw WeightsError(WeightsError::Kind::kSchema, "neural policy has no weights");
  const auto p = forward(*spec.weights, input);
  return rng.uniform() < p.broadcast ? TxMode::kBroadcast : TxMode::kUnicast;
}

}  // namespace cqroute
