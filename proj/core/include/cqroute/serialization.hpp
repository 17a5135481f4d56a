#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "cqroute/config.hpp"

namespace cqroute {

/// Parses a configuration document. Every key is optional and falls back to
/// the SimConfig defaults; unknown keys and wrongly typed values raise
/// ConfigError. A string "policy.weights" is resolved against `base_dir` and
/// loaded; an object is taken as inline weights.
SimConfig config_from_json(const nlohmann::json& doc,
                           const std::filesystem::path& base_dir = {});

nlohmann::json config_to_json(const SimConfig& cfg);

SimConfig load_config_file(const std::filesystem::path& path);

}  // namespace cqroute

namespace cqroute {

struct EpisodeMetrics;

/// Counters and summary statistics; `with_samples` adds the per-packet delay
/// and hop arrays.
nlohmann::json metrics_to_json(const EpisodeMetrics& m, int node_count,
                               bool with_samples);
EpisodeMetrics metrics_from_json(const nlohmann::json& doc);

}  // namespace cqroute
