// cqsim: batch runner, sweep driver and environment server for the CQ+
// routing simulator.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cqroute/config.hpp"
#include "cqroute/env_session.hpp"
#include "cqroute/experiment.hpp"
#include "cqroute/policy.hpp"
#include "cqroute/serialization.hpp"

namespace {

using namespace cqroute;

constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonArgs {
  std::string config;
  std::vector<std::string> policies;
  std::string weights;
  int episodes = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> nodes;
  std::optional<int> flows;
  std::string log_transitions;
  int jobs = 1;
};

struct SweepArgs {
  std::optional<std::string> nodes;
  std::optional<std::string> flows;
  std::optional<std::string> dynamic;
};

template <typename T>
std::vector<T> parse_list(const std::string& flag, const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw UsageError(flag + ": bad list item '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(flag + ": empty axis");
  return out;
}

SimConfig load_base(const CommonArgs& a) {
  SimConfig cfg = a.config.empty() ? benchmark_config() : load_config_file(a.config);
  if (a.seed) cfg.seed = *a.seed;
  const int flows = a.flows.value_or(static_cast<int>(cfg.flows.size()));
  const int nodes = a.nodes.value_or(cfg.node_count);
  if (nodes != cfg.node_count || flows != static_cast<int>(cfg.flows.size())) {
    const double rate = cfg.flows.empty() ? 1.0 : cfg.flows.front().packets_per_slot;
    cfg.node_count = nodes;
    cfg.flows = make_flows(nodes, flows, rate);
  }
  return cfg;
}

// Resolves --policy/--weights into cells; without --policy the config's
// policy is used as is.
std::vector<CellSpec> policy_cells(const CommonArgs& a, const SimConfig& cfg) {
  std::vector<CellSpec> cells;
  std::shared_ptr<const PolicyWeights> weights = cfg.policy.weights;
  if (!a.weights.empty())
    weights = std::make_shared<const PolicyWeights>(load_weights_file(a.weights));
  if (a.policies.empty()) {
    CellSpec c;
    c.policy = cfg.policy;
    if (!a.weights.empty()) c.policy.weights = weights;
    c.policy_name = to_string(c.policy.kind);
    cells.push_back(c);
  } else {
    for (const auto& name : a.policies) {
      CellSpec c;
      c.policy = cfg.policy;
      c.policy.kind = policy_kind_from_string(name);
      if (c.policy.kind == PolicyKind::kExternal)
        throw UsageError("policy 'external' is only available through serve");
      c.policy.weights = weights;
      c.policy_name = to_string(c.policy.kind);
      cells.push_back(c);
    }
  }
  for (const auto& c : cells) {
    if (c.policy.kind == PolicyKind::kNeural && !c.policy.weights)
      throw UsageError("neural policy needs --weights or policy.weights in the config");
  }
  return cells;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

RunOptions run_options(const CommonArgs& a, const SimConfig& cfg, std::ofstream& log) {
  if (a.episodes < 1) throw UsageError("--episodes must be >= 1");
  RunOptions opts;
  opts.episodes = a.episodes;
  opts.base_seed = cfg.seed;
  opts.jobs = a.jobs;
  if (!a.log_transitions.empty()) {
    log.open(a.log_transitions);
    if (!log) throw std::runtime_error("cannot open transition log: " + a.log_transitions);
    opts.transitions = &log;
  }
  return opts;
}

int cmd_run(const CommonArgs& a) {
  const SimConfig cfg = load_base(a);
  auto cells = policy_cells(a, cfg);
  if (cells.size() != 1) throw UsageError("run takes a single --policy");
  CellSpec cell = cells.front();
  cell.nodes = cfg.node_count;
  cell.flows = static_cast<int>(cfg.flows.size());
  std::ofstream log;
  const auto opts = run_options(a, cfg, log);
  const auto result = run_cell(cfg, cell, opts);
  Output out(a.out);
  write_csv_header(out.stream());
  for (const auto& ep : result.episodes) write_episode_row(out.stream(), cell, ep);
  write_aggregate_row(out.stream(), result);
  return 0;
}

int cmd_sweep(const CommonArgs& a, const SweepArgs& s) {
  if (!s.nodes && !s.flows && !s.dynamic)
    throw UsageError("sweep needs at least one of --sweep-nodes, --sweep-flows, --sweep-dynamic");
  SweepAxes axes;
  if (s.nodes) axes.nodes = parse_list<int>("--sweep-nodes", *s.nodes);
  if (s.flows) axes.flows = parse_list<int>("--sweep-flows", *s.flows);
  if (s.dynamic) axes.dynamic_scales = parse_list<double>("--sweep-dynamic", *s.dynamic);
  const SimConfig cfg = load_base(a);
  const auto policies = policy_cells(a, cfg);
  std::ofstream log;
  const auto opts = run_options(a, cfg, log);
  const auto results = run_sweep(cfg, axes, policies, opts);
  Output out(a.out);
  write_csv_header(out.stream());
  for (const auto& r : results) write_aggregate_row(out.stream(), r);
  return 0;
}

int cmd_serve(const std::string& config, const std::string& socket, int max_connections) {
  nlohmann::json base = nlohmann::json::object();
  std::filesystem::path base_dir;
  if (!config.empty()) {
    std::ifstream in(config);
    if (!in) throw ConfigError("cannot open config: " + config);
    base = nlohmann::json::parse(in);
    base_dir = std::filesystem::path(config).parent_path();
    config_from_json(base, base_dir);  // fail fast on a bad base config
  }
  if (socket.empty()) {
    serve_stream(std::cin, std::cout, base, base_dir);
  } else {
    serve_unix_socket(socket, base, base_dir, max_connections);
  }
  return 0;
}

int cmd_validate(const CommonArgs& a) {
  const SimConfig cfg = load_base(a);
  const auto violations = validate_config(cfg);
  for (const auto& v : violations) std::cerr << "violation: " << v << '\n';
  if (!a.weights.empty()) {
    const auto w = load_weights_file(a.weights);
    validate_weights(w);
  }
  if (!violations.empty()) return 1;
  std::cout << config_to_json(cfg).dump(2) << '\n';
  return 0;
}

void add_common(CLI::App* app, CommonArgs& a, bool multi_policy) {
  app->add_option("--config", a.config, "Simulation config (JSON)")->check(CLI::ExistingFile);
  auto* pol = app->add_option("--policy", a.policies,
                              multi_policy ? "Policies: cq+, hard-cq+, neural (comma list)"
                                           : "Policy: cq+, hard-cq+ or neural");
  pol->delimiter(',');
  if (!multi_policy) pol->expected(1);
  app->add_option("--weights", a.weights, "Policy weight file (JSON)");
  app->add_option("--episodes", a.episodes, "Episodes per cell");
  app->add_option("--seed", a.seed, "Base seed");
  app->add_option("--out", a.out, "CSV output path (default stdout)");
  app->add_option("--nodes", a.nodes, "Override network size");
  app->add_option("--flows", a.flows, "Override number of flows");
  app->add_option("--log-transitions", a.log_transitions, "JSON-lines transition log");
  app->add_option("--jobs", a.jobs, "Parallel episode workers")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CQ+ MANET routing simulator"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, validate_args;
  SweepArgs axes;
  auto* run = app.add_subcommand("run", "Run episodes and write per-episode + aggregate CSV");
  add_common(run, run_args, false);

  auto* sweep = app.add_subcommand("sweep", "Cross-product sweep, one aggregate row per cell");
  add_common(sweep, sweep_args, true);
  sweep->add_option("--sweep-nodes", axes.nodes, "Network sizes, e.g. 10,15,20");
  sweep->add_option("--sweep-flows", axes.flows, "Flow counts, e.g. 1,2,3,4");
  sweep->add_option("--sweep-dynamic", axes.dynamic, "Dynamic level scales, e.g. 1,2,5");

  std::string serve_config, serve_socket;
  int max_connections = 0;
  auto* serve = app.add_subcommand("serve", "Environment server (JSON lines on stdio or a socket)");
  serve->add_option("--config", serve_config, "Base config for reset")->check(CLI::ExistingFile);
  serve->add_option("--socket", serve_socket, "Unix-domain socket path");
  serve->add_option("--max-connections", max_connections, "Exit after this many sessions");

  auto* validate = app.add_subcommand("validate", "Check a config (and weights) and print it resolved");
  add_common(validate, validate_args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args, axes);
    if (serve->parsed()) return cmd_serve(serve_config, serve_socket, max_connections);
    if (validate->parsed()) return cmd_validate(validate_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
