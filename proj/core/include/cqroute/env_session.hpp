#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cqroute/engine.hpp"

namespace cqroute {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One reset/step environment over an engine whose routing actions come from
/// outside. Agent keys are node ids rendered as decimal strings; one step
/// answers every decision pending in the current slot.
class EnvSession {
 public:
  explicit EnvSession(nlohmann::json base_config,
                      std::filesystem::path base_dir = {});

  /// Starts a new episode from the base config merge-patched with
  /// `overrides`. Returns {"obs", "slot", "done"}.
  nlohmann::json reset(const nlohmann::json& overrides);

  /// Applies one action per pending agent and runs until the next slot with
  /// decisions or the end of the episode. The reply's "effective" map holds
  /// the mode each agent actually transmitted with. Throws ProtocolError,
  /// leaving the session untouched, when the action map does not match the
  /// pending requests.
  nlohmann::json step(const nlohmann::json& actions);

  /// Dispatches one protocol message; errors become {"error", "message"}
  /// replies.
  nlohmann::json handle(const nlohmann::json& msg);

  bool closed() const { return closed_; }
  bool active() const { return engine_ != nullptr && !engine_->finished(); }
  const Engine* engine() const { return engine_.get(); }

 private:
  nlohmann::json observations() const;
  nlohmann::json info(bool final) const;
  void advance(std::vector<std::pair<NodeId, double>>& rewards);

  nlohmann::json base_config_;
  std::filesystem::path base_dir_;
  std::unique_ptr<Engine> engine_;
  std::vector<std::pair<NodeId, double>> carried_rewards_;
  bool closed_ = false;
};

/// Serves newline-delimited JSON on a pair of streams until "close" or EOF.
void serve_stream(std::istream& in, std::ostream& out,
                  const nlohmann::json& base_config,
                  const std::filesystem::path& base_dir = {});

/// Same protocol over a connected file descriptor (socket or pipe).
void serve_fd(int in_fd, int out_fd, const nlohmann::json& base_config,
              const std::filesystem::path& base_dir = {});

/// Listens on a Unix-domain stream socket; one session per connection, each
/// on its own thread. Returns after `max_connections` connections have been
/// served (0 = never).
void serve_unix_socket(const std::string& path,
                       const nlohmann::json& base_config,
                       const std::filesystem::path& base_dir = {},
                       int max_connections = 0);

}  // namespace cqroute
