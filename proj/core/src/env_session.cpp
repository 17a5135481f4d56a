#include "cqroute/env_session.hpp"

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <thread>

#include "cqroute/serialization.hpp"

namespace cqroute {

namespace {

using nlohmann::json;

void merge_rewards(std::vector<std::pair<NodeId, double>>& into,
                   const std::vector<std::pair<NodeId, double>>& from) {
  for (const auto& [node, r] : from) {
    auto it = std::find_if(into.begin(), into.end(),
                           [&](const auto& e) { return e.first == node; });
    if (it == into.end()) {
      into.emplace_back(node, r);
    } else {
      it->second += r;
    }
  }
}

json error_reply(const std::string& kind, const std::string& message) {
  return {{"error", kind}, {"message", message}};
}

}  // namespace

EnvSession::EnvSession(json base_config, std::filesystem::path base_dir)
    : base_config_(std::move(base_config)), base_dir_(std::move(base_dir)) {
  if (base_config_.is_null()) base_config_ = json::object();
}

void EnvSession::advance(std::vector<std::pair<NodeId, double>>& rewards) {
  while (!engine_->finished()) {
    if (!engine_->prepare_slot().empty()) return;
    merge_rewards(rewards, engine_->commit_slot({}).rewards);
  }
}

json EnvSession::observations() const {
  json obs = json::object();
  if (!engine_ || engine_->finished() || !engine_->slot_pending()) return obs;
  for (const auto& r : engine_->pending_requests())
    obs[std::to_string(r.node)] = r.features;
  return obs;
}

json EnvSession::info(bool final) const {
  return metrics_to_json(engine_->metrics(), engine_->node_count(), final);
}

json EnvSession::reset(const json& overrides) {
  json merged = base_config_;
  if (!overrides.is_null()) {
    if (!overrides.is_object()) throw ProtocolError("cfg must be an object");
    merged.merge_patch(overrides);
  }
  SimConfig cfg;
  try {
    cfg = config_from_json(merged, base_dir_);
  } catch (const std::exception& e) {
    throw ProtocolError(std::string("malformed overrides: ") + e.what());
  }
  cfg.policy.kind = PolicyKind::kExternal;
  try {
    engine_ = std::make_unique<Engine>(std::move(cfg));
  } catch (const ConfigError& e) {
    throw ProtocolError(e.what());
  }
  carried_rewards_.clear();
  advance(carried_rewards_);
  const bool done = engine_->finished();
  return {{"obs", observations()},
          {"slot", done ? engine_->slot() : engine_->slot() + 1},
          {"done", done}};
}

json EnvSession::step(const json& actions) {
  if (!engine_) throw ProtocolError("step before reset");
  if (engine_->finished()) throw ProtocolError("episode is done; reset first");
  if (!actions.is_object()) throw ProtocolError("actions must be an object");
  const auto& requests = engine_->prepare_slot();
  std::vector<TxMode> modes;
  modes.reserve(requests.size());
  for (const auto& r : requests) {
    const auto key = std::to_string(r.node);
    if (!actions.contains(key)) throw ProtocolError("missing action for agent " + key);
    const auto& a = actions.at(key);
    if (!a.is_number_integer() || (a.get<int>() != 0 && a.get<int>() != 1))
      throw ProtocolError("action for agent " + key + " must be 0 or 1");
    modes.push_back(a.get<int>() == 1 ? TxMode::kBroadcast : TxMode::kUnicast);
  }
  if (actions.size() != requests.size()) {
    for (const auto& [key, _] : actions.items()) {
      const bool requested = std::any_of(requests.begin(), requests.end(), [&](const auto& r) {
        return std::to_string(r.node) == key;
      });
      if (!requested) throw ProtocolError("unexpected action for agent " + key);
    }
  }

  auto rewards = std::move(carried_rewards_);
  carried_rewards_.clear();
  const auto report = engine_->commit_slot(modes);
  merge_rewards(rewards, report.rewards);
  json effective = json::object();
  for (const auto& d : report.decisions) effective[std::to_string(d.node)] = to_int(d.effective);
  advance(rewards);

  std::sort(rewards.begin(), rewards.end());
  json rj = json::object();
  for (const auto& [node, r] : rewards) rj[std::to_string(node)] = r;
  const bool done = engine_->finished();
  return {{"obs", observations()},
          {"rewards", rj},
          {"effective", effective},
          {"done", done},
          {"slot", done ? engine_->slot() : engine_->slot() + 1},
          {"info", info(done)}};
}

json EnvSession::handle(const json& msg) {
  try {
    if (!msg.is_object() || !msg.contains("cmd") || !msg.at("cmd").is_string())
      throw ProtocolError("message needs a string \"cmd\"");
    const auto cmd = msg.at("cmd").get<std::string>();
    if (cmd == "reset") return reset(msg.contains("cfg") ? msg.at("cfg") : json());
    if (cmd == "step") return step(msg.contains("actions") ? msg.at("actions") : json());
    if (cmd == "close") {
      closed_ = true;
      return {{"closed", true}};
    }
    throw ProtocolError("unknown cmd '" + cmd + "'");
  } catch (const ProtocolError& e) {
    return error_reply("protocol", e.what());
  } catch (const std::exception& e) {
    return error_reply("internal", e.what());
  }
}

namespace {

std::string handle_line(EnvSession& session, const std::string& line) {
  json reply;
  try {
    reply = session.handle(json::parse(line));
  } catch (const json::parse_error& e) {
    reply = error_reply("parse", e.what());
  }
  return reply.dump() + "\n";
}

bool write_all(int fd, const std::string& s) {
  std::size_t off = 0;
  while (off < s.size()) {
    const ssize_t n = ::write(fd, s.data() + off, s.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

void serve_stream(std::istream& in, std::ostream& out, const json& base_config,
                  const std::filesystem::path& base_dir) {
  EnvSession session(base_config, base_dir);
  std::string line;
  while (!session.closed() && std::getline(in, line)) {
    if (line.empty()) continue;
    out << handle_line(session, line) << std::flush;
  }
}

void serve_fd(int in_fd, int out_fd, const json& base_config,
              const std::filesystem::path& base_dir) {
  EnvSession session(base_config, base_dir);
  std::string buffer;
  char chunk[4096];
  while (!session.closed()) {
    const auto nl = buffer.find('\n');
    if (nl != std::string::npos) {
      const std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (line.empty()) continue;
      if (!write_all(out_fd, handle_line(session, line))) return;
      continue;
    }
    const ssize_t n = ::read(in_fd, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return;
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

void serve_unix_socket(const std::string& path, const json& base_config,
                       const std::filesystem::path& base_dir,
                       int max_connections) {
  const int listener = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (listener < 0) throw std::runtime_error("socket: " + std::string(std::strerror(errno)));
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof addr.sun_path) {
    ::close(listener);
    throw std::runtime_error("socket path too long");
  }
  std::strncpy(addr.sun_path, path.c_str(), sizeof addr.sun_path - 1);
  ::unlink(path.c_str());
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(listener, 16) < 0) {
    const std::string err = std::strerror(errno);
    ::close(listener);
    throw std::runtime_error("bind/listen " + path + ": " + err);
  }
  std::vector<std::thread> workers;
  for (int served = 0; max_connections == 0 || served < max_connections; ++served) {
    const int conn = ::accept(listener, nullptr, nullptr);
    if (conn < 0) {
      if (errno == EINTR) {
        --served;
        continue;
      }
      break;
    }
    workers.emplace_back([conn, &base_config, &base_dir] {
      serve_fd(conn, conn, base_config, base_dir);
      ::close(conn);
    });
  }
  for (auto& w : workers) w.join();
  ::close(listener);
  ::unlink(path.c_str());
}

}  // namespace cqroute
