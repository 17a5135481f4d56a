#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace cqroute {

using NodeId = std::int32_t;
using PacketId = std::int64_t;
using SlotIndex = std::int64_t;

inline constexpr NodeId kNoNode = -1;

enum class TxMode : std::uint8_t { kUnicast = 0, kBroadcast = 1 };

inline int to_int(TxMode m) { return m == TxMode::kBroadcast ? 1 : 0; }

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cqroute
