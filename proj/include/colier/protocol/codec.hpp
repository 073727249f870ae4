#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "colier/common/numbers.hpp"
#include "colier/common/result.hpp"
#include "colier/protocol/messages.hpp"

namespace colier::proto {

inline constexpr std::size_t kMaxFrameBytes = 1 << 20;

struct DecodeError {
  enum class Kind { UnknownModule, UnknownAction, MissingField, BadValue } kind = Kind::BadValue;
  std::string field;  // offending field path, or the unknown module/action name

  std::string message() const;
  bool operator==(const DecodeError&) const = default;
};

struct RegistryEntry {
  std::string_view module;
  std::string_view action;
  bool server_only;
};

/// Closed set of (module, action) pairs accepted on the wire.
std::span<const RegistryEntry> registry();
const RegistryEntry* find_action(std::string_view module, std::string_view action);

/// Never throws; every malformed input maps to a DecodeError.
Result<Message, DecodeError> decode_message(std::string_view frame);
Result<Message, DecodeError> decode_message_json(const Json& envelope);

/// Canonical bytes: fixed key order, scalar numbers as decimal strings,
/// path coordinates as JSON numbers in shortest round-trip form.
std::string encode_message(const Message& m);
Json encode_message_json(const Message& m);

/// Per-action required fields and value ranges, without building a message.
Result<Unit, DecodeError> validate_payload(std::string_view module, std::string_view action,
                                           const Json& payload);

}  // namespace colier::proto
