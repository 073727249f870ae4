#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "colier/document/types.hpp"

namespace colier::proto {

using doc::ClientId;
using doc::Color;
using doc::LayerId;
using doc::Millis;
using doc::Seq;
using doc::VcaId;

// ---- session ---------------------------------------------------------------

struct ListSessions {
  bool operator==(const ListSessions&) const = default;
};

struct SessionSummary {
  std::string sessionId;
  std::string name;
  std::int64_t activeClients = 0;
  bool operator==(const SessionSummary&) const = default;
};

struct Overview {
  std::vector<SessionSummary> sessions;
  bool operator==(const Overview&) const = default;
};

struct Join {
  std::string sessionId;
  std::optional<ClientId> clientId;  // present when reconnecting
  std::optional<std::string> username;
  bool operator==(const Join&) const = default;
};

struct PeerInfo {
  ClientId clientId;
  Color color;
  std::string username;
  bool connected = true;
  bool operator==(const PeerInfo&) const = default;
};

/// Roster sent to a client right after its snapshot.
struct Joined {
  std::string sessionId;
  std::vector<PeerInfo> clients;
  bool operator==(const Joined&) const = default;
};

/// Server to client: full state at `seq`. Client to server (no document):
/// request for a fresh snapshot.
struct Snapshot {
  Seq seq = 0;
  std::optional<doc::SessionDocument> document;
  bool operator==(const Snapshot&) const = default;
};

struct ClientJoined {
  PeerInfo client;
  bool operator==(const ClientJoined&) const = default;
};

struct ClientLeft {
  ClientId clientId;
  bool operator==(const ClientLeft&) const = default;
};

struct Identity {
  ClientId clientId;
  Color color;
  bool operator==(const Identity&) const = default;
};

/// Sent to the originator of a change the sequencer refused.
struct Rejected {
  std::optional<Millis> refTimeStamp;
  std::optional<Seq> refSeq;
  std::string reason;
  std::string detail;
  bool operator==(const Rejected&) const = default;
};

// ---- layer (server-only notice) ---------------------------------------------

struct ExclusiveUnlockNotice {
  LayerId layerId;
  ClientId owner;  // former lock holder, the addressee
  ClientId by;
  Millis serverTime = 0;
  bool operator==(const ExclusiveUnlockNotice&) const = default;
};

// ---- presence ----------------------------------------------------------------

struct Cursor {
  ClientId clientId;
  Millis timeStamp = 0;
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Cursor&) const = default;
};

struct SelectLayer {
  ClientId clientId;
  Millis timeStamp = 0;
  std::optional<LayerId> layerId;  // empty = deselect
  bool operator==(const SelectLayer&) const = default;
};

struct SelectVca {
  ClientId clientId;
  Millis timeStamp = 0;
  std::optional<LayerId> layerId;
  std::optional<VcaId> vcaId;
  bool operator==(const SelectVca&) const = default;
};

struct SelectTool {
  ClientId clientId;
  Millis timeStamp = 0;
  std::string tool;
  bool operator==(const SelectTool&) const = default;
};

// ---- chat ----------------------------------------------------------------------

struct ChatPost {
  ClientId clientId;
  Millis timeStamp = 0;
  std::string text;
  bool operator==(const ChatPost&) const = default;
};

struct ChatPosted {
  ClientId clientId;
  Millis timeStamp = 0;
  Millis serverTime = 0;
  std::string text;
  bool operator==(const ChatPosted&) const = default;
};

// ---- history -------------------------------------------------------------------

struct HistoryList {
  Seq from = 1;
  std::optional<Seq> to;
  bool operator==(const HistoryList&) const = default;
};

struct HistoryEntries {
  std::vector<doc::SequencedEvent> entries;
  bool operator==(const HistoryEntries&) const = default;
};

using Body = std::variant<doc::ChangeMessage, ListSessions, Overview, Join, Joined, Snapshot,
                          ClientJoined, ClientLeft, Identity, Rejected, ExclusiveUnlockNotice, Cursor,
                          SelectLayer, SelectVca, SelectTool, ChatPost, ChatPosted, HistoryList,
                          HistoryEntries>;

/// One wire frame. `seq` is present exactly on sequenced mutation
/// broadcasts; the sequencer's clock travels in the change itself.
struct Message {
  std::optional<Seq> seq;
  Body body;
  bool operator==(const Message&) const = default;
};

Message sequenced(const doc::SequencedEvent& ev);

std::string_view module_of(const Body& b);
std::string_view action_of(const Body& b);

inline bool is_mutation(const Body& b) { return std::holds_alternative<doc::ChangeMessage>(b); }
inline bool is_presence(const Body& b) {
  return std::holds_alternative<Cursor>(b) || std::holds_alternative<SelectLayer>(b) ||
         std::holds_alternative<SelectVca>(b) || std::holds_alternative<SelectTool>(b);
}

}  // namespace colier::proto
