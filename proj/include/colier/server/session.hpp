#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "colier/document/reducer.hpp"
#include "colier/document/version_log.hpp"
#include "colier/protocol/messages.hpp"
#include "colier/server/storage.hpp"

namespace colier::server {

using ConnId = std::uint64_t;
using doc::ClientId;
using doc::Millis;
using doc::Seq;

/// One outgoing frame addressed to one connection.
struct Delivery {
  ConnId conn = 0;
  proto::Message message;
};
using Outbox = std::vector<Delivery>;

inline constexpr std::array<std::string_view, 12> kPalette = {
    "#795EB3", "#E6194B", "#3CB44B", "#4363D8", "#F58231", "#911EB4",
    "#46F0F0", "#F032E6", "#BCF60C", "#008080", "#9A6324", "#800000",
};

struct ClientRecord {
  ClientId clientId;
  doc::Color color;
  std::string username;
  Millis lastSeen = 0;
  std::set<ConnId> conns;  // a client may be attached through several sockets
  std::optional<doc::LayerId> selectedLayer;
  std::optional<doc::VcaId> selectedVca;
  std::string selectedTool;

  bool connected() const { return !conns.empty(); }
};

struct SessionOptions {
  int autosaveEvery = 25;
  std::size_t historyPageLimit = 500;
};

/// The authoritative sequencer for one session. Not thread-safe; all calls
/// for a session must come from one ordered context.
class Session {
 public:
  Session(std::string id, doc::SessionDocument base, doc::SessionDocument current, doc::VersionLog log,
          std::unique_ptr<SessionStorage> storage, SessionOptions options = {});

  const std::string& id() const { return id_; }
  const doc::SessionDocument& base() const { return base_; }
  const doc::SessionDocument& document() const { return doc_; }
  const doc::VersionLog& log() const { return log_; }
  Seq head() const { return log_.head(); }
  const doc::TransformLeaseTable& leases() const { return leases_; }
  const std::map<ClientId, ClientRecord, std::less<>>& clients() const { return clients_; }
  const SessionStorage* storage() const { return storage_.get(); }
  std::int64_t active_clients() const;

  /// Attaches `conn`. A known `requested` id is reattached with its color;
  /// otherwise `mint` supplies a fresh id. Returns the client id.
  ClientId join(ConnId conn, const proto::Join& req, const std::function<ClientId()>& mint, Millis now,
                Outbox& out);
  void leave(ConnId conn, Millis now, Outbox& out);

  /// Mutation, presence, chat, history and resync requests from a joined
  /// connection.
  void handle(ConnId conn, const ClientId& from, const proto::Message& msg, Millis now, Outbox& out);

  /// Writes document.json now (autosave also happens every N changes).
  void flush();

 private:
  void handle_change(ConnId conn, const ClientId& from, doc::ChangeMessage change, Millis now, Outbox& out);
  void select_layer(ClientRecord& rec, const std::optional<doc::LayerId>& layer, Millis now);
  void broadcast(const proto::Message& m, Outbox& out, std::optional<ConnId> except = std::nullopt) const;
  void send_to_client(const ClientId& client, const proto::Message& m, Outbox& out) const;
  proto::PeerInfo peer(const ClientRecord& rec) const;

  std::string id_;
  doc::SessionDocument base_;
  doc::SessionDocument doc_;
  doc::VersionLog log_;
  doc::TransformLeaseTable leases_;
  std::unique_ptr<SessionStorage> storage_;
  SessionOptions options_;
  std::map<ClientId, ClientRecord, std::less<>> clients_;
  std::size_t colorsAssigned_ = 0;
  int unsaved_ = 0;
};

}  // namespace colier::server
