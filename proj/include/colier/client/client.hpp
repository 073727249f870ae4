#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "colier/document/types.hpp"
#include "colier/protocol/messages.hpp"

namespace colier::client {

using doc::ClientId;
using doc::Millis;
using doc::Seq;
using Clock = std::function<Millis()>;

/// Outbound half of a connection. The client never reads from it; inbound
/// frames are pushed in through Client::on_server_update.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual bool is_open() const = 0;
  virtual void send(const proto::Message& m) = 0;
};

class ClientError : public std::runtime_error {
 public:
  enum class Kind { NotJoined, TransportClosed, UnknownSession, ProtocolViolation };
  ClientError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
  Kind kind;
};

struct PresenceState {
  doc::Color color;
  std::string username;
  bool connected = true;
  std::optional<std::pair<double, double>> cursor;
  std::optional<doc::LayerId> selectedLayer;
  std::optional<doc::VcaId> selectedVca;
  std::optional<std::string> selectedTool;
  bool operator==(const PresenceState&) const = default;
};

struct PendingChange {
  doc::ChangeMessage change;
  Millis sentAt = 0;
};

struct LocalStore {
  doc::SessionDocument document;
  Seq lastSeq = 0;
  std::optional<proto::Identity> identity;
  std::map<ClientId, PresenceState, std::less<>> presence;
};

/// What observers (a UI, a test) hear after each store update.
struct Notification {
  enum class Kind { Applied, Rejected, Resynced, Presence, Chat, UnlockNotice, Joined };
  Kind kind = Kind::Applied;
  Seq seq = 0;
  ClientId clientId;
  std::string reason;  // Rejected: wire reason token; Chat: text
};

/// clientId per (endpoint, session), kept in a small JSON file.
class IdentityFile {
 public:
  explicit IdentityFile(std::filesystem::path path) : path_(std::move(path)) {}
  std::optional<ClientId> load(std::string_view endpoint, std::string_view session) const;
  void save(std::string_view endpoint, std::string_view session, const ClientId& id) const;

 private:
  std::filesystem::path path_;
};

/// Headless synchronization layer. The local store changes only when the
/// server says so; submitted edits wait for their echo.
class Client {
 public:
  Client(Transport& transport, Clock clock);

  void set_observer(std::function<void(const Notification&)> f) { observer_ = std::move(f); }
  /// Where to remember the assigned id; `endpoint` keys the entry.
  void set_identity_file(const IdentityFile* file, std::string endpoint);

  const LocalStore& store() const { return store_; }
  const std::deque<PendingChange>& pending() const { return pending_; }
  bool resyncing() const { return resyncing_; }
  const std::string& session() const { return session_; }

  /// Sends a join, carrying the remembered id for this session if any.
  void join(const std::string& session, std::optional<std::string> username = std::nullopt);
  /// Drops in-flight changes and joins again over a fresh transport.
  void reconnect(Transport& transport);

  PendingChange submit_change(doc::Mutation m);
  void select_layer(std::optional<doc::LayerId> layer);
  void move_cursor(double x, double y);
  void post_chat(std::string text);

  /// Feeds one inbound frame. Throws ClientError(ProtocolViolation) when a
  /// sequenced change does not apply locally, and ClientError(UnknownSession)
  /// when a join is refused.
  void on_server_update(const proto::Message& m);

 private:
  Millis next_timestamp();
  void require_joined() const;
  void send(proto::Body b);
  void apply(const doc::ChangeMessage& change, Seq seq);
  void notify(Notification n) const;

  Transport* transport_;
  Clock clock_;
  std::function<void(const Notification&)> observer_;
  const IdentityFile* identityFile_ = nullptr;
  std::string endpoint_;
  std::string session_;
  std::optional<std::string> username_;
  LocalStore store_;
  std::deque<PendingChange> pending_;
  bool joined_ = false;
  bool resyncing_ = false;
  Millis lastStamp_ = 0;
};

}  // namespace colier::client
