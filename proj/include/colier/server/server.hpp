#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "colier/server/session.hpp"

namespace colier::server {

using Clock = std::function<Millis()>;

Millis system_now();

struct ServerOptions {
  Clock clock = system_now;
  std::uint64_t seed = 0;  // 0: seed client ids from std::random_device
  SessionOptions session;
};

/// Connection-level front door: routes decoded frames to sessions and
/// answers the pre-join handshake. Sans-IO; every reply lands in an Outbox.
class Server {
 public:
  explicit Server(ServerOptions options = {});

  /// Loads every session under `data_dir`; broken ones are skipped and
  /// reported in `warnings`. An empty directory gets a 1280x720 "default"
  /// session. Throws std::runtime_error if the directory does not exist.
  void load(const std::filesystem::path& data_dir, std::vector<std::string>& warnings);

  /// New session, persisted under the data directory when one is loaded.
  Session& create_session(const std::string& id, const std::string& name, int width, int height);
  void add_session(std::unique_ptr<Session> session);

  Session* find_session(std::string_view id);
  const std::map<std::string, std::unique_ptr<Session>, std::less<>>& sessions() const { return sessions_; }
  const std::filesystem::path& data_dir() const { return data_dir_; }

  void connect(ConnId conn, Outbox& out);
  void receive(ConnId conn, std::string_view frame, Outbox& out);
  void receive(ConnId conn, const proto::Message& msg, Outbox& out);
  void disconnect(ConnId conn, Outbox& out);

  /// Autosaves every session.
  void shutdown();

  Millis now() const { return options_.clock(); }

 private:
  struct Connection {
    std::string sessionId;  // empty until joined
    ClientId clientId;
  };

  ClientId mint_client_id(const Session& session);
  proto::Overview overview() const;
  void reject(ConnId conn, std::string reason, std::string detail, Outbox& out,
              std::optional<Millis> ref = std::nullopt) const;

  ServerOptions options_;
  std::mt19937_64 rng_;
  std::filesystem::path data_dir_;
  std::map<std::string, std::unique_ptr<Session>, std::less<>> sessions_;
  std::map<ConnId, Connection> conns_;
};

}  // namespace colier::server
