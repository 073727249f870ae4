#include "colier/server/server.hpp"

#include <chrono>

#include "colier/document/serialization.hpp"
#include "colier/protocol/codec.hpp"

namespace colier::server {

namespace fs = std::filesystem;
using proto::Message;

Millis system_now() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

Server::Server(ServerOptions options)
    : options_(std::move(options)), rng_(options_.seed ? options_.seed : std::random_device{}()) {}

void Server::load(const fs::path& data_dir, std::vector<std::string>& warnings) {
  if (!fs::is_directory(data_dir)) throw std::runtime_error("data directory " + data_dir.string() + " does not exist");
  data_dir_ = data_dir;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(data_dir)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    const std::string id = dir.filename().string();
    try {
      auto loaded = load_session(dir);
      for (auto& w : loaded.warnings) warnings.push_back(id + ": " + w);
      auto storage = std::make_unique<SessionStorage>(dir);
      add_session(std::make_unique<Session>(id, std::move(loaded.base), std::move(loaded.document),
                                            std::move(loaded.log), std::move(storage), options_.session));
      sessions_.at(id)->flush();
    } catch (const std::exception& e) {
      warnings.push_back(id + ": skipped: " + e.what());
    }
  }
  if (sessions_.empty()) {
    std::string id = "default";
    for (int n = 2; fs::exists(data_dir / id); ++n) id = "default-" + std::to_string(n);
    create_session(id, "Default", 1280, 720);
  }
}

Session& Server::create_session(const std::string& id, const std::string& name, int width, int height) {
  auto base = doc::make_document(name, width, height, now());
  std::unique_ptr<SessionStorage> storage;
  if (!data_dir_.empty()) storage = std::make_unique<SessionStorage>(SessionStorage::create(data_dir_ / id, base));
  add_session(std::make_unique<Session>(id, base, base, doc::VersionLog{}, std::move(storage), options_.session));
  return *sessions_.at(id);
}

void Server::add_session(std::unique_ptr<Session> session) {
  const std::string id = session->id();
  sessions_[id] = std::move(session);
}

Session* Server::find_session(std::string_view id) {
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second.get();
}

proto::Overview Server::overview() const {
  proto::Overview o;
  for (const auto& [id, s] : sessions_) o.sessions.push_back({id, s->document().meta.name, s->active_clients()});
  return o;
}

ClientId Server::mint_client_id(const Session& session) {
  static constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
  for (;;) {
    ClientId id(15, ' ');
    for (auto& ch : id) ch = kAlphabet[std::uniform_int_distribution<std::size_t>(0, kAlphabet.size() - 1)(rng_)];
    if (!session.clients().count(id)) return id;
  }
}

void Server::reject(ConnId conn, std::string reason, std::string detail, Outbox& out, std::optional<Millis> ref) const {
  out.push_back({conn, Message{std::nullopt, proto::Rejected{ref, std::nullopt, std::move(reason), std::move(detail)}}});
}

void Server::connect(ConnId conn, Outbox& out) {
  conns_[conn] = {};
  out.push_back({conn, Message{std::nullopt, overview()}});
}

void Server::receive(ConnId conn, std::string_view frame, Outbox& out) {
  auto decoded = proto::decode_message(frame);
  if (!decoded.ok()) return reject(conn, "MalformedPayload", decoded.error().message(), out);
  receive(conn, decoded.value(), out);
}

void Server::receive(ConnId conn, const Message& msg, Outbox& out) {
  auto cit = conns_.find(conn);
  if (cit == conns_.end()) return;
  Connection& c = cit->second;
  const auto* entry = proto::find_action(proto::module_of(msg.body), proto::action_of(msg.body));
  std::optional<Millis> ref;
  if (const auto* change = std::get_if<doc::ChangeMessage>(&msg.body)) ref = change->timeStamp;
  if (entry && entry->server_only) return reject(conn, "MalformedPayload", "server-only action", out, ref);

  if (std::holds_alternative<proto::ListSessions>(msg.body)) {
    out.push_back({conn, Message{std::nullopt, overview()}});
    return;
  }
  if (const auto* join = std::get_if<proto::Join>(&msg.body)) {
    Session* s = find_session(join->sessionId);
    if (!s) return reject(conn, "UnknownSession", join->sessionId, out);
    if (Session* old = find_session(c.sessionId)) old->leave(conn, now(), out);
    c.sessionId = s->id();
    c.clientId = s->join(conn, *join, [&] { return mint_client_id(*s); }, now(), out);
    return;
  }
  Session* s = find_session(c.sessionId);
  if (!s) return reject(conn, "NotJoined", "", out, ref);
  s->handle(conn, c.clientId, msg, now(), out);
}

void Server::disconnect(ConnId conn, Outbox& out) {
  auto it = conns_.find(conn);
  if (it == conns_.end()) return;
  if (Session* s = find_session(it->second.sessionId)) s->leave(conn, now(), out);
  conns_.erase(it);
}

void Server::shutdown() {
  for (auto& [id, s] : sessions_) s->flush();
}

}  // namespace colier::server
