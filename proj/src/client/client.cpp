#include "colier/client/client.hpp"

#include <fstream>

#include "colier/common/numbers.hpp"
#include "colier/document/reducer.hpp"
#include "json.hpp"

namespace colier::client {

namespace {

template <class... F>
struct Overloaded : F... {
  using F::operator()...;
};
template <class... F>
Overloaded(F...) -> Overloaded<F...>;

std::string identity_key(std::string_view endpoint, std::string_view session) {
  return std::string(endpoint) + " " + std::string(session);
}

Json read_identity_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return Json::object();
  Json j = Json::parse(in, nullptr, false);
  return j.is_object() ? j : Json::object();
}

}  // namespace

std::optional<ClientId> IdentityFile::load(std::string_view endpoint, std::string_view session) const {
  const Json j = read_identity_json(path_);
  auto it = j.find(identity_key(endpoint, session));
  if (it == j.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

void IdentityFile::save(std::string_view endpoint, std::string_view session, const ClientId& id) const {
  Json j = read_identity_json(path_);
  j[identity_key(endpoint, session)] = id;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  const auto tmp = path_.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path_);
}

Client::Client(Transport& transport, Clock clock) : transport_(&transport), clock_(std::move(clock)) {}

void Client::set_identity_file(const IdentityFile* file, std::string endpoint) {
  identityFile_ = file;
  endpoint_ = std::move(endpoint);
}

void Client::join(const std::string& session, std::optional<std::string> username) {
  session_ = session;
  if (username) username_ = std::move(username);
  std::optional<ClientId> id;
  if (store_.identity) id = store_.identity->clientId;
  else if (identityFile_) id = identityFile_->load(endpoint_, session_);
  joined_ = false;
  send(proto::Join{session_, id, username_});
}

void Client::reconnect(Transport& transport) {
  transport_ = &transport;
  pending_.clear();
  resyncing_ = false;
  store_.presence.clear();
  join(session_);
}

Millis Client::next_timestamp() {
  lastStamp_ = std::max(clock_(), lastStamp_ + 1);
  return lastStamp_;
}

void Client::require_joined() const {
  if (!joined_ || !store_.identity) throw ClientError(ClientError::Kind::NotJoined, "not joined to a session");
}

void Client::send(proto::Body b) {
  if (!transport_->is_open()) throw ClientError(ClientError::Kind::TransportClosed, "transport closed");
  transport_->send(proto::Message{std::nullopt, std::move(b)});
}

PendingChange Client::submit_change(doc::Mutation m) {
  require_joined();
  PendingChange p;
  p.change.clientId = store_.identity->clientId;
  p.change.timeStamp = next_timestamp();
  p.change.mutation = std::move(m);
  p.sentAt = p.change.timeStamp;
  send(p.change);
  pending_.push_back(p);
  return p;
}

void Client::select_layer(std::optional<doc::LayerId> layer) {
  require_joined();
  send(proto::SelectLayer{store_.identity->clientId, next_timestamp(), layer});
  store_.presence[store_.identity->clientId].selectedLayer = std::move(layer);
}

void Client::move_cursor(double x, double y) {
  require_joined();
  send(proto::Cursor{store_.identity->clientId, next_timestamp(), x, y});
}

void Client::post_chat(std::string text) {
  require_joined();
  send(proto::ChatPost{store_.identity->clientId, next_timestamp(), std::move(text)});
}

void Client::notify(Notification n) const {
  if (observer_) observer_(n);
}

void Client::apply(const doc::ChangeMessage& change, Seq seq) {
  auto r = doc::apply_change_in_place(store_.document, change);
  if (!r) {
    throw ClientError(ClientError::Kind::ProtocolViolation,
                      "seq " + std::to_string(seq) + " did not apply locally: " + std::string(r.error().reason()) +
                          (r.error().detail.empty() ? "" : " (" + r.error().detail + ")"));
  }
  store_.lastSeq = seq;
  if (store_.identity && change.clientId == store_.identity->clientId) {
    for (auto it = pending_.begin(); it != pending_.end(); ++it) {
      if (it->change.timeStamp == change.timeStamp) {
        pending_.erase(it);
        break;
      }
    }
  }
  notify({Notification::Kind::Applied, seq, change.clientId, {}});
}

void Client::on_server_update(const proto::Message& m) {
  if (m.seq) {
    const auto* change = std::get_if<doc::ChangeMessage>(&m.body);
    if (!change || resyncing_ || *m.seq <= store_.lastSeq) return;
    if (*m.seq != store_.lastSeq + 1) {
      resyncing_ = true;
      send(proto::Snapshot{});
      return;
    }
    apply(*change, *m.seq);
    return;
  }

  auto presence_of = [&](const ClientId& id) -> PresenceState& { return store_.presence[id]; };
  std::visit(
      Overloaded{
          [&](const proto::Identity& id) {
            store_.identity = id;
            joined_ = true;
            if (identityFile_) identityFile_->save(endpoint_, session_, id.clientId);
          },
          [&](const proto::Snapshot& s) {
            if (!s.document) return;
            store_.document = *s.document;
            store_.lastSeq = s.seq;
            if (resyncing_) {
              // Echoes of our own changes may have fallen into the gap; the
              // snapshot already contains them, so nothing is left to wait for.
              pending_.clear();
              resyncing_ = false;
            }
            notify({Notification::Kind::Resynced, s.seq, {}, {}});
          },
          [&](const proto::Joined& j) {
            store_.presence.clear();
            for (const auto& p : j.clients) {
              auto& st = presence_of(p.clientId);
              st.color = p.color;
              st.username = p.username;
              st.connected = p.connected;
            }
            notify({Notification::Kind::Joined, store_.lastSeq, {}, {}});
          },
          [&](const proto::ClientJoined& j) {
            auto& st = presence_of(j.client.clientId);
            st.color = j.client.color;
            st.username = j.client.username;
            st.connected = true;
            notify({Notification::Kind::Presence, 0, j.client.clientId, {}});
          },
          [&](const proto::ClientLeft& l) {
            store_.presence.erase(l.clientId);
            notify({Notification::Kind::Presence, 0, l.clientId, {}});
          },
          [&](const proto::Cursor& c) {
            presence_of(c.clientId).cursor = std::pair{c.x, c.y};
            notify({Notification::Kind::Presence, 0, c.clientId, {}});
          },
          [&](const proto::SelectLayer& s) {
            presence_of(s.clientId).selectedLayer = s.layerId;
            notify({Notification::Kind::Presence, 0, s.clientId, {}});
          },
          [&](const proto::SelectVca& s) {
            auto& st = presence_of(s.clientId);
            st.selectedLayer = s.layerId;
            st.selectedVca = s.vcaId;
            notify({Notification::Kind::Presence, 0, s.clientId, {}});
          },
          [&](const proto::SelectTool& s) {
            presence_of(s.clientId).selectedTool = s.tool;
            notify({Notification::Kind::Presence, 0, s.clientId, {}});
          },
          [&](const proto::Rejected& r) {
            if (r.reason == "UnknownSession") {
              throw ClientError(ClientError::Kind::UnknownSession, "unknown session " + session_);
            }
            if (r.refTimeStamp) {
              for (auto it = pending_.begin(); it != pending_.end(); ++it) {
                if (it->change.timeStamp == *r.refTimeStamp) {
                  pending_.erase(it);
                  break;
                }
              }
            }
            notify({Notification::Kind::Rejected, 0, store_.identity ? store_.identity->clientId : "", r.reason});
          },
          [&](const proto::ChatPosted& c) { notify({Notification::Kind::Chat, 0, c.clientId, c.text}); },
          [&](const proto::ExclusiveUnlockNotice& n) {
            notify({Notification::Kind::UnlockNotice, 0, n.by, n.layerId});
          },
          [](const auto&) {},
      },
      m.body);
}

}  // namespace colier::client
