#include "colier/server/session.hpp"

#include <algorithm>

namespace colier::server {

using proto::Message;

Session::Session(std::string id, doc::SessionDocument base, doc::SessionDocument current, doc::VersionLog log,
                 std::unique_ptr<SessionStorage> storage, SessionOptions options)
    : id_(std::move(id)),
      base_(std::move(base)),
      doc_(std::move(current)),
      log_(std::move(log)),
      storage_(std::move(storage)),
      options_(options) {}

std::int64_t Session::active_clients() const {
  return std::count_if(clients_.begin(), clients_.end(), [](const auto& kv) { return kv.second.connected(); });
}

proto::PeerInfo Session::peer(const ClientRecord& rec) const {
  return {rec.clientId, rec.color, rec.username, rec.connected()};
}

void Session::broadcast(const Message& m, Outbox& out, std::optional<ConnId> except) const {
  for (const auto& [id, rec] : clients_) {
    for (ConnId c : rec.conns) {
      if (c != except) out.push_back({c, m});
    }
  }
}

void Session::send_to_client(const ClientId& client, const Message& m, Outbox& out) const {
  if (auto it = clients_.find(client); it != clients_.end()) {
    for (ConnId c : it->second.conns) out.push_back({c, m});
  }
}

ClientId Session::join(ConnId conn, const proto::Join& req, const std::function<ClientId()>& mint, Millis now,
                       Outbox& out) {
  ClientRecord* rec = nullptr;
  if (req.clientId) {
    if (auto it = clients_.find(*req.clientId); it != clients_.end()) rec = &it->second;
  }
  if (!rec) {
    ClientId id = mint();
    ClientRecord fresh;
    fresh.clientId = id;
    fresh.color = *doc::Color::parse(kPalette[colorsAssigned_++ % kPalette.size()]);
    rec = &clients_.emplace(id, std::move(fresh)).first->second;
  }
  if (req.username) rec->username = *req.username;
  rec->lastSeen = now;
  rec->conns.insert(conn);

  out.push_back({conn, Message{std::nullopt, proto::Identity{rec->clientId, rec->color}}});
  out.push_back({conn, Message{std::nullopt, proto::Snapshot{head(), doc_}}});
  proto::Joined roster{id_, {}};
  for (const auto& [id, other] : clients_) roster.clients.push_back(peer(other));
  out.push_back({conn, Message{std::nullopt, std::move(roster)}});
  broadcast(Message{std::nullopt, proto::ClientJoined{peer(*rec)}}, out, conn);
  return rec->clientId;
}

void Session::leave(ConnId conn, Millis now, Outbox& out) {
  for (auto& [id, rec] : clients_) {
    if (!rec.conns.erase(conn)) continue;
    rec.lastSeen = now;
    if (rec.connected()) return;
    // Leases go with the connection; exclusive locks stay until someone
    // exclusive-unlocks them.
    leases_.release_all(id);
    rec.selectedLayer.reset();
    rec.selectedVca.reset();
    broadcast(Message{std::nullopt, proto::ClientLeft{id}}, out);
    return;
  }
}

void Session::select_layer(ClientRecord& rec, const std::optional<doc::LayerId>& layer, Millis now) {
  if (rec.selectedLayer && rec.selectedLayer != layer) leases_.release(*rec.selectedLayer, rec.clientId);
  rec.selectedLayer = layer;
  if (layer && doc_.find_layer(*layer)) leases_.acquire(*layer, rec.clientId, now);
}

void Session::handle(ConnId conn, const ClientId& from, const Message& msg, Millis now, Outbox& out) {
  auto it = clients_.find(from);
  if (it == clients_.end()) return;
  ClientRecord& rec = it->second;
  rec.lastSeen = now;
  leases_.erase_expired(now);

  std::visit(
      [&](const auto& body) {
        using T = std::decay_t<decltype(body)>;
        if constexpr (std::is_same_v<T, doc::ChangeMessage>) {
          handle_change(conn, from, body, now, out);
        } else if constexpr (std::is_same_v<T, proto::Cursor>) {
          proto::Cursor c = body;
          c.clientId = from;
          broadcast(Message{std::nullopt, c}, out, conn);
        } else if constexpr (std::is_same_v<T, proto::SelectLayer>) {
          proto::SelectLayer s = body;
          s.clientId = from;
          select_layer(rec, s.layerId, now);
          broadcast(Message{std::nullopt, s}, out, conn);
        } else if constexpr (std::is_same_v<T, proto::SelectVca>) {
          proto::SelectVca s = body;
          s.clientId = from;
          rec.selectedVca = s.vcaId;
          broadcast(Message{std::nullopt, s}, out, conn);
        } else if constexpr (std::is_same_v<T, proto::SelectTool>) {
          proto::SelectTool s = body;
          s.clientId = from;
          rec.selectedTool = s.tool;
          broadcast(Message{std::nullopt, s}, out, conn);
        } else if constexpr (std::is_same_v<T, proto::ChatPost>) {
          broadcast(Message{std::nullopt, proto::ChatPosted{from, body.timeStamp, now, body.text}}, out);
        } else if constexpr (std::is_same_v<T, proto::HistoryList>) {
          proto::HistoryEntries page;
          const Seq to = std::min(body.to.value_or(head()), head());
          for (Seq s = std::max<Seq>(body.from, 1); s <= to && page.entries.size() < options_.historyPageLimit; ++s) {
            page.entries.push_back(log_.entries()[s - 1]);
          }
          out.push_back({conn, Message{std::nullopt, std::move(page)}});
        } else if constexpr (std::is_same_v<T, proto::Snapshot>) {
          out.push_back({conn, Message{std::nullopt, proto::Snapshot{head(), doc_}}});
        } else {
          out.push_back({conn, Message{std::nullopt, proto::Rejected{std::nullopt, std::nullopt, "MalformedPayload",
                                                                     "unexpected message"}}});
        }
      },
      msg.body);
}

void Session::handle_change(ConnId conn, const ClientId& from, doc::ChangeMessage change, Millis now, Outbox& out) {
  change.clientId = from;
  change.serverTime = now;
  const Millis ref = change.timeStamp;
  auto reject = [&](std::string_view reason, std::string detail) {
    out.push_back({conn, Message{std::nullopt, proto::Rejected{ref, std::nullopt, std::string(reason), std::move(detail)}}});
  };

  if (auto* np = std::get_if<doc::op::NewPath>(&change.mutation); np && np->layerId.empty()) {
    const auto& sel = clients_.at(from).selectedLayer;
    if (!sel) return reject("StaleTarget", "layerId");
    np->layerId = *sel;
  }

  const doc::LayerId* target = doc::target_layer(change.mutation);
  if (target && doc_.find_layer(*target)) {
    auto perm = doc::check_permission(doc_, change, leases_, now);
    if (!perm.allowed) {
      doc::Reject r{doc::RejectCode::PermissionDenied, perm.reason, *target};
      return reject(r.reason(), r.detail);
    }
  }
  auto applied = doc::apply_change_in_place(doc_, change);
  if (!applied.ok()) return reject(applied.error().reason(), applied.error().detail);
  const doc::DomainEvent& ev = applied.value();

  doc::SequencedEvent seqd{head() + 1, std::move(change)};
  (void)log_.append(seqd, doc_);
  if (storage_) storage_->append(seqd);

  if (auto* u = std::get_if<doc::op::UpdateLayer>(&seqd.change.mutation); u && u->touches_transform()) {
    leases_.acquire(u->layerId, from, now);
  }
  if (std::holds_alternative<doc::op::DeleteLayer>(seqd.change.mutation)) leases_.erase_layer(ev.layerId);

  broadcast(proto::sequenced(seqd), out);
  if (ev.notifyOwner) {
    send_to_client(*ev.notifyOwner,
                   Message{std::nullopt, proto::ExclusiveUnlockNotice{ev.layerId, *ev.notifyOwner, from, now}}, out);
  }
  if (storage_ && ++unsaved_ >= options_.autosaveEvery) flush();
}

void Session::flush() {
  if (!storage_) return;
  storage_->save_document(doc_, head());
  unsaved_ = 0;
}

}  // namespace colier::server
