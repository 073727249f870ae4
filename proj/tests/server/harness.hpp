#pragma once

#include <map>
#include <vector>

#include "colier/protocol/codec.hpp"
#include "colier/server/server.hpp"
#include "support/fixtures.hpp"

namespace colier::testing {

/// Drives a Server core with a manual clock and per-connection inboxes.
struct ServerHarness {
  server::Millis clock = 1'000'000;
  server::Server core;
  std::map<server::ConnId, std::vector<proto::Message>> inbox;

  explicit ServerHarness(server::SessionOptions opts = {})
      : core(server::ServerOptions{[this] { return clock; }, 7, opts}) {}

  void deliver(server::Outbox& out) {
    for (auto& d : out) inbox[d.conn].push_back(std::move(d.message));
  }
  void connect(server::ConnId c) {
    server::Outbox out;
    core.connect(c, out);
    deliver(out);
  }
  void send(server::ConnId c, proto::Body body) {
    server::Outbox out;
    core.receive(c, proto::Message{std::nullopt, std::move(body)}, out);
    deliver(out);
  }
  void send_frame(server::ConnId c, std::string_view frame) {
    server::Outbox out;
    core.receive(c, frame, out);
    deliver(out);
  }
  void disconnect(server::ConnId c) {
    server::Outbox out;
    core.disconnect(c, out);
    deliver(out);
  }
  /// Connects and joins; returns the assigned identity.
  proto::Identity join(server::ConnId c, std::string session = "s", std::optional<std::string> id = std::nullopt) {
    connect(c);
    send(c, proto::Join{std::move(session), std::move(id), std::nullopt});
    for (auto& m : inbox[c]) {
      if (auto* i = std::get_if<proto::Identity>(&m.body)) return *i;
    }
    return {};
  }
  void mutate(server::ConnId c, doc::Mutation m, doc::Millis ts = 1) {
    send(c, change("", std::move(m), ts));
  }

  template <class T>
  std::vector<T> take(server::ConnId c) {
    std::vector<T> out;
    for (auto& m : inbox[c]) {
      if (auto* v = std::get_if<T>(&m.body)) out.push_back(*v);
    }
    return out;
  }
  std::vector<proto::Message> sequenced(server::ConnId c) {
    std::vector<proto::Message> out;
    for (auto& m : inbox[c]) {
      if (m.seq) out.push_back(m);
    }
    return out;
  }
  void clear() { inbox.clear(); }
};

}  // namespace colier::testing
