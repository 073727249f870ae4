#pragma once

#include <deque>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "colier/client/client.hpp"
#include "colier/protocol/codec.hpp"
#include "colier/server/server.hpp"

namespace colier::testing {

/// Synchronous loopback: frames go through the codec in both directions and
/// wait in per-connection inboxes until pumped.
struct Loop {
  doc::Millis clock = 5'000'000;
  server::Server core{server::ServerOptions{[this] { return clock; }, 3, {}}};

  struct Wire : client::Transport {
    Loop* loop = nullptr;
    server::ConnId id = 0;
    bool open = true;
    std::deque<std::string> inbound;
    std::vector<proto::Message> sent;
    bool is_open() const override { return open; }
    void send(const proto::Message& m) override {
      sent.push_back(m);
      loop->to_server(id, proto::encode_message(m));
    }
  };
  std::map<server::ConnId, std::unique_ptr<Wire>> wires;
  server::ConnId next = 1;

  Loop() { core.create_session("s", "S", 320, 240); }

  void route(server::Outbox& out) {
    for (auto& d : out) {
      if (auto it = wires.find(d.conn); it != wires.end() && it->second->open) {
        it->second->inbound.push_back(proto::encode_message(d.message));
      }
    }
  }
  void to_server(server::ConnId id, const std::string& frame) {
    server::Outbox out;
    core.receive(id, frame, out);
    route(out);
  }
  Wire& open() {
    auto w = std::make_unique<Wire>();
    w->loop = this;
    w->id = next++;
    auto& ref = *w;
    wires[ref.id] = std::move(w);
    server::Outbox out;
    core.connect(ref.id, out);
    route(out);
    return ref;
  }
  void drop(Wire& w) {
    w.open = false;
    server::Outbox out;
    core.disconnect(w.id, out);
    route(out);
  }
  static void pump(Wire& w, client::Client& c) {
    while (!w.inbound.empty()) {
      auto m = proto::decode_message(w.inbound.front());
      w.inbound.pop_front();
      if (!m) throw std::logic_error("undecodable server frame: " + m.error().message());
      c.on_server_update(m.value());
    }
  }
  const doc::SessionDocument& server_doc() { return core.find_session("s")->document(); }
};

struct Peer {
  Loop::Wire* wire;
  client::Client client;
  Peer(Loop& loop) : wire(&loop.open()), client(*wire, [&loop] { return loop.clock; }) {}
  void pump() { Loop::pump(*wire, client); }
  void join() {
    client.join("s");
    pump();
  }
};

}  // namespace colier::testing
