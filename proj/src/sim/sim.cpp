#include "colier/sim/sim.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <queue>
#include <random>

#include "colier/document/effects.hpp"
#include "colier/document/serialization.hpp"
#include "colier/protocol/codec.hpp"
#include "colier/server/server.hpp"

namespace colier::sim {

namespace {

constexpr std::string_view kDeadLayer = "L99999999";
constexpr std::string_view kDeadVca = "V99999999";
constexpr std::string_view kSessionId = "sim";

std::size_t pick_index(double u, std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n))); }

std::string pick_layer(const doc::SessionDocument& view, double u, double dead) {
  if (view.layers.empty() || dead < 0.03) return std::string(kDeadLayer);
  return view.layers[pick_index(u, view.layers.size())].id;
}

const doc::VcaInstance* pick_vca(const doc::SessionDocument& view, const std::string& layer, double u) {
  const doc::Layer* l = view.find_layer(layer);
  if (!l || l->pipeline.empty()) return nullptr;
  return &l->pipeline[pick_index(u, l->pipeline.size())];
}

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

doc::SessionDocument ScenarioConfig::default_template(int layers) {
  auto d = doc::make_document("sim", 320, 240, 0);
  for (int i = 0; i < layers; ++i) {
    doc::Layer l;
    l.id = doc::make_id('L', ++d.idCounter);
    l.name = "Layer " + std::to_string(i + 1);
    d.layers.push_back(std::move(l));
  }
  return d;
}

void ScenarioConfig::validate() const {
  if (clients < 1) throw std::invalid_argument("clients must be at least 1");
  if (ops < 0) throw std::invalid_argument("ops must not be negative");
  if (latencyMin < 0 || latencyMin > latencyMax) throw std::invalid_argument("latency range must satisfy 0 <= min <= max");
  double sum = 0;
  for (double w : conflictMix) {
    if (!(w >= 0)) throw std::invalid_argument("conflict weights must be non-negative");
    sum += w;
  }
  if (!(sum > 0)) throw std::invalid_argument("conflict weights must sum to more than zero");
  if (thinkMaxMs < 0) throw std::invalid_argument("think time must not be negative");
}

Schedule generate_ops(const ScenarioConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::discrete_distribution<int> category(config.conflictMix.begin(), config.conflictMix.end());
  std::uniform_int_distribution<int> who(0, config.clients - 1);
  std::uniform_int_distribution<Millis> think(0, config.thinkMaxMs);
  // Joins complete within one round trip; edits start after that.
  const Millis start = 2 * config.latencyMax + 1;

  Schedule out(static_cast<std::size_t>(config.clients));
  std::vector<Millis> clock(out.size(), start);
  for (int i = 0; i < config.ops; ++i) {
    Intent in;
    in.client = who(rng);
    in.category = static_cast<Category>(category(rng));
    const double a = unit(rng);
    switch (in.category) {
      case Category::Draw: in.action = a < 0.8 ? 0 : a < 0.9 ? 1 : 2; break;
      case Category::LayerProp: in.action = pick_index(a, 5); break;
      case Category::Structure: in.action = a < 0.5 ? 0 : a < 0.7 ? 1 : 2; break;
      case Category::Lock: in.action = pick_index(a, 4); break;
      case Category::Vca: in.action = a < 0.3 ? 0 : pick_index((a - 0.3) / 0.7, 4) + 1; break;
    }
    for (double& d : in.draws) d = unit(rng);
    auto& t = clock[static_cast<std::size_t>(in.client)];
    t += think(rng);
    in.at = t;
    out[static_cast<std::size_t>(in.client)].push_back(std::move(in));
  }
  return out;
}

doc::Mutation resolve_intent(const Intent& in, const doc::SessionDocument& view) {
  using namespace doc;
  if (in.scripted) return *in.scripted;
  const auto& d = in.draws;
  const std::string layer = pick_layer(view, d[0], d[7]);
  const double w = view.meta.width, h = view.meta.height;
  switch (in.category) {
    case Category::Draw: {
      if (in.action == 1) return op::UndoPath{layer};
      if (in.action == 2) return op::RedoPath{layer};
      op::NewPath np;
      np.layerId = layer;
      np.color = Color{static_cast<std::uint8_t>(d[1] * 255), static_cast<std::uint8_t>(d[2] * 255), 0xB3};
      np.width = round_to(1 + d[3] * 15, 0.5);
      double x = round_to(d[4] * w, 0.01), y = round_to(d[5] * h, 0.01);
      np.path.push_back(PathCommand::move_to(x, y));
      const int segments = 1 + static_cast<int>(d[6] * 4);
      for (int k = 1; k <= segments; ++k) {
        const double nx = round_to(std::fmod(x + 17.0 * k * (0.5 + d[1]), w), 0.01);
        const double ny = round_to(std::fmod(y + 11.0 * k * (0.5 + d[2]), h), 0.01);
        if (k % 2) np.path.push_back(PathCommand::quad_to((x + nx) / 2, y, nx, ny));
        else np.path.push_back(PathCommand::line_to(nx, ny));
        x = nx;
        y = ny;
      }
      return np;
    }
    case Category::LayerProp: {
      op::UpdateLayer u{layer};
      switch (in.action) {
        case 0: u.opacity = round_to(d[1], 0.01); break;
        case 1: u.visible = d[1] < 0.5; break;
        case 2: u.name = "n" + std::to_string(static_cast<int>(d[1] * 1000)); break;
        case 3:
          u.tx = round_to((d[1] - 0.5) * w, 0.5);
          u.ty = round_to((d[2] - 0.5) * h, 0.5);
          u.rotation = round_to((d[3] - 0.5) * 360, 0.5);
          break;
        default:
          u.scaleX = round_to(0.25 + d[1] * 2, 0.05);
          u.scaleY = round_to(0.25 + d[2] * 2, 0.05);
          break;
      }
      return u;
    }
    case Category::Structure: {
      if (in.action == 0) return op::AddLayer{};
      if (in.action == 1) return op::DeleteLayer{layer};
      const auto n = static_cast<std::int64_t>(view.layers.size());
      return op::ReorderLayer{layer, n == 0 ? 0 : static_cast<std::int64_t>(pick_index(d[1], static_cast<std::size_t>(n)))};
    }
    case Category::Lock:
      switch (in.action) {
        case 0: return op::Lock{layer};
        case 1: return op::Unlock{layer};
        case 2: return op::ExclusiveLock{layer};
        default: return op::ExclusiveUnlock{layer};
      }
    case Category::Vca: {
      if (in.action == 0) {
        op::AddVca a{layer, static_cast<Effect>(pick_index(d[1], 5)), std::nullopt, {}};
        return a;
      }
      const VcaInstance* vca = pick_vca(view, layer, d[1]);
      const std::string vid = vca ? vca->id : std::string(kDeadVca);
      switch (in.action) {
        case 1: return op::RemoveVca{layer, vid};
        case 2: {
          op::UpdateVcaParams u{layer, vid, {}};
          const auto params = effect_spec(vca ? vca->effect : Effect::Contrast).params;
          const ParamSpec& p = params[pick_index(d[2], params.size())];
          double v = p.min + d[3] * (p.max - p.min);
          v = p.integral ? std::round(v) : round_to(v, 0.001);
          u.params[std::string(p.name)] = std::clamp(v, p.min, p.max);
          return u;
        }
        case 3: return op::SetVcaEnabled{layer, vid, d[2] < 0.5};
        default: {
          const doc::Layer* l = view.find_layer(layer);
          const auto n = l ? l->pipeline.size() : 1;
          return op::ReorderVca{layer, vid, static_cast<std::int64_t>(pick_index(d[2], std::max<std::size_t>(n, 1)))};
        }
      }
    }
  }
  return op::AddLayer{};
}

std::string document_hash(const doc::SessionDocument& d, Seq seq) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc::save_document(d, seq)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string first_difference(const Json& a, const Json& b, const std::string& at) {
  if (a.type() != b.type()) return at.empty() ? "/" : at;
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it) {
      const std::string here = at + "/" + it.key();
      if (!b.contains(it.key())) return here;
      if (auto d = first_difference(it.value(), b.at(it.key()), here); !d.empty()) return d;
    }
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (!a.contains(it.key())) return at + "/" + it.key();
    }
    return "";
  }
  if (a.is_array()) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (auto d = first_difference(a[i], b[i], at + "/" + std::to_string(i)); !d.empty()) return d;
    }
    if (a.size() != b.size()) return at + "/" + std::to_string(n);
    return "";
  }
  return a == b ? "" : (at.empty() ? "/" : at);
}

Convergence check_convergence(const doc::SessionDocument& server, Seq serverSeq,
                              const std::vector<const client::LocalStore*>& stores) {
  const std::string want = doc::save_document(server, serverSeq);
  for (std::size_t i = 0; i < stores.size(); ++i) {
    const auto& s = *stores[i];
    if (doc::save_document(s.document, s.lastSeq) == want) continue;
    Json a = doc::document_to_json(server);
    Json b = doc::document_to_json(s.document);
    a["seq"] = serverSeq;
    b["seq"] = s.lastSeq;
    return {false, "client " + std::to_string(i) + ": " + first_difference(a, b)};
  }
  return {};
}

Json report_to_json(const ScenarioReport& r) {
  Json j = Json::object();
  j["converged"] = r.converged;
  j["finalSeq"] = r.finalSeq;
  j["serverHash"] = r.serverHash;
  j["perClientFinalHash"] = r.perClientFinalHash;
  j["rejectedCount"] = Json::object();
  for (const auto& [k, v] : r.rejectedCount) j["rejectedCount"][k] = v;
  j["accepted"] = r.accepted;
  j["rejected"] = r.rejected;
  j["totalIntents"] = r.totalIntents;
  j["maxObservedPropagationMs"] = r.maxObservedPropagationMs;
  j["orderingViolations"] = r.orderingViolations;
  j["divergence"] = r.divergence;
  return j;
}

namespace {

/// Discrete-event world: one server core, N clients, FIFO links with
/// per-message delay, all on one virtual clock.
class World {
 public:
  explicit World(const ScenarioConfig& cfg)
      : cfg_(cfg),
        rng_(cfg.seed ^ 0x9e3779b97f4a7c15ULL),
        delay_(cfg.latencyMin, cfg.latencyMax),
        core_(server::ServerOptions{[this] { return now_; }, cfg.seed + 1, {}}) {
    core_.add_session(std::make_unique<server::Session>(std::string(kSessionId), cfg.sessionTemplate,
                                                        cfg.sessionTemplate, doc::VersionLog{}, nullptr));
    const auto n = static_cast<std::size_t>(cfg.clients);
    links_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      links_[i].world = this;
      links_[i].index = i;
    }
    for (std::size_t i = 0; i < n; ++i) {
      peers_.push_back(std::make_unique<Peer>(links_[i], [this] { return now_; }));
      auto& p = *peers_.back();
      p.client.set_observer([this, i](const client::Notification& note) { observe(i, note); });
    }
  }

  ScenarioReport run(const Schedule& schedule) {
    const auto wallStart = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < peers_.size(); ++i) {
      server::Outbox out;
      core_.connect(conn_of(i), out);
      route(out);
      peers_[i]->client.join(std::string(kSessionId), "sim" + std::to_string(i));
    }
    for (const auto& list : schedule) {
      for (const auto& in : list) {
        push({in.at, Event::Fire, static_cast<std::size_t>(in.client), {}, &in});
        ++report_.totalIntents;
      }
    }
    std::uint64_t steps = 0;
    while (!queue_.empty()) {
      Event ev = queue_.top();
      queue_.pop();
      now_ = ev.t;
      dispatch(ev);
      if (++steps % 1024 == 0) {
        const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - wallStart;
        if (spent.count() > cfg_.wallBoundSeconds) {
          throw Timeout("no quiescence after " + std::to_string(spent.count()) + " s of wall time");
        }
      }
    }
    return finish();
  }

 private:
  struct Event {
    Millis t = 0;
    enum Kind { ToServer, ToClient, Fire } kind = Fire;
    std::size_t client = 0;
    std::string frame;
    const Intent* intent = nullptr;
    std::uint64_t order = 0;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.t != b.t ? a.t > b.t : a.order > b.order;
    }
  };
  struct Link : client::Transport {
    World* world = nullptr;
    std::size_t index = 0;
    Millis upTail = 0, downTail = 0;  // FIFO: never deliver before an earlier frame
    bool is_open() const override { return true; }
    void send(const proto::Message& m) override { world->send_up(index, proto::encode_message(m)); }
  };
  struct Peer {
    client::Client client;
    Seq seen = 0;
    Peer(Link& l, client::Clock c) : client(l, std::move(c)) {}
  };

  static server::ConnId conn_of(std::size_t i) { return i + 1; }

  void push(Event e) {
    e.order = order_++;
    queue_.push(std::move(e));
  }
  Millis hop(Millis& tail) {
    tail = std::max(now_ + delay_(rng_), tail);
    return tail;
  }
  void send_up(std::size_t i, std::string frame) {
    push({hop(links_[i].upTail), Event::ToServer, i, std::move(frame), nullptr});
  }
  void route(server::Outbox& out) {
    for (auto& d : out) {
      const std::size_t i = d.conn - 1;
      push({hop(links_[i].downTail), Event::ToClient, i, proto::encode_message(d.message), nullptr});
    }
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case Event::ToServer: {
        server::Outbox out;
        core_.receive(conn_of(ev.client), ev.frame, out);
        route(out);
        break;
      }
      case Event::ToClient: {
        auto m = proto::decode_message(ev.frame);
        if (!m) throw std::logic_error("server sent an undecodable frame: " + m.error().message());
        auto& p = *peers_[ev.client];
        if (m.value().seq) {
          if (*m.value().seq != p.seen + 1) ++report_.orderingViolations;
          p.seen = *m.value().seq;
          const auto& change = std::get<doc::ChangeMessage>(m.value().body);
          report_.maxObservedPropagationMs = std::max(report_.maxObservedPropagationMs, now_ - change.serverTime.value_or(now_));
        } else if (auto* s = std::get_if<proto::Snapshot>(&m.value().body); s && s->document) {
          p.seen = s->seq;
        }
        p.client.on_server_update(m.value());
        break;
      }
      case Event::Fire: {
        auto& c = peers_[ev.client]->client;
        if (!c.store().identity) {
          push({now_ + 1, Event::Fire, ev.client, {}, ev.intent});
          break;
        }
        c.submit_change(resolve_intent(*ev.intent, c.store().document));
        break;
      }
    }
  }

  void observe(std::size_t i, const client::Notification& n) {
    const auto& self = peers_[i]->client.store().identity;
    if (n.kind == client::Notification::Kind::Applied && self && n.clientId == self->clientId) ++report_.accepted;
    if (n.kind == client::Notification::Kind::Rejected) {
      ++report_.rejected;
      ++report_.rejectedCount[n.reason];
    }
  }

  ScenarioReport finish() {
    const server::Session& s = *core_.find_session(kSessionId);
    report_.finalSeq = s.head();
    report_.finalDocument = s.document();
    report_.serverHash = document_hash(s.document(), s.head());
    std::vector<const client::LocalStore*> stores;
    bool idle = true;
    for (const auto& p : peers_) {
      stores.push_back(&p->client.store());
      report_.perClientFinalHash.push_back(document_hash(p->client.store().document, p->client.store().lastSeq));
      std::vector<std::string> order;
      for (const auto& l : p->client.store().document.layers) order.push_back(l.id);
      report_.clientLayerOrder.push_back(std::move(order));
      idle = idle && p->client.pending().empty();
    }
    const Convergence c = check_convergence(s.document(), s.head(), stores);
    report_.converged = c.converged && idle;
    report_.divergence = c.converged && !idle ? "pending changes never resolved" : c.diff;
    return report_;
  }

  const ScenarioConfig& cfg_;
  std::mt19937_64 rng_;
  std::uniform_int_distribution<Millis> delay_;
  Millis now_ = 0;
  server::Server core_;
  std::vector<Link> links_;
  std::vector<std::unique_ptr<Peer>> peers_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t order_ = 0;
  ScenarioReport report_;
};

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& config, const Schedule& schedule) {
  config.validate();
  World world(config);
  if (!schedule.empty()) return world.run(schedule);
  return world.run(generate_ops(config));
}

}  // namespace colier::sim
