#include "colier/protocol/codec.hpp"

#include <array>
#include <cmath>

#include "colier/document/serialization.hpp"

namespace colier::proto {
namespace {

using Kind = DecodeError::Kind;

// Internal unwinding only; decode_message converts it to a Result.
struct Fail {
  DecodeError error;
};

[[noreturn]] void missing(std::string field) { throw Fail{{Kind::MissingField, std::move(field)}}; }
[[noreturn]] void bad(std::string field) { throw Fail{{Kind::BadValue, std::move(field)}}; }

const Json* find(const Json& obj, std::string_view key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const Json& need(const Json& obj, std::string_view key) {
  const Json* v = find(obj, key);
  if (!v) missing(std::string(key));
  return *v;
}

std::string read_string(const Json& obj, std::string_view key) {
  const Json& v = need(obj, key);
  if (!v.is_string()) bad(std::string(key));
  return v.get<std::string>();
}

std::optional<std::string> opt_string(const Json& obj, std::string_view key) {
  const Json* v = find(obj, key);
  if (!v || v->is_null()) return std::nullopt;
  if (!v->is_string()) bad(std::string(key));
  return v->get<std::string>();
}

double real_of(const Json& v, const std::string& field) {
  if (!v.is_number() && !v.is_string()) bad(field);
  auto d = json_as_real(v);
  if (!d) bad(field);
  return *d;
}

double read_real(const Json& obj, std::string_view key) { return real_of(need(obj, key), std::string(key)); }

std::optional<double> opt_real(const Json& obj, std::string_view key) {
  const Json* v = find(obj, key);
  if (!v || v->is_null()) return std::nullopt;
  return real_of(*v, std::string(key));
}

std::int64_t int_of(const Json& v, const std::string& field) {
  if (!v.is_number() && !v.is_string()) bad(field);
  auto i = json_as_int(v);
  if (!i) bad(field);
  return *i;
}

std::int64_t read_int(const Json& obj, std::string_view key) { return int_of(need(obj, key), std::string(key)); }

std::int64_t read_nonneg(const Json& obj, std::string_view key) {
  auto v = read_int(obj, key);
  if (v < 0) bad(std::string(key));
  return v;
}

std::optional<std::int64_t> opt_nonneg(const Json& obj, std::string_view key) {
  const Json* v = find(obj, key);
  if (!v || v->is_null()) return std::nullopt;
  auto i = int_of(*v, std::string(key));
  if (i < 0) bad(std::string(key));
  return i;
}

bool read_bool(const Json& obj, std::string_view key) {
  const Json& v = need(obj, key);
  if (!v.is_boolean()) bad(std::string(key));
  return v.get<bool>();
}

std::optional<bool> opt_bool(const Json& obj, std::string_view key) {
  const Json* v = find(obj, key);
  if (!v || v->is_null()) return std::nullopt;
  if (!v->is_boolean()) bad(std::string(key));
  return v->get<bool>();
}

Color read_color(const Json& obj, std::string_view key) {
  auto c = Color::parse(read_string(obj, key));
  if (!c) bad(std::string(key));
  return *c;
}

std::vector<doc::PathCommand> read_path(const Json& obj) {
  const Json& p = need(obj, "path");
  if (!p.is_array() || p.empty()) bad("path");
  std::vector<doc::PathCommand> path;
  path.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::string field = "path[" + std::to_string(i) + "]";
    const Json& c = p[i];
    if (!c.is_array() || c.empty() || !c[0].is_string()) bad(field);
    auto verb = doc::verb_from_char(c[0].get_ref<const std::string&>());
    if (!verb || c.size() != static_cast<std::size_t>(doc::verb_arity(*verb)) + 1) bad(field);
    if (i == 0 && *verb != doc::PathVerb::MoveTo) bad(field);
    doc::PathCommand cmd;
    cmd.verb = *verb;
    for (int k = 0; k < doc::verb_arity(*verb); ++k) cmd.coords[k] = real_of(c[k + 1], field);
    path.push_back(cmd);
  }
  return path;
}

using ParamMap = std::map<std::string, double, std::less<>>;

// `effect` restricts names to that effect; otherwise any known name passes.
ParamMap read_params(const Json& obj, bool required, std::optional<doc::Effect> effect) {
  const Json* p = find(obj, "params");
  if (!p || p->is_null()) {
    if (required) missing("params");
    return {};
  }
  if (!p->is_object()) bad("params");
  ParamMap out;
  for (const auto& [name, value] : p->items()) {
    const std::string field = "params." + name;
    const doc::ParamSpec* spec = effect ? doc::find_param(*effect, name) : doc::find_param(name);
    if (!spec) bad(field);
    double v = real_of(value, field);
    if (!doc::param_in_range(*spec, v)) bad(field);
    out[name] = v;
  }
  return out;
}

// ---- mutation payloads --------------------------------------------------------

doc::ChangeMessage change_header(const Json& p) {
  doc::ChangeMessage c;
  c.timeStamp = read_nonneg(p, "timeStamp");
  c.clientId = opt_string(p, "clientId").value_or("");
  return c;
}

template <class Op>
Body with_layer(const Json& p) {
  auto c = change_header(p);
  Op o;
  o.layerId = read_string(p, "layerId");
  c.mutation = std::move(o);
  return c;
}

Body d_add_layer(const Json& p) {
  auto c = change_header(p);
  c.mutation = doc::op::AddLayer{opt_string(p, "name"), opt_string(p, "asset")};
  return c;
}

Body d_reorder_layer(const Json& p) {
  auto c = change_header(p);
  c.mutation = doc::op::ReorderLayer{read_string(p, "layerId"), read_nonneg(p, "toIndex")};
  return c;
}

Body d_update_layer(const Json& p) {
  auto c = change_header(p);
  doc::op::UpdateLayer u;
  u.layerId = read_string(p, "layerId");
  u.visible = opt_bool(p, "visible");
  u.opacity = opt_real(p, "opacity");
  if (u.opacity && (*u.opacity < 0.0 || *u.opacity > 1.0)) bad("opacity");
  u.name = opt_string(p, "name");
  u.tx = opt_real(p, "tx");
  u.ty = opt_real(p, "ty");
  u.rotation = opt_real(p, "rotation");
  u.scaleX = opt_real(p, "scaleX");
  u.scaleY = opt_real(p, "scaleY");
  c.mutation = std::move(u);
  return c;
}

Body d_new_path(const Json& p) {
  auto c = change_header(p);
  doc::op::NewPath n;
  // Absent on frames from clients that draw on their selected layer.
  n.layerId = opt_string(p, "layerId").value_or("");
  n.color = read_color(p, "color");
  n.width = read_real(p, "width");
  if (!(n.width > 0.0)) bad("width");
  n.path = read_path(p);
  c.mutation = std::move(n);
  return c;
}

Body d_add_vca(const Json& p) {
  auto c = change_header(p);
  doc::op::AddVca a;
  a.layerId = read_string(p, "layerId");
  auto effect = doc::effect_from_name(read_string(p, "effect"));
  if (!effect) bad("effect");
  a.effect = *effect;
  a.enabled = opt_bool(p, "enabled");
  a.params = read_params(p, false, a.effect);
  c.mutation = std::move(a);
  return c;
}

Body d_remove_vca(const Json& p) {
  auto c = change_header(p);
  c.mutation = doc::op::RemoveVca{read_string(p, "layerId"), read_string(p, "vcaId")};
  return c;
}

Body d_reorder_vca(const Json& p) {
  auto c = change_header(p);
  c.mutation = doc::op::ReorderVca{read_string(p, "layerId"), read_string(p, "vcaId"), read_nonneg(p, "toIndex")};
  return c;
}

Body d_update_param(const Json& p) {
  auto c = change_header(p);
  doc::op::UpdateVcaParams u;
  u.layerId = read_string(p, "layerId");
  u.vcaId = read_string(p, "vcaId");
  u.params = read_params(p, true, std::nullopt);
  c.mutation = std::move(u);
  return c;
}

Body d_set_enabled(const Json& p) {
  auto c = change_header(p);
  c.mutation = doc::op::SetVcaEnabled{read_string(p, "layerId"), read_string(p, "vcaId"), read_bool(p, "enabled")};
  return c;
}

// ---- session ----------------------------------------------------------------------

PeerInfo read_peer(const Json& p) {
  PeerInfo info;
  info.clientId = read_string(p, "clientId");
  info.color = read_color(p, "color");
  info.username = opt_string(p, "username").value_or("");
  info.connected = opt_bool(p, "connected").value_or(true);
  return info;
}

const Json& read_array(const Json& p, std::string_view key) {
  const Json& a = need(p, key);
  if (!a.is_array()) bad(std::string(key));
  return a;
}

Body d_list(const Json&) { return ListSessions{}; }

Body d_overview(const Json& p) {
  Overview o;
  const Json& arr = read_array(p, "sessions");
  for (const auto& s : arr) {
    if (!s.is_object()) bad("sessions");
    o.sessions.push_back({read_string(s, "sessionId"), read_string(s, "name"), read_nonneg(s, "activeClients")});
  }
  return o;
}

Body d_join(const Json& p) {
  return Join{read_string(p, "sessionId"), opt_string(p, "clientId"), opt_string(p, "username")};
}

Body d_joined(const Json& p) {
  Joined j;
  j.sessionId = read_string(p, "sessionId");
  for (const auto& c : read_array(p, "clients")) {
    if (!c.is_object()) bad("clients");
    j.clients.push_back(read_peer(c));
  }
  return j;
}

Body d_snapshot(const Json& p) {
  Snapshot s;
  s.seq = static_cast<Seq>(opt_nonneg(p, "seq").value_or(0));
  const Json* d = find(p, "document");
  if (d && !d->is_null()) {
    try {
      s.document = doc::document_from_json(*d);
    } catch (const doc::FormatError& e) {
      bad("document" + e.where());
    } catch (const doc::UnsupportedVersion&) {
      bad("document/meta/version");
    }
  }
  return s;
}

Body d_client_joined(const Json& p) { return ClientJoined{read_peer(p)}; }
Body d_client_left(const Json& p) { return ClientLeft{read_string(p, "clientId")}; }
Body d_identity(const Json& p) { return Identity{read_string(p, "clientId"), read_color(p, "color")}; }

Body d_rejected(const Json& p) {
  Rejected r;
  r.refTimeStamp = opt_nonneg(p, "refTimeStamp");
  if (auto s = opt_nonneg(p, "refSeq")) r.refSeq = static_cast<Seq>(*s);
  r.reason = read_string(p, "reason");
  r.detail = opt_string(p, "detail").value_or("");
  return r;
}

Body d_unlock_notice(const Json& p) {
  return ExclusiveUnlockNotice{read_string(p, "layerId"), read_string(p, "owner"), read_string(p, "by"),
                               read_nonneg(p, "serverTime")};
}

// ---- presence / chat / history ------------------------------------------------------

Body d_cursor(const Json& p) {
  return Cursor{opt_string(p, "clientId").value_or(""), read_nonneg(p, "timeStamp"), read_real(p, "x"),
                read_real(p, "y")};
}

Body d_select_layer(const Json& p) {
  return SelectLayer{opt_string(p, "clientId").value_or(""), read_nonneg(p, "timeStamp"), opt_string(p, "layerId")};
}

Body d_select_vca(const Json& p) {
  return SelectVca{opt_string(p, "clientId").value_or(""), read_nonneg(p, "timeStamp"), opt_string(p, "layerId"),
                   opt_string(p, "vcaId")};
}

Body d_select_tool(const Json& p) {
  auto tool = read_string(p, "tool");
  if (tool.empty() || tool.size() > 64) bad("tool");
  return SelectTool{opt_string(p, "clientId").value_or(""), read_nonneg(p, "timeStamp"), std::move(tool)};
}

Body d_chat_post(const Json& p) {
  return ChatPost{opt_string(p, "clientId").value_or(""), read_nonneg(p, "timeStamp"), read_string(p, "text")};
}

Body d_chat_posted(const Json& p) {
  ChatPosted c;
  c.clientId = read_string(p, "clientId");
  c.timeStamp = read_nonneg(p, "timeStamp");
  c.serverTime = read_nonneg(p, "serverTime");
  c.text = read_string(p, "text");
  return c;
}

Body d_history_list(const Json& p) {
  HistoryList h;
  h.from = static_cast<Seq>(opt_nonneg(p, "from").value_or(1));
  if (auto to = opt_nonneg(p, "to")) h.to = static_cast<Seq>(*to);
  return h;
}

Message decode_envelope(const Json& j);

Body d_history_entries(const Json& p) {
  HistoryEntries h;
  const Json& arr = read_array(p, "entries");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Message m;
    try {
      m = decode_envelope(arr[i]);
    } catch (const Fail& f) {
      bad("entries[" + std::to_string(i) + "]." + f.error.field);
    }
    auto* change = std::get_if<doc::ChangeMessage>(&m.body);
    if (!change || !m.seq) bad("entries[" + std::to_string(i) + "]");
    h.entries.push_back({*m.seq, std::move(*change)});
  }
  return h;
}

struct Entry {
  RegistryEntry info;
  Body (*decode)(const Json&);
};

const std::array<Entry, 34> kRegistry{{
    {{"session", "list", false}, d_list},
    {{"session", "join", false}, d_join},
    {{"session", "joined", true}, d_joined},
    {{"session", "overview", true}, d_overview},
    {{"session", "snapshot", false}, d_snapshot},
    {{"session", "clientJoined", true}, d_client_joined},
    {{"session", "clientLeft", true}, d_client_left},
    {{"session", "identity", true}, d_identity},
    {{"session", "rejected", true}, d_rejected},
    {{"drawing", "newPath", false}, d_new_path},
    {{"drawing", "undoPath", false}, with_layer<doc::op::UndoPath>},
    {{"drawing", "redoPath", false}, with_layer<doc::op::RedoPath>},
    {{"layer", "add", false}, d_add_layer},
    {{"layer", "delete", false}, with_layer<doc::op::DeleteLayer>},
    {{"layer", "reorder", false}, d_reorder_layer},
    {{"layer", "updateProperty", false}, d_update_layer},
    {{"layer", "lock", false}, with_layer<doc::op::Lock>},
    {{"layer", "unlock", false}, with_layer<doc::op::Unlock>},
    {{"layer", "exclusiveLock", false}, with_layer<doc::op::ExclusiveLock>},
    {{"layer", "exclusiveUnlock", false}, with_layer<doc::op::ExclusiveUnlock>},
    {{"layer", "exclusiveUnlockNotice", true}, d_unlock_notice},
    {{"pipeline", "addVca", false}, d_add_vca},
    {{"pipeline", "removeVca", false}, d_remove_vca},
    {{"pipeline", "reorderVca", false}, d_reorder_vca},
    {{"pipeline", "updateParam", false}, d_update_param},
    {{"pipeline", "setEnabled", false}, d_set_enabled},
    {{"presence", "cursor", false}, d_cursor},
    {{"presence", "selectLayer", false}, d_select_layer},
    {{"presence", "selectVca", false}, d_select_vca},
    {{"presence", "selectTool", false}, d_select_tool},
    {{"chat", "post", false}, d_chat_post},
    {{"chat", "posted", true}, d_chat_posted},
    {{"history", "list", false}, d_history_list},
    {{"history", "entries", true}, d_history_entries},
}};

constexpr std::size_t kPublicEntries = kRegistry.size();

const Entry* lookup(std::string_view module, std::string_view action) {
  for (std::size_t i = 0; i < kPublicEntries; ++i) {
    if (kRegistry[i].info.module == module && kRegistry[i].info.action == action) return &kRegistry[i];
  }
  return nullptr;
}

bool known_module(std::string_view module) {
  for (std::size_t i = 0; i < kPublicEntries; ++i) {
    if (kRegistry[i].info.module == module) return true;
  }
  return false;
}

Message decode_envelope(const Json& j) {
  if (!j.is_object()) bad("frame");
  const Json& module = need(j, "module");
  if (!module.is_string()) bad("module");
  const auto& module_name = module.get_ref<const std::string&>();
  if (!known_module(module_name)) throw Fail{{Kind::UnknownModule, module_name}};
  const Json& message = need(j, "message");
  if (!message.is_object() || message.size() != 1) bad("message");
  const auto& [action, payload] = *message.items().begin();
  const Entry* entry = lookup(module_name, action);
  if (!entry) throw Fail{{Kind::UnknownAction, module_name + "/" + action}};
  if (!payload.is_object()) bad(action);

  Message out;
  out.body = entry->decode(payload);
  if (auto seq = opt_nonneg(j, "seq")) {
    if (*seq < 1 || !is_mutation(out.body)) bad("seq");
    out.seq = static_cast<Seq>(*seq);
  }
  if (auto st = opt_nonneg(j, "serverTime")) {
    auto* change = std::get_if<doc::ChangeMessage>(&out.body);
    if (!change) bad("serverTime");
    change->serverTime = *st;
  }
  return out;
}

// ---- encoding ------------------------------------------------------------------------

Json num(double v) { return format_real(v); }
Json num(std::int64_t v) { return format_int(v); }
Json num(Seq v) { return std::to_string(v); }

Json params_json(const ParamMap& params) {
  Json j = Json::object();
  for (const auto& [name, value] : params) j[name] = num(value);
  return j;
}

struct PayloadEncoder {
  Json& p;

  void operator()(const doc::op::AddLayer& m) {
    if (m.name) p["name"] = *m.name;
    if (m.asset) p["asset"] = *m.asset;
  }
  void operator()(const doc::op::ReorderLayer& m) {
    p["layerId"] = m.layerId;
    p["toIndex"] = num(m.toIndex);
  }
  void operator()(const doc::op::UpdateLayer& m) {
    p["layerId"] = m.layerId;
    if (m.visible) p["visible"] = *m.visible;
    if (m.opacity) p["opacity"] = num(*m.opacity);
    if (m.name) p["name"] = *m.name;
    if (m.tx) p["tx"] = num(*m.tx);
    if (m.ty) p["ty"] = num(*m.ty);
    if (m.rotation) p["rotation"] = num(*m.rotation);
    if (m.scaleX) p["scaleX"] = num(*m.scaleX);
    if (m.scaleY) p["scaleY"] = num(*m.scaleY);
  }
  void operator()(const doc::op::NewPath& m) {
    if (!m.layerId.empty()) p["layerId"] = m.layerId;
    p["color"] = m.color.hex();
    p["width"] = num(m.width);
    p["path"] = doc::path_to_json(m.path);
  }
  void operator()(const doc::op::AddVca& m) {
    p["layerId"] = m.layerId;
    p["effect"] = std::string(doc::effect_name(m.effect));
    if (m.enabled) p["enabled"] = *m.enabled;
    if (!m.params.empty()) p["params"] = params_json(m.params);
  }
  void operator()(const doc::op::RemoveVca& m) {
    p["layerId"] = m.layerId;
    p["vcaId"] = m.vcaId;
  }
  void operator()(const doc::op::ReorderVca& m) {
    p["layerId"] = m.layerId;
    p["vcaId"] = m.vcaId;
    p["toIndex"] = num(m.toIndex);
  }
  void operator()(const doc::op::UpdateVcaParams& m) {
    p["layerId"] = m.layerId;
    p["vcaId"] = m.vcaId;
    p["params"] = params_json(m.params);
  }
  void operator()(const doc::op::SetVcaEnabled& m) {
    p["layerId"] = m.layerId;
    p["vcaId"] = m.vcaId;
    p["enabled"] = m.enabled;
  }
  // delete, lock, unlock, exclusive*, undo, redo
  template <class Op>
  void operator()(const Op& m) {
    p["layerId"] = m.layerId;
  }
};

Json peer_json(const PeerInfo& info) {
  return Json{{"clientId", info.clientId},
              {"color", info.color.hex()},
              {"username", info.username},
              {"connected", info.connected}};
}

struct BodyEncoder {
  Json operator()(const doc::ChangeMessage& c) {
    Json p;
    p["timeStamp"] = num(c.timeStamp);
    p["clientId"] = c.clientId;
    std::visit(PayloadEncoder{p}, c.mutation);
    return p;
  }
  Json operator()(const ListSessions&) { return Json::object(); }
  Json operator()(const Overview& o) {
    Json arr = Json::array();
    for (const auto& s : o.sessions) {
      arr.push_back(Json{{"sessionId", s.sessionId}, {"name", s.name}, {"activeClients", num(s.activeClients)}});
    }
    return Json{{"sessions", std::move(arr)}};
  }
  Json operator()(const Join& j) {
    Json p{{"sessionId", j.sessionId}};
    if (j.clientId) p["clientId"] = *j.clientId;
    if (j.username) p["username"] = *j.username;
    return p;
  }
  Json operator()(const Joined& j) {
    Json arr = Json::array();
    for (const auto& c : j.clients) arr.push_back(peer_json(c));
    return Json{{"sessionId", j.sessionId}, {"clients", std::move(arr)}};
  }
  Json operator()(const Snapshot& s) {
    Json p = Json::object();
    if (s.document) {
      p["seq"] = num(s.seq);
      p["document"] = doc::document_to_json(*s.document);
    }
    return p;
  }
  Json operator()(const ClientJoined& c) { return peer_json(c.client); }
  Json operator()(const ClientLeft& c) { return Json{{"clientId", c.clientId}}; }
  Json operator()(const Identity& i) { return Json{{"clientId", i.clientId}, {"color", i.color.hex()}}; }
  Json operator()(const Rejected& r) {
    Json p = Json::object();
    if (r.refTimeStamp) p["refTimeStamp"] = num(*r.refTimeStamp);
    if (r.refSeq) p["refSeq"] = num(*r.refSeq);
    p["reason"] = r.reason;
    if (!r.detail.empty()) p["detail"] = r.detail;
    return p;
  }
  Json operator()(const ExclusiveUnlockNotice& n) {
    return Json{{"layerId", n.layerId}, {"owner", n.owner}, {"by", n.by}, {"serverTime", num(n.serverTime)}};
  }
  Json operator()(const Cursor& c) {
    return Json{{"timeStamp", num(c.timeStamp)}, {"clientId", c.clientId}, {"x", num(c.x)}, {"y", num(c.y)}};
  }
  Json operator()(const SelectLayer& s) {
    Json p{{"timeStamp", num(s.timeStamp)}, {"clientId", s.clientId}};
    p["layerId"] = s.layerId ? Json(*s.layerId) : Json(nullptr);
    return p;
  }
  Json operator()(const SelectVca& s) {
    Json p{{"timeStamp", num(s.timeStamp)}, {"clientId", s.clientId}};
    p["layerId"] = s.layerId ? Json(*s.layerId) : Json(nullptr);
    p["vcaId"] = s.vcaId ? Json(*s.vcaId) : Json(nullptr);
    return p;
  }
  Json operator()(const SelectTool& s) {
    return Json{{"timeStamp", num(s.timeStamp)}, {"clientId", s.clientId}, {"tool", s.tool}};
  }
  Json operator()(const ChatPost& c) {
    return Json{{"timeStamp", num(c.timeStamp)}, {"clientId", c.clientId}, {"text", c.text}};
  }
  Json operator()(const ChatPosted& c) {
    return Json{{"timeStamp", num(c.timeStamp)},
                {"clientId", c.clientId},
                {"serverTime", num(c.serverTime)},
                {"text", c.text}};
  }
  Json operator()(const HistoryList& h) {
    Json p{{"from", num(h.from)}};
    if (h.to) p["to"] = num(*h.to);
    return p;
  }
  Json operator()(const HistoryEntries& h) {
    Json arr = Json::array();
    for (const auto& e : h.entries) arr.push_back(encode_message_json(sequenced(e)));
    return Json{{"entries", std::move(arr)}};
  }
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Message sequenced(const doc::SequencedEvent& ev) { return Message{ev.seq, ev.change}; }

std::string_view module_of(const Body& b) {
  return std::visit(overloaded{
                        [](const doc::ChangeMessage& c) { return doc::module_of(c.mutation); },
                        [](const ExclusiveUnlockNotice&) -> std::string_view { return "layer"; },
                        [](const Cursor&) -> std::string_view { return "presence"; },
                        [](const SelectLayer&) -> std::string_view { return "presence"; },
                        [](const SelectVca&) -> std::string_view { return "presence"; },
                        [](const SelectTool&) -> std::string_view { return "presence"; },
                        [](const ChatPost&) -> std::string_view { return "chat"; },
                        [](const ChatPosted&) -> std::string_view { return "chat"; },
                        [](const HistoryList&) -> std::string_view { return "history"; },
                        [](const HistoryEntries&) -> std::string_view { return "history"; },
                        [](const auto&) -> std::string_view { return "session"; },
                    },
                    b);
}

std::string_view action_of(const Body& b) {
  return std::visit(overloaded{
                        [](const doc::ChangeMessage& c) { return doc::action_of(c.mutation); },
                        [](const ListSessions&) -> std::string_view { return "list"; },
                        [](const Overview&) -> std::string_view { return "overview"; },
                        [](const Join&) -> std::string_view { return "join"; },
                        [](const Joined&) -> std::string_view { return "joined"; },
                        [](const Snapshot&) -> std::string_view { return "snapshot"; },
                        [](const ClientJoined&) -> std::string_view { return "clientJoined"; },
                        [](const ClientLeft&) -> std::string_view { return "clientLeft"; },
                        [](const Identity&) -> std::string_view { return "identity"; },
                        [](const Rejected&) -> std::string_view { return "rejected"; },
                        [](const ExclusiveUnlockNotice&) -> std::string_view { return "exclusiveUnlockNotice"; },
                        [](const Cursor&) -> std::string_view { return "cursor"; },
                        [](const SelectLayer&) -> std::string_view { return "selectLayer"; },
                        [](const SelectVca&) -> std::string_view { return "selectVca"; },
                        [](const SelectTool&) -> std::string_view { return "selectTool"; },
                        [](const ChatPost&) -> std::string_view { return "post"; },
                        [](const ChatPosted&) -> std::string_view { return "posted"; },
                        [](const HistoryList&) -> std::string_view { return "list"; },
                        [](const HistoryEntries&) -> std::string_view { return "entries"; },
                    },
                    b);
}

std::string DecodeError::message() const {
  switch (kind) {
    case Kind::UnknownModule: return "UnknownModule(" + field + ")";
    case Kind::UnknownAction: return "UnknownAction(" + field + ")";
    case Kind::MissingField: return "MissingField(" + field + ")";
    case Kind::BadValue: return "BadValue(" + field + ")";
  }
  return "BadValue(" + field + ")";
}

std::span<const RegistryEntry> registry() {
  static const auto table = [] {
    std::array<RegistryEntry, kPublicEntries> t{};
    for (std::size_t i = 0; i < kPublicEntries; ++i) t[i] = kRegistry[i].info;
    return t;
  }();
  return table;
}

const RegistryEntry* find_action(std::string_view module, std::string_view action) {
  const Entry* e = lookup(module, action);
  return e ? &e->info : nullptr;
}

Result<Message, DecodeError> decode_message_json(const Json& envelope) {
  try {
    return decode_envelope(envelope);
  } catch (const Fail& f) {
    return f.error;
  } catch (const std::exception&) {
    return DecodeError{Kind::BadValue, "frame"};
  }
}

Result<Message, DecodeError> decode_message(std::string_view frame) {
  if (frame.size() > kMaxFrameBytes) return DecodeError{Kind::BadValue, "frame"};
  Json j = Json::parse(frame, nullptr, false);
  if (j.is_discarded()) return DecodeError{Kind::BadValue, "frame"};
  return decode_message_json(j);
}

Json encode_message_json(const Message& m) {
  Json j;
  j["module"] = std::string(module_of(m.body));
  if (m.seq) j["seq"] = num(*m.seq);
  if (const auto* c = std::get_if<doc::ChangeMessage>(&m.body); c && c->serverTime) {
    j["serverTime"] = num(*c->serverTime);
  }
  Json message;
  message[std::string(action_of(m.body))] = std::visit(BodyEncoder{}, m.body);
  j["message"] = std::move(message);
  return j;
}

std::string encode_message(const Message& m) { return encode_message_json(m).dump(); }

Result<Unit, DecodeError> validate_payload(std::string_view module, std::string_view action,
                                           const Json& payload) {
  if (!known_module(module)) return DecodeError{Kind::UnknownModule, std::string(module)};
  const Entry* entry = lookup(module, action);
  if (!entry) return DecodeError{Kind::UnknownAction, std::string(module) + "/" + std::string(action)};
  if (!payload.is_object()) return DecodeError{Kind::BadValue, std::string(action)};
  try {
    (void)entry->decode(payload);
  } catch (const Fail& f) {
    return f.error;
  } catch (const std::exception&) {
    return DecodeError{Kind::BadValue, std::string(action)};
  }
  return Unit{};
}

}  // namespace colier::proto
