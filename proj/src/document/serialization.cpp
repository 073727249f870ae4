#include "colier/document/serialization.hpp"

#include <cmath>
#include <set>

namespace colier::doc {
namespace {

std::string child(const std::string& at, std::string_view key) { return at + "/" + std::string(key); }
std::string child(const std::string& at, std::size_t i) { return at + "/" + std::to_string(i); }

const Json& require(const Json& obj, std::string_view key, const std::string& at) {
  if (!obj.is_object()) throw FormatError(at.empty() ? "/" : at, "expected object");
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(child(at, key), "missing field \"" + std::string(key) + "\"");
  return *it;
}

std::string read_string(const Json& obj, std::string_view key, const std::string& at) {
  const Json& v = require(obj, key, at);
  if (!v.is_string()) throw FormatError(child(at, key), "expected string");
  return v.get<std::string>();
}

bool read_bool(const Json& obj, std::string_view key, const std::string& at) {
  const Json& v = require(obj, key, at);
  if (!v.is_boolean()) throw FormatError(child(at, key), "expected boolean");
  return v.get<bool>();
}

double read_real(const Json& obj, std::string_view key, const std::string& at) {
  const Json& v = require(obj, key, at);
  if (!v.is_number()) throw FormatError(child(at, key), "expected number");
  auto d = json_as_real(v);
  if (!d) throw FormatError(child(at, key), "expected finite number");
  return *d;
}

std::int64_t read_int(const Json& obj, std::string_view key, const std::string& at) {
  const Json& v = require(obj, key, at);
  if (!v.is_number()) throw FormatError(child(at, key), "expected integer");
  auto i = json_as_int(v);
  if (!i) throw FormatError(child(at, key), "expected integer");
  return *i;
}

const Json& read_array(const Json& obj, std::string_view key, const std::string& at) {
  const Json& v = require(obj, key, at);
  if (!v.is_array()) throw FormatError(child(at, key), "expected array");
  return v;
}

Json vca_to_json(const VcaInstance& v) {
  Json j;
  j["vcaId"] = v.id;
  j["effect"] = std::string(effect_name(v.effect));
  j["enabled"] = v.enabled;
  Json params = Json::object();
  for (const auto& p : effect_spec(v.effect).params) params[std::string(p.name)] = json_real(v.param(p.name));
  j["params"] = std::move(params);
  return j;
}

Json layer_to_json(const Layer& l) {
  Json j;
  j["id"] = l.id;
  j["name"] = l.name;
  j["visible"] = l.visible;
  j["locked"] = l.locked;
  if (l.exclusiveLock) {
    j["exclusiveLock"] = Json{{"owner", l.exclusiveLock->owner}, {"since", l.exclusiveLock->since}};
  } else {
    j["exclusiveLock"] = nullptr;
  }
  j["transform"] = Json{{"tx", json_real(l.transform.tx)},
                        {"ty", json_real(l.transform.ty)},
                        {"rotation", json_real(l.transform.rotation)},
                        {"scaleX", json_real(l.transform.scaleX)},
                        {"scaleY", json_real(l.transform.scaleY)}};
  j["opacity"] = json_real(l.opacity);
  j["asset"] = l.asset ? Json(*l.asset) : Json(nullptr);
  Json strokes = Json::array();
  for (const auto& s : l.strokes) strokes.push_back(stroke_to_json(s));
  j["strokes"] = std::move(strokes);
  Json pipeline = Json::array();
  for (const auto& v : l.pipeline) pipeline.push_back(vca_to_json(v));
  j["pipeline"] = std::move(pipeline);
  return j;
}

Color read_color(const Json& obj, std::string_view key, const std::string& at) {
  auto c = Color::parse(read_string(obj, key, at));
  if (!c) throw FormatError(child(at, key), "expected #RRGGBB color");
  return *c;
}

Stroke stroke_from_json(const Json& j, const std::string& at) {
  Stroke s;
  s.id = read_string(j, "strokeId", at);
  s.clientId = read_string(j, "clientId", at);
  s.timeStamp = read_int(j, "timeStamp", at);
  s.color = read_color(j, "color", at);
  s.width = read_real(j, "width", at);
  if (!(s.width > 0.0)) throw FormatError(child(at, "width"), "must be > 0");
  s.path = path_from_json(require(j, "path", at), child(at, "path"));
  s.undone = read_bool(j, "undone", at);
  auto rank = read_int(j, "undoRank", at);
  if (rank < 0 || rank > UINT32_MAX || (rank == 0) == s.undone) {
    throw FormatError(child(at, "undoRank"), "inconsistent with undone flag");
  }
  s.undoRank = static_cast<std::uint32_t>(rank);
  return s;
}

VcaInstance vca_from_json(const Json& j, const std::string& at) {
  VcaInstance v;
  v.id = read_string(j, "vcaId", at);
  auto effect = effect_from_name(read_string(j, "effect", at));
  if (!effect) throw FormatError(child(at, "effect"), "unknown effect");
  v = make_vca(v.id, *effect);
  v.enabled = read_bool(j, "enabled", at);
  const Json& params = require(j, "params", at);
  if (!params.is_object()) throw FormatError(child(at, "params"), "expected object");
  for (const auto& [name, value] : params.items()) {
    const ParamSpec* spec = find_param(*effect, name);
    const auto where = child(child(at, "params"), name);
    if (!spec) throw FormatError(where, "unknown parameter");
    auto d = value.is_number() ? json_as_real(value) : std::nullopt;
    if (!d || !param_in_range(*spec, *d)) throw FormatError(where, "out of range");
    v.params[name] = *d;
  }
  return v;
}

Layer layer_from_json(const Json& j, const std::string& at) {
  Layer l;
  l.id = read_string(j, "id", at);
  l.name = read_string(j, "name", at);
  l.visible = read_bool(j, "visible", at);
  l.locked = read_bool(j, "locked", at);
  const Json& ex = require(j, "exclusiveLock", at);
  if (!ex.is_null()) {
    const auto exat = child(at, "exclusiveLock");
    l.exclusiveLock = ExclusiveLockInfo{read_string(ex, "owner", exat), read_int(ex, "since", exat)};
  }
  const Json& t = require(j, "transform", at);
  const auto tat = child(at, "transform");
  l.transform.tx = read_real(t, "tx", tat);
  l.transform.ty = read_real(t, "ty", tat);
  l.transform.rotation = read_real(t, "rotation", tat);
  if (l.transform.rotation < 0.0 || l.transform.rotation >= 360.0) {
    throw FormatError(child(tat, "rotation"), "must be in [0, 360)");
  }
  l.transform.scaleX = read_real(t, "scaleX", tat);
  l.transform.scaleY = read_real(t, "scaleY", tat);
  if (l.transform.scaleX < kMinScale) throw FormatError(child(tat, "scaleX"), "must be >= 0.001");
  if (l.transform.scaleY < kMinScale) throw FormatError(child(tat, "scaleY"), "must be >= 0.001");
  l.opacity = read_real(j, "opacity", at);
  if (l.opacity < 0.0 || l.opacity > 1.0) throw FormatError(child(at, "opacity"), "must be in [0, 1]");
  const Json& asset = require(j, "asset", at);
  if (asset.is_string()) {
    l.asset = asset.get<std::string>();
  } else if (!asset.is_null()) {
    throw FormatError(child(at, "asset"), "expected string or null");
  }
  const Json& strokes = read_array(j, "strokes", at);
  for (std::size_t i = 0; i < strokes.size(); ++i) {
    l.strokes.push_back(stroke_from_json(strokes[i], child(child(at, "strokes"), i)));
  }
  const Json& pipeline = read_array(j, "pipeline", at);
  for (std::size_t i = 0; i < pipeline.size(); ++i) {
    l.pipeline.push_back(vca_from_json(pipeline[i], child(child(at, "pipeline"), i)));
  }
  return l;
}

}  // namespace

Json path_to_json(const std::vector<PathCommand>& path) {
  Json out = Json::array();
  for (const auto& cmd : path) {
    Json c = Json::array();
    c.push_back(std::string(1, static_cast<char>(cmd.verb)));
    for (int k = 0; k < verb_arity(cmd.verb); ++k) c.push_back(json_real(cmd.coords[k]));
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<PathCommand> path_from_json(const Json& j, const std::string& at) {
  if (!j.is_array()) throw FormatError(at, "expected array");
  std::vector<PathCommand> path;
  path.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& c = j[i];
    const auto where = at + "[" + std::to_string(i) + "]";
    if (!c.is_array() || c.empty() || !c[0].is_string()) throw FormatError(where, "expected [verb, ...]");
    auto verb = verb_from_char(c[0].get_ref<const std::string&>());
    if (!verb) throw FormatError(where, "unknown path verb");
    if (c.size() != static_cast<std::size_t>(verb_arity(*verb)) + 1) throw FormatError(where, "wrong arity");
    PathCommand cmd;
    cmd.verb = *verb;
    for (int k = 0; k < verb_arity(*verb); ++k) {
      auto d = json_as_real(c[k + 1]);
      if (!d) throw FormatError(where, "coordinate is not a finite number");
      cmd.coords[k] = *d;
    }
    path.push_back(cmd);
  }
  if (auto bad = validate_path(path); !bad.empty()) {
    throw FormatError(at + bad.substr(4), bad == "path" ? "empty path" : "path must begin with M");
  }
  return path;
}

Json stroke_to_json(const Stroke& s) {
  Json j;
  j["strokeId"] = s.id;
  j["clientId"] = s.clientId;
  j["timeStamp"] = s.timeStamp;
  j["color"] = s.color.hex();
  j["width"] = json_real(s.width);
  j["path"] = path_to_json(s.path);
  j["undone"] = s.undone;
  j["undoRank"] = s.undoRank;
  return j;
}

Json document_to_json(const SessionDocument& doc) {
  Json j;
  j["meta"] = Json{{"name", doc.meta.name},
                   {"createdAt", doc.meta.createdAt},
                   {"version", doc.meta.version},
                   {"width", doc.meta.width},
                   {"height", doc.meta.height}};
  j["idCounter"] = doc.idCounter;
  Json layers = Json::array();
  for (const auto& l : doc.layers) layers.push_back(layer_to_json(l));
  j["layers"] = std::move(layers);
  return j;
}

SessionDocument document_from_json(const Json& j) {
  const std::string root;
  SessionDocument doc;
  const Json& meta = require(j, "meta", root);
  doc.meta.name = read_string(meta, "name", "/meta");
  doc.meta.createdAt = read_int(meta, "createdAt", "/meta");
  if (doc.meta.createdAt < 0) throw FormatError("/meta/createdAt", "must be >= 0");
  auto version = read_int(meta, "version", "/meta");
  if (version < 1) throw FormatError("/meta/version", "must be >= 1");
  if (version > kFormatVersion) throw UnsupportedVersion(static_cast<int>(std::min<std::int64_t>(version, INT32_MAX)));
  doc.meta.version = static_cast<int>(version);
  auto width = read_int(meta, "width", "/meta");
  auto height = read_int(meta, "height", "/meta");
  if (width < 1 || width > 1 << 15) throw FormatError("/meta/width", "must be in [1, 32768]");
  if (height < 1 || height > 1 << 15) throw FormatError("/meta/height", "must be in [1, 32768]");
  doc.meta.width = static_cast<int>(width);
  doc.meta.height = static_cast<int>(height);
  auto counter = read_int(j, "idCounter", root);
  if (counter < 0) throw FormatError("/idCounter", "must be >= 0");
  doc.idCounter = static_cast<std::uint64_t>(counter);
  const Json& layers = read_array(j, "layers", root);
  std::set<std::string, std::less<>> ids;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    auto at = child("/layers", i);
    Layer l = layer_from_json(layers[i], at);
    if (!ids.insert(l.id).second) throw FormatError(child(at, "id"), "duplicate layer id");
    doc.layers.push_back(std::move(l));
  }
  return doc;
}

std::string canonical(const SessionDocument& doc) { return document_to_json(doc).dump(); }

std::string fingerprint(const SessionDocument& doc) { return hex64(fnv1a64(canonical(doc))); }

std::string save_document(const SessionDocument& doc, Seq seq) {
  Json j = document_to_json(doc);
  if (seq != 0) j["seq"] = seq;
  return j.dump(1) + "\n";
}

LoadedDocument load_document(std::string_view bytes) {
  Json j = Json::parse(bytes, nullptr, false);
  if (j.is_discarded()) throw FormatError("/", "not valid JSON");
  LoadedDocument out;
  out.doc = document_from_json(j);
  if (auto it = j.find("seq"); it != j.end()) {
    auto s = json_as_int(*it);
    if (!it->is_number() || !s || *s < 0) throw FormatError("/seq", "expected non-negative integer");
    out.seq = static_cast<Seq>(*s);
  }
  return out;
}

}  // namespace colier::doc
