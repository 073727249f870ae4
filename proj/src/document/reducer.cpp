#include "colier/document/reducer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace colier::doc {
namespace {

Reject stale(std::string detail) { return {RejectCode::StaleTarget, DenyReason::None, std::move(detail)}; }
Reject invalid(std::string detail) { return {RejectCode::InvalidValue, DenyReason::None, std::move(detail)}; }
Reject malformed(std::string detail) {
  return {RejectCode::MalformedPayload, DenyReason::None, std::move(detail)};
}
Reject denied(DenyReason why, std::string detail) {
  return {RejectCode::PermissionDenied, why, std::move(detail)};
}

bool finite_or_absent(const std::optional<double>& v) { return !v || std::isfinite(*v); }

bool is_lock_toggle(const Mutation& m) {
  return std::holds_alternative<op::Lock>(m) || std::holds_alternative<op::Unlock>(m) ||
         std::holds_alternative<op::ExclusiveLock>(m) ||
         std::holds_alternative<op::ExclusiveUnlock>(m);
}

bool is_transform_update(const Mutation& m) {
  const auto* u = std::get_if<op::UpdateLayer>(&m);
  return u && u->touches_transform();
}

bool valid_asset_name(std::string_view name) {
  if (name.empty() || name.size() > 255 || name == "." || name == "..") return false;
  return name.find_first_of("/\\") == std::string_view::npos && name.find('\0') == std::string_view::npos;
}

std::optional<Reject> check_params(Effect effect,
                                   const std::map<std::string, double, std::less<>>& params) {
  for (const auto& [name, value] : params) {
    const ParamSpec* spec = find_param(effect, name);
    if (!spec || !param_in_range(*spec, value)) return invalid("params." + name);
  }
  return std::nullopt;
}

// Every apply_* validates first and mutates last; a returned Reject means
// nothing was written.
struct Applier {
  SessionDocument& doc;
  Layer* layer;
  const ChangeMessage& change;

  DomainEvent event(std::string created = {}) const {
    DomainEvent e;
    e.action = action_of(change.mutation);
    e.layerId = layer ? layer->id : created;
    e.createdId = std::move(created);
    return e;
  }

  Result<DomainEvent, Reject> operator()(const op::AddLayer& m) {
    if (m.asset && !valid_asset_name(*m.asset)) return invalid("asset");
    std::string id = make_id('L', doc.idCounter + 1);
    Layer l;
    l.id = id;
    l.name = m.name ? *m.name : "Layer " + std::to_string(doc.layers.size() + 1);
    l.asset = m.asset;
    ++doc.idCounter;
    doc.layers.push_back(std::move(l));
    return event(std::move(id));
  }

  Result<DomainEvent, Reject> operator()(const op::DeleteLayer&) {
    auto e = event();
    auto idx = *doc.layer_index(layer->id);
    layer = nullptr;
    doc.layers.erase(doc.layers.begin() + static_cast<std::ptrdiff_t>(idx));
    return e;
  }

  Result<DomainEvent, Reject> operator()(const op::ReorderLayer& m) {
    auto n = static_cast<std::int64_t>(doc.layers.size());
    if (m.toIndex < 0 || m.toIndex >= n) return invalid("toIndex");
    auto e = event();
    auto from = static_cast<std::int64_t>(*doc.layer_index(layer->id));
    auto first = doc.layers.begin();
    if (from < m.toIndex) {
      std::rotate(first + from, first + from + 1, first + m.toIndex + 1);
    } else if (from > m.toIndex) {
      std::rotate(first + m.toIndex, first + from, first + from + 1);
    }
    layer = nullptr;
    return e;
  }

  Result<DomainEvent, Reject> operator()(const op::UpdateLayer& m) {
    if (m.opacity && !(std::isfinite(*m.opacity) && *m.opacity >= 0.0 && *m.opacity <= 1.0)) {
      return invalid("opacity");
    }
    if (!finite_or_absent(m.tx)) return invalid("tx");
    if (!finite_or_absent(m.ty)) return invalid("ty");
    if (!finite_or_absent(m.rotation)) return invalid("rotation");
    if (!finite_or_absent(m.scaleX)) return invalid("scaleX");
    if (!finite_or_absent(m.scaleY)) return invalid("scaleY");
    if (m.visible) layer->visible = *m.visible;
    if (m.opacity) layer->opacity = *m.opacity;
    if (m.name) layer->name = *m.name;
    if (m.tx) layer->transform.tx = *m.tx;
    if (m.ty) layer->transform.ty = *m.ty;
    if (m.rotation) layer->transform.rotation = normalize_rotation(*m.rotation);
    if (m.scaleX) layer->transform.scaleX = clamp_scale(*m.scaleX);
    if (m.scaleY) layer->transform.scaleY = clamp_scale(*m.scaleY);
    return event();
  }

  Result<DomainEvent, Reject> operator()(const op::Lock&) {
    layer->locked = true;
    return event();
  }

  Result<DomainEvent, Reject> operator()(const op::Unlock&) {
    layer->locked = false;
    return event();
  }

  Result<DomainEvent, Reject> operator()(const op::ExclusiveLock&) {
    layer->exclusiveLock = ExclusiveLockInfo{change.clientId, change.effective_time()};
    return event();
  }

  Result<DomainEvent, Reject> operator()(const op::ExclusiveUnlock&) {
    auto e = event();
    if (layer->exclusiveLock && layer->exclusiveLock->owner != change.clientId) {
      e.notifyOwner = layer->exclusiveLock->owner;
    }
    layer->exclusiveLock.reset();
    return e;
  }

  Result<DomainEvent, Reject> operator()(const op::NewPath& m) {
    if (auto where = validate_path(m.path); !where.empty()) return malformed(where);
    if (!(std::isfinite(m.width) && m.width > 0.0)) return invalid("width");
    std::string id = make_id('S', doc.idCounter + 1);
    Stroke s;
    s.id = id;
    s.clientId = change.clientId;
    s.timeStamp = change.timeStamp;
    s.color = m.color;
    s.width = m.width;
    s.path = m.path;
    ++doc.idCounter;
    layer->strokes.push_back(std::move(s));
    return event(std::move(id));
  }

  Result<DomainEvent, Reject> operator()(const op::UndoPath&) {
    auto& strokes = layer->strokes;
    auto it = std::find_if(strokes.rbegin(), strokes.rend(), [&](const Stroke& s) {
      return s.clientId == change.clientId && !s.undone;
    });
    if (it == strokes.rend()) return Reject{RejectCode::NothingToUndo, DenyReason::None, layer->id};
    std::uint32_t rank = 0;
    for (const auto& s : strokes) {
      if (s.clientId == change.clientId && s.undone) rank = std::max(rank, s.undoRank);
    }
    it->undone = true;
    it->undoRank = rank + 1;
    return event();
  }

  Result<DomainEvent, Reject> operator()(const op::RedoPath&) {
    Stroke* latest = nullptr;
    for (auto& s : layer->strokes) {
      if (s.clientId == change.clientId && s.undone && (!latest || s.undoRank > latest->undoRank)) {
        latest = &s;
      }
    }
    if (!latest) return Reject{RejectCode::NothingToRedo, DenyReason::None, layer->id};
    latest->undone = false;
    latest->undoRank = 0;
    return event();
  }

  Result<DomainEvent, Reject> operator()(const op::AddVca& m) {
    if (auto bad = check_params(m.effect, m.params)) return *bad;
    std::string id = make_id('V', doc.idCounter + 1);
    VcaInstance v = make_vca(id, m.effect);
    v.enabled = m.enabled.value_or(true);
    for (const auto& [name, value] : m.params) v.params[name] = value;
    ++doc.idCounter;
    layer->pipeline.push_back(std::move(v));
    return event(std::move(id));
  }

  Result<DomainEvent, Reject> operator()(const op::RemoveVca& m) {
    auto& p = layer->pipeline;
    auto it = std::find_if(p.begin(), p.end(), [&](const VcaInstance& v) { return v.id == m.vcaId; });
    if (it == p.end()) return stale("vca " + m.vcaId);
    p.erase(it);
    return event();
  }

  Result<DomainEvent, Reject> operator()(const op::ReorderVca& m) {
    auto& p = layer->pipeline;
    auto it = std::find_if(p.begin(), p.end(), [&](const VcaInstance& v) { return v.id == m.vcaId; });
    if (it == p.end()) return stale("vca " + m.vcaId);
    auto n = static_cast<std::int64_t>(p.size());
    if (m.toIndex < 0 || m.toIndex >= n) return invalid("toIndex");
    auto from = it - p.begin();
    if (from < m.toIndex) {
      std::rotate(p.begin() + from, p.begin() + from + 1, p.begin() + m.toIndex + 1);
    } else if (from > m.toIndex) {
      std::rotate(p.begin() + m.toIndex, p.begin() + from, p.begin() + from + 1);
    }
    return event();
  }

  Result<DomainEvent, Reject> operator()(const op::UpdateVcaParams& m) {
    VcaInstance* v = layer->find_vca(m.vcaId);
    if (!v) return stale("vca " + m.vcaId);
    if (auto bad = check_params(v->effect, m.params)) return *bad;
    for (const auto& [name, value] : m.params) v->params[name] = value;
    return event();
  }

  Result<DomainEvent, Reject> operator()(const op::SetVcaEnabled& m) {
    VcaInstance* v = layer->find_vca(m.vcaId);
    if (!v) return stale("vca " + m.vcaId);
    v->enabled = m.enabled;
    return event();
  }
};

}  // namespace

std::string_view Reject::reason() const {
  switch (code) {
    case RejectCode::StaleTarget: return "StaleTarget";
    case RejectCode::InvalidValue: return "InvalidValue";
    case RejectCode::MalformedPayload: return "MalformedPayload";
    case RejectCode::NothingToUndo: return "NothingToUndo";
    case RejectCode::NothingToRedo: return "NothingToRedo";
    case RejectCode::PermissionDenied:
      switch (deny) {
        case DenyReason::ExclusiveLock: return "ExclusiveLock";
        case DenyReason::Locked: return "Locked";
        case DenyReason::TransformLease: return "TransformLease";
        case DenyReason::None: break;
      }
      return "PermissionDenied";
  }
  return "PermissionDenied";
}

std::optional<Reject> reject_from_reason(std::string_view reason, std::string detail) {
  static constexpr std::pair<std::string_view, std::pair<RejectCode, DenyReason>> kTable[] = {
      {"StaleTarget", {RejectCode::StaleTarget, DenyReason::None}},
      {"InvalidValue", {RejectCode::InvalidValue, DenyReason::None}},
      {"MalformedPayload", {RejectCode::MalformedPayload, DenyReason::None}},
      {"NothingToUndo", {RejectCode::NothingToUndo, DenyReason::None}},
      {"NothingToRedo", {RejectCode::NothingToRedo, DenyReason::None}},
      {"PermissionDenied", {RejectCode::PermissionDenied, DenyReason::None}},
      {"ExclusiveLock", {RejectCode::PermissionDenied, DenyReason::ExclusiveLock}},
      {"Locked", {RejectCode::PermissionDenied, DenyReason::Locked}},
      {"TransformLease", {RejectCode::PermissionDenied, DenyReason::TransformLease}},
  };
  for (const auto& [name, codes] : kTable) {
    if (name == reason) return Reject{codes.first, codes.second, std::move(detail)};
  }
  return std::nullopt;
}

std::optional<ClientId> TransformLeaseTable::holder(std::string_view layer, Millis now) const {
  auto it = leases_.find(layer);
  if (it == leases_.end() || it->second.expiresAt <= now) return std::nullopt;
  return it->second.holder;
}

bool TransformLeaseTable::acquire(const LayerId& layer, const ClientId& client, Millis now) {
  auto current = holder(layer, now);
  if (current && *current != client) return false;
  leases_.insert_or_assign(layer, TransformLease{client, now + kTtlMs});
  return true;
}

void TransformLeaseTable::release(std::string_view layer, std::string_view client) {
  auto it = leases_.find(layer);
  if (it != leases_.end() && it->second.holder == client) leases_.erase(it);
}

void TransformLeaseTable::release_all(std::string_view client) {
  std::erase_if(leases_, [&](const auto& kv) { return kv.second.holder == client; });
}

void TransformLeaseTable::erase_expired(Millis now) {
  std::erase_if(leases_, [&](const auto& kv) { return kv.second.expiresAt <= now; });
}

void TransformLeaseTable::erase_layer(std::string_view layer) {
  if (auto it = leases_.find(layer); it != leases_.end()) leases_.erase(it);
}

Permission check_permission(const SessionDocument& doc, const ChangeMessage& change,
                            const TransformLeaseTable& leases, Millis now) {
  const LayerId* target = target_layer(change.mutation);
  const Layer* layer = target ? doc.find_layer(*target) : nullptr;
  if (!layer) return {};

  if (layer->exclusiveLock && layer->exclusiveLock->owner != change.clientId) {
    if (!std::holds_alternative<op::ExclusiveUnlock>(change.mutation)) {
      return {false, DenyReason::ExclusiveLock, std::nullopt};
    }
    return {true, DenyReason::None, layer->exclusiveLock->owner};
  }
  if (layer->locked && !is_lock_toggle(change.mutation)) return {false, DenyReason::Locked, std::nullopt};
  if (is_transform_update(change.mutation)) {
    auto h = leases.holder(layer->id, now);
    if (h && *h != change.clientId) return {false, DenyReason::TransformLease, std::nullopt};
  }
  return {};
}

Result<DomainEvent, Reject> apply_change_in_place(SessionDocument& doc, const ChangeMessage& change) {
  static const TransformLeaseTable kNoLeases;
  Layer* layer = nullptr;
  if (const LayerId* target = target_layer(change.mutation)) {
    layer = doc.find_layer(*target);
    if (!layer) return stale("layer " + *target);
    auto perm = check_permission(doc, change, kNoLeases, 0);
    if (!perm.allowed) return denied(perm.reason, layer->id);
  }
  return std::visit(Applier{doc, layer, change}, change.mutation);
}

Result<Applied, Reject> apply_change(const SessionDocument& doc, const ChangeMessage& change) {
  SessionDocument next = doc;
  auto r = apply_change_in_place(next, change);
  if (!r) return r.error();
  return Applied{std::move(next), std::move(r).value()};
}

namespace {
Result<SessionDocument, Reject> apply_stroke_op(const SessionDocument& doc, std::string_view client,
                                                Mutation m) {
  ChangeMessage c;
  c.clientId = std::string(client);
  c.mutation = std::move(m);
  auto r = apply_change(doc, c);
  if (!r) return r.error();
  return std::move(r).value().doc;
}
}  // namespace

Result<SessionDocument, Reject> undo_stroke(const SessionDocument& doc, std::string_view client,
                                            std::string_view layer) {
  return apply_stroke_op(doc, client, op::UndoPath{std::string(layer)});
}

Result<SessionDocument, Reject> redo_stroke(const SessionDocument& doc, std::string_view client,
                                            std::string_view layer) {
  return apply_stroke_op(doc, client, op::RedoPath{std::string(layer)});
}

std::string make_id(char prefix, std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%08llu", prefix, static_cast<unsigned long long>(n));
  return buf;
}

}  // namespace colier::doc
