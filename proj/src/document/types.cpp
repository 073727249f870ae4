#include "colier/document/types.hpp"

#include <cmath>
#include <cstdio>

namespace colier::doc {
namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::optional<Color> Color::parse(std::string_view text) {
  if (text.size() != 7 || text[0] != '#') return std::nullopt;
  std::uint8_t out[3];
  for (int i = 0; i < 3; ++i) {
    int hi = hex_digit(text[1 + 2 * i]);
    int lo = hex_digit(text[2 + 2 * i]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return Color{out[0], out[1], out[2]};
}

std::string Color::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02X%02X%02X", r, g, b);
  return buf;
}

std::optional<PathVerb> verb_from_char(std::string_view s) {
  if (s == "M") return PathVerb::MoveTo;
  if (s == "L") return PathVerb::LineTo;
  if (s == "Q") return PathVerb::QuadTo;
  return std::nullopt;
}

std::string validate_path(const std::vector<PathCommand>& path) {
  if (path.empty()) return "path";
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto& cmd = path[i];
    if (i == 0 && cmd.verb != PathVerb::MoveTo) return "path[0]";
    for (int k = 0; k < verb_arity(cmd.verb); ++k) {
      if (!std::isfinite(cmd.coords[k])) return "path[" + std::to_string(i) + "]";
    }
  }
  return {};
}

double clamp_scale(double s) { return (std::isnan(s) || s < kMinScale) ? kMinScale : s; }

double normalize_rotation(double degrees) {
  double r = std::fmod(degrees, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;  // fmod(-tiny) + 360 can round up to 360
  return r == 0.0 ? 0.0 : r;
}

double VcaInstance::param(std::string_view name) const {
  if (auto it = params.find(name); it != params.end()) return it->second;
  if (const auto* spec = find_param(effect, name)) return spec->fallback;
  return 0.0;
}

VcaInstance make_vca(VcaId id, Effect effect) {
  VcaInstance v;
  v.id = std::move(id);
  v.effect = effect;
  for (const auto& p : effect_spec(effect).params) v.params.emplace(std::string(p.name), p.fallback);
  return v;
}

const VcaInstance* Layer::find_vca(std::string_view vca) const {
  for (const auto& v : pipeline) {
    if (v.id == vca) return &v;
  }
  return nullptr;
}

VcaInstance* Layer::find_vca(std::string_view vca) {
  return const_cast<VcaInstance*>(std::as_const(*this).find_vca(vca));
}

const Layer* SessionDocument::find_layer(std::string_view id) const {
  for (const auto& l : layers) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

Layer* SessionDocument::find_layer(std::string_view id) {
  return const_cast<Layer*>(std::as_const(*this).find_layer(id));
}

std::optional<std::size_t> SessionDocument::layer_index(std::string_view id) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].id == id) return i;
  }
  return std::nullopt;
}

SessionDocument make_document(std::string name, int width, int height, Millis createdAt) {
  SessionDocument d;
  d.meta.name = std::move(name);
  d.meta.width = width;
  d.meta.height = height;
  d.meta.createdAt = createdAt;
  d.meta.version = kFormatVersion;
  return d;
}

std::string_view module_of(const Mutation& m) {
  return std::visit(
      overloaded{
          [](const op::NewPath&) -> std::string_view { return "drawing"; },
          [](const op::UndoPath&) -> std::string_view { return "drawing"; },
          [](const op::RedoPath&) -> std::string_view { return "drawing"; },
          [](const op::AddVca&) -> std::string_view { return "pipeline"; },
          [](const op::RemoveVca&) -> std::string_view { return "pipeline"; },
          [](const op::ReorderVca&) -> std::string_view { return "pipeline"; },
          [](const op::UpdateVcaParams&) -> std::string_view { return "pipeline"; },
          [](const op::SetVcaEnabled&) -> std::string_view { return "pipeline"; },
          [](const auto&) -> std::string_view { return "layer"; },
      },
      m);
}

std::string_view action_of(const Mutation& m) {
  return std::visit(overloaded{
                        [](const op::AddLayer&) -> std::string_view { return "add"; },
                        [](const op::DeleteLayer&) -> std::string_view { return "delete"; },
                        [](const op::ReorderLayer&) -> std::string_view { return "reorder"; },
                        [](const op::UpdateLayer&) -> std::string_view { return "updateProperty"; },
                        [](const op::Lock&) -> std::string_view { return "lock"; },
                        [](const op::Unlock&) -> std::string_view { return "unlock"; },
                        [](const op::ExclusiveLock&) -> std::string_view { return "exclusiveLock"; },
                        [](const op::ExclusiveUnlock&) -> std::string_view {
                          return "exclusiveUnlock";
                        },
                        [](const op::NewPath&) -> std::string_view { return "newPath"; },
                        [](const op::UndoPath&) -> std::string_view { return "undoPath"; },
                        [](const op::RedoPath&) -> std::string_view { return "redoPath"; },
                        [](const op::AddVca&) -> std::string_view { return "addVca"; },
                        [](const op::RemoveVca&) -> std::string_view { return "removeVca"; },
                        [](const op::ReorderVca&) -> std::string_view { return "reorderVca"; },
                        [](const op::UpdateVcaParams&) -> std::string_view { return "updateParam"; },
                        [](const op::SetVcaEnabled&) -> std::string_view { return "setEnabled"; },
                    },
                    m);
}

const LayerId* target_layer(const Mutation& m) {
  return std::visit(
      overloaded{
          [](const op::AddLayer&) -> const LayerId* { return nullptr; },
          [](const auto& x) -> const LayerId* { return &x.layerId; },
      },
      m);
}

}  // namespace colier::doc
