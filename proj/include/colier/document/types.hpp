#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "colier/document/effects.hpp"

namespace colier::doc {

using ClientId = std::string;
using LayerId = std::string;
using StrokeId = std::string;
using VcaId = std::string;
using Millis = std::int64_t;
using Seq = std::uint64_t;

/// Format version written by this implementation.
inline constexpr int kFormatVersion = 1;

struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  /// Accepts exactly "#RRGGBB" (either hex case).
  static std::optional<Color> parse(std::string_view text);
  /// Upper-case "#RRGGBB".
  std::string hex() const;

  bool operator==(const Color&) const = default;
};

enum class PathVerb : char { MoveTo = 'M', LineTo = 'L', QuadTo = 'Q' };

/// Number of coordinates carried by a verb: M/L take (x,y), Q takes (cx,cy,x,y).
constexpr int verb_arity(PathVerb v) { return v == PathVerb::QuadTo ? 4 : 2; }
std::optional<PathVerb> verb_from_char(std::string_view s);

struct PathCommand {
  PathVerb verb = PathVerb::MoveTo;
  std::array<double, 4> coords{};

  static PathCommand move_to(double x, double y) { return {PathVerb::MoveTo, {x, y, 0, 0}}; }
  static PathCommand line_to(double x, double y) { return {PathVerb::LineTo, {x, y, 0, 0}}; }
  static PathCommand quad_to(double cx, double cy, double x, double y) {
    return {PathVerb::QuadTo, {cx, cy, x, y}};
  }

  bool operator==(const PathCommand&) const = default;
};

/// Empty string when the path is valid, otherwise the offending element
/// ("path", "path[3]").
std::string validate_path(const std::vector<PathCommand>& path);

struct Stroke {
  StrokeId id;
  ClientId clientId;
  Millis timeStamp = 0;
  Color color;
  double width = 1.0;
  std::vector<PathCommand> path;
  bool undone = false;
  // Position of this stroke in its author's undo stack on the layer; 0 while
  // live. Redo restores the author's stroke with the highest rank.
  std::uint32_t undoRank = 0;

  bool operator==(const Stroke&) const = default;
};

/// Layer placement. The layer's top-left sits at the canvas origin; the
/// transform scales, then rotates (counter-clockwise as seen on screen),
/// about the layer center, then translates by (tx, ty).
struct Transform2D {
  double tx = 0.0;
  double ty = 0.0;
  double rotation = 0.0;
  double scaleX = 1.0;
  double scaleY = 1.0;

  bool is_identity() const {
    return tx == 0.0 && ty == 0.0 && rotation == 0.0 && scaleX == 1.0 && scaleY == 1.0;
  }
  bool operator==(const Transform2D&) const = default;
};

inline constexpr double kMinScale = 1e-3;
double clamp_scale(double s);
double normalize_rotation(double degrees);

struct VcaInstance {
  VcaId id;
  Effect effect = Effect::Contrast;
  bool enabled = true;
  std::map<std::string, double, std::less<>> params;

  double param(std::string_view name) const;
  bool operator==(const VcaInstance&) const = default;
};

/// VCA with every parameter at its default value.
VcaInstance make_vca(VcaId id, Effect effect);

struct ExclusiveLockInfo {
  ClientId owner;
  Millis since = 0;
  bool operator==(const ExclusiveLockInfo&) const = default;
};

struct Layer {
  LayerId id;
  std::string name;
  bool visible = true;
  bool locked = false;
  std::optional<ExclusiveLockInfo> exclusiveLock;
  Transform2D transform;
  double opacity = 1.0;
  std::optional<std::string> asset;  // file name under the session's assets/
  std::vector<Stroke> strokes;
  std::vector<VcaInstance> pipeline;

  const VcaInstance* find_vca(std::string_view vca) const;
  VcaInstance* find_vca(std::string_view vca);
  bool operator==(const Layer&) const = default;
};

struct DocumentMeta {
  std::string name;
  Millis createdAt = 0;
  int version = kFormatVersion;
  int width = 1;
  int height = 1;
  bool operator==(const DocumentMeta&) const = default;
};

struct SessionDocument {
  DocumentMeta meta;
  std::vector<Layer> layers;  // index 0 is bottom-most
  // Source of server-side identifiers. Every replica advances it identically
  // because every replica applies the same sequence of changes.
  std::uint64_t idCounter = 0;

  const Layer* find_layer(std::string_view id) const;
  Layer* find_layer(std::string_view id);
  std::optional<std::size_t> layer_index(std::string_view id) const;
  bool operator==(const SessionDocument&) const = default;
};

SessionDocument make_document(std::string name, int width, int height, Millis createdAt = 0);

// ---------------------------------------------------------------------------
// Change payloads. One struct per document-mutating action.

namespace op {

struct AddLayer {
  std::optional<std::string> name;
  std::optional<std::string> asset;
  bool operator==(const AddLayer&) const = default;
};
struct DeleteLayer {
  LayerId layerId;
  bool operator==(const DeleteLayer&) const = default;
};
struct ReorderLayer {
  LayerId layerId;
  std::int64_t toIndex = 0;
  bool operator==(const ReorderLayer&) const = default;
};
struct UpdateLayer {
  LayerId layerId;
  std::optional<bool> visible;
  std::optional<double> opacity;
  std::optional<std::string> name;
  std::optional<double> tx, ty, rotation, scaleX, scaleY;

  bool touches_transform() const { return tx || ty || rotation || scaleX || scaleY; }
  bool operator==(const UpdateLayer&) const = default;
};
struct Lock {
  LayerId layerId;
  bool operator==(const Lock&) const = default;
};
struct Unlock {
  LayerId layerId;
  bool operator==(const Unlock&) const = default;
};
struct ExclusiveLock {
  LayerId layerId;
  bool operator==(const ExclusiveLock&) const = default;
};
struct ExclusiveUnlock {
  LayerId layerId;
  bool operator==(const ExclusiveUnlock&) const = default;
};
struct NewPath {
  LayerId layerId;
  Color color;
  double width = 1.0;
  std::vector<PathCommand> path;
  bool operator==(const NewPath&) const = default;
};
struct UndoPath {
  LayerId layerId;
  bool operator==(const UndoPath&) const = default;
};
struct RedoPath {
  LayerId layerId;
  bool operator==(const RedoPath&) const = default;
};
struct AddVca {
  LayerId layerId;
  Effect effect = Effect::Contrast;
  std::optional<bool> enabled;
  std::map<std::string, double, std::less<>> params;
  bool operator==(const AddVca&) const = default;
};
struct RemoveVca {
  LayerId layerId;
  VcaId vcaId;
  bool operator==(const RemoveVca&) const = default;
};
struct ReorderVca {
  LayerId layerId;
  VcaId vcaId;
  std::int64_t toIndex = 0;
  bool operator==(const ReorderVca&) const = default;
};
struct UpdateVcaParams {
  LayerId layerId;
  VcaId vcaId;
  std::map<std::string, double, std::less<>> params;
  bool operator==(const UpdateVcaParams&) const = default;
};
struct SetVcaEnabled {
  LayerId layerId;
  VcaId vcaId;
  bool enabled = true;
  bool operator==(const SetVcaEnabled&) const = default;
};

}  // namespace op

using Mutation =
    std::variant<op::AddLayer, op::DeleteLayer, op::ReorderLayer, op::UpdateLayer, op::Lock,
                 op::Unlock, op::ExclusiveLock, op::ExclusiveUnlock, op::NewPath, op::UndoPath,
                 op::RedoPath, op::AddVca, op::RemoveVca, op::ReorderVca, op::UpdateVcaParams,
                 op::SetVcaEnabled>;

/// Wire module ("layer", "drawing", "pipeline") and action name of a mutation.
std::string_view module_of(const Mutation& m);
std::string_view action_of(const Mutation& m);
/// Target layer, or nullptr for addLayer.
const LayerId* target_layer(const Mutation& m);

struct ChangeMessage {
  ClientId clientId;
  Millis timeStamp = 0;  // client clock, advisory
  std::optional<Millis> serverTime;  // stamped by the sequencer
  Mutation mutation;

  /// Clock used for state that records "when" (exclusive-lock time).
  Millis effective_time() const { return serverTime.value_or(timeStamp); }
  bool operator==(const ChangeMessage&) const = default;
};

struct SequencedEvent {
  Seq seq = 0;
  ChangeMessage change;
  bool operator==(const SequencedEvent&) const = default;
};

}  // namespace colier::doc
