#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace colier::doc {

enum class Effect { Contrast, Pixelation, Vignette, ChromaticAberration, ChromaZoom };

struct ParamSpec {
  std::string_view name;
  double min;
  double max;
  double fallback;  // value used when a VCA is added without this parameter
  double identity;  // value at which the effect is a pixel-exact no-op
  bool integral;
};

struct EffectSpec {
  Effect effect;
  std::string_view name;
  std::span<const ParamSpec> params;
};

std::span<const EffectSpec> all_effects();
const EffectSpec& effect_spec(Effect e);
std::optional<Effect> effect_from_name(std::string_view name);
std::string_view effect_name(Effect e);

/// Looks a parameter up by name across every effect. Parameter names are
/// unique over the whole effect set, so a name alone identifies its range.
const ParamSpec* find_param(std::string_view name);
const ParamSpec* find_param(Effect e, std::string_view name);

/// True when `value` is finite, inside the range, and integral if required.
bool param_in_range(const ParamSpec& spec, double value);

}  // namespace colier::doc
