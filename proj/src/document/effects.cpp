#include "colier/document/effects.hpp"

#include <array>
#include <cmath>

namespace colier::doc {
namespace {

constexpr std::array<ParamSpec, 1> kContrast{{{"amount", 0.0, 4.0, 1.0, 1.0, false}}};
constexpr std::array<ParamSpec, 1> kPixelation{{{"blockSize", 1.0, 64.0, 8.0, 1.0, true}}};
constexpr std::array<ParamSpec, 1> kVignette{{{"strength", 0.0, 1.0, 0.5, 0.0, false}}};
constexpr std::array<ParamSpec, 1> kAberration{{{"offset", 0.0, 0.02, 0.005, 0.0, false}}};
constexpr std::array<ParamSpec, 1> kChromaZoom{{{"zoom", 0.0, 0.1, 0.02, 0.0, false}}};

const std::array<EffectSpec, 5> kEffects{{
    {Effect::Contrast, "contrast", kContrast},
    {Effect::Pixelation, "pixelation", kPixelation},
    {Effect::Vignette, "vignette", kVignette},
    {Effect::ChromaticAberration, "chromaticAberration", kAberration},
    {Effect::ChromaZoom, "chromaZoom", kChromaZoom},
}};

}  // namespace

std::span<const EffectSpec> all_effects() { return kEffects; }

const EffectSpec& effect_spec(Effect e) { return kEffects[static_cast<std::size_t>(e)]; }

std::optional<Effect> effect_from_name(std::string_view name) {
  for (const auto& spec : kEffects) {
    if (spec.name == name) return spec.effect;
  }
  return std::nullopt;
}

std::string_view effect_name(Effect e) { return effect_spec(e).name; }

const ParamSpec* find_param(std::string_view name) {
  for (const auto& spec : kEffects) {
    for (const auto& p : spec.params) {
      if (p.name == name) return &p;
    }
  }
  return nullptr;
}

const ParamSpec* find_param(Effect e, std::string_view name) {
  for (const auto& p : effect_spec(e).params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

bool param_in_range(const ParamSpec& spec, double value) {
  if (!std::isfinite(value)) return false;
  if (value < spec.min || value > spec.max) return false;
  if (spec.integral && std::trunc(value) != value) return false;
  return true;
}

}  // namespace colier::doc
