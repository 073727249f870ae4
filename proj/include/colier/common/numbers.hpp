#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace colier {

using Json = nlohmann::ordered_json;

/// Shortest decimal text that parses back to exactly `v`. Integral values
/// print without a fractional part ("38", not "38.0").
std::string format_real(double v);
std::string format_int(std::int64_t v);

/// Strict decimal parse: the whole string must be consumed, result finite.
std::optional<double> parse_real(std::string_view text);
std::optional<std::int64_t> parse_int(std::string_view text);

/// JSON number for `v`: an integer node when `v` is integral and exactly
/// representable, otherwise a float node. Keeps canonical output free of
/// spurious ".0" suffixes.
Json json_real(double v);

/// Reads a JSON node as a real: accepts numbers and decimal strings.
std::optional<double> json_as_real(const Json& node);
std::optional<std::int64_t> json_as_int(const Json& node);

/// 64-bit FNV-1a, stable across platforms; used for state fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace colier
